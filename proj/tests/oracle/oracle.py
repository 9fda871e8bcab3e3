"""Brute-force reference values for the unit tests (exact fractions, no shared code)."""
from fractions import Fraction as F
from itertools import product
import math


def dyadic(depth):
    def node(level, p):
        if level == depth:
            return (p, [])
        return (p, [node(level + 1, p / 2), node(level + 1, p / 2)])
    return node(0, F(1))


SAMPLE = (F(1), [
    (F(1, 2), [(F(3, 8), []), (F(1, 8), [])]),
    (F(1, 3), [(F(1, 6), []), (F(1, 9), []), (F(1, 18), [])]),
    (F(1, 6), [(F(1, 6), [])]),
])


def flatten(tree):
    """Atoms as (level, prob, frozenset of leaf ids, rank); leaves numbered left to right."""
    atoms = []
    counter = [0]

    def walk(t, level, rank):
        p, kids = t
        if not kids:
            leaves = frozenset([counter[0]])
            counter[0] += 1
        else:
            leaves = frozenset()
            for r, k in enumerate(kids):
                leaves |= walk(k, level + 1, r)
        atoms.append((level, p, leaves, rank, len(kids)))
        return leaves
    walk(tree, 0, 0)
    leaf_p = {}
    for lvl, p, s, r, n in atoms:
        if n == 0:
            (leaf,) = tuple(s)
            leaf_p[leaf] = p
    return atoms, leaf_p


def mass(s, leaf_p):
    return sum(leaf_p[l] for l in s)


def carleson(sets, leaf_p):
    sets = list(set(sets))
    best = F(0)
    for a in sets:
        tot = sum(mass(b, leaf_p) for b in sets if b <= a)
        best = max(best, tot / mass(a, leaf_p))
    return best


def collections(tree):
    atoms, leaf_p = flatten(tree)
    E = [s for (lvl, p, s, r, n) in atoms if r >= 1]
    C = []
    B = []
    for (lvl, p, s, r, n) in atoms:
        if n >= 1:
            kids = [a for a in atoms if a[0] == lvl + 1 and a[2] <= s]
            star = [a for a in kids if a[3] == 0][0]
            C.append((lvl + 1, star[2]))
            if n >= 2:
                B.append(s - star[2])
    return E, B, C, leaf_p


def means(tree, values):
    """values per leaf; returns list of (level, prob, mean, parent mean) per atom."""
    atoms, leaf_p = flatten(tree)
    out = []
    for (lvl, p, s, r, n) in atoms:
        m = sum(values[l] * leaf_p[l] for l in s) / p
        out.append((lvl, p, s, m))
    return out, leaf_p


def variation(tree, values):
    atoms, leaf_p = means(tree, values)
    # differences n >= 1 only; the mean is not part of the variation
    total = F(0)
    for (lvl, p, s, m) in atoms:
        if lvl == 0:
            continue
        parent = min((a for a in atoms if a[0] == lvl - 1 and s <= a[2]), key=lambda a: len(a[2]))
        total += abs(m - parent[3]) * p
    return total


def rzeszut(n):
    depth = n + 1
    L = 2 ** depth
    vals = {}
    for leaf in range(L):
        s = 0
        for k in range(depth):
            bit = (leaf >> (depth - 1 - k)) & 1
            s += -1 if bit else 1
        vals[leaf] = (s > 0) - (s < 0)
    return variation(dyadic(depth), {l: F(v) for l, v in vals.items()})


if __name__ == "__main__":
    for d in range(2, 9):
        E, B, C, lp = collections(dyadic(d))
        print("dyadic", d, "carl E'", carleson(E, lp), "|E'|", len(E))
    E, B, C, lp = collections(SAMPLE)
    print("sample carl E'", carleson(E, lp), "B", carleson(B, lp), "C", carleson([c for _, c in C], lp), "|E|", len(set(E)), "|B|", len(B), "|C|", len(C))
    vals = {0: F(1), 1: F(-2), 2: F(3, 4), 3: F(0), 4: F(5), 5: F(-1, 3)}
    print("sample variation", variation(SAMPLE, vals))
    for n in range(1, 7):
        v = rzeszut(n)
        print("rzeszut", n, v, float(v), math.sqrt(n / 2))
