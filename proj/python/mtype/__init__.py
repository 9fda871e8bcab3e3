"""Exact martingale tools on finite filtrations (Python front end of the C++ core)."""
import json
from fractions import Fraction

from . import _mtype
from ._mtype import Tree, TreeError, tp_bound

__all__ = [
    "Tree", "TreeError", "carleson", "collection_sizes", "generation_decay_violations", "protohaar",
    "condense", "disjointify", "gg_build", "mdiff", "type_estimate", "tp_bound", "rzeszut", "dichotomy",
]


def carleson(tree, collection="E", naive=False, with_omega=False):
    return Fraction(_mtype.carleson(tree, collection, naive, with_omega))


def collection_sizes(tree):
    return dict(_mtype.collection_sizes(tree))


def generation_decay_violations(tree):
    return list(_mtype.generation_decay_violations(tree))


def protohaar(tree, atom, eps, k):
    return json.loads(_mtype.protohaar(tree, atom, str(eps), k))


def condense(tree, eps_tilde, n, k, collection="E"):
    return json.loads(_mtype.condense(tree, str(eps_tilde), n, k, collection))


def disjointify(tree, collection="E"):
    return json.loads(_mtype.disjointify(tree, collection))


def gg_build(tree, n=2, delta="1/2", params="desk"):
    return json.loads(_mtype.gg_build(tree, n, str(delta), params))


def mdiff(tree, function, p=2.0, space="real"):
    """function: {"level": s, "values": {path: [v, ...]}} as a dict or JSON text."""
    text = function if isinstance(function, str) else json.dumps(function)
    return json.loads(_mtype.mdiff(tree, text, p, space))


def type_estimate(tree, p=2.0, space="real", budget=500, seed=1):
    return json.loads(_mtype.type_estimate(tree, p, space, budget, seed))


def rzeszut(n, random=0, seed=1):
    out = json.loads(_mtype.rzeszut(n, random, seed))
    out["variation"] = Fraction(out["variation"])
    return out


def dichotomy(family, depths, p=1.5, space="real", budget=200, seed=1, delta="1/2", max_children=3):
    return _mtype.dichotomy(family, list(depths), p, space, budget, seed, str(delta), max_children)
