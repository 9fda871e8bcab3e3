#include "mtype/collections.hpp"

#include <algorithm>
#include <stdexcept>

namespace mtype {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::E: return "E";
    case Kind::C: return "C";
    case Kind::B: return "B";
    default: return "generic";
  }
}

AtomCollection::AtomCollection(const FiltrationTree& tree, Kind kind, std::vector<Member> members)
    : tree_(&tree), kind_(kind), members_(std::move(members)) {
  std::stable_sort(members_.begin(), members_.end(), [](const Member& a, const Member& b) {
    if (a.set.lo != b.set.lo) return a.set.lo < b.set.lo;
    return a.set.hi > b.set.hi;
  });
  members_.erase(std::unique(members_.begin(), members_.end(),
                             [](const Member& a, const Member& b) { return a.set == b.set; }),
                 members_.end());
  int n = size();
  parent_.assign(n, -1);
  skip_.assign(n, n);
  depth_.assign(n, 0);
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    const Interval& s = members_[i].set;
    while (!stack.empty() && !members_[stack.back()].set.contains(s)) {
      const Interval& top = members_[stack.back()].set;
      if (!top.disjoint(s)) nested_ = false;
      skip_[stack.back()] = i;
      stack.pop_back();
    }
    if (!stack.empty()) {
      parent_[i] = stack.back();
      depth_[i] = depth_[stack.back()] + 1;
    }
    stack.push_back(i);
  }
  for (int i : stack) skip_[i] = n;
}

Q AtomCollection::mass(const std::vector<int>& idx) const {
  Q s = 0;
  for (int i : idx) s += mass(i);
  return s;
}

int AtomCollection::find(const Interval& set) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), set, [](const Member& m, const Interval& s) {
    if (m.set.lo != s.lo) return m.set.lo < s.lo;
    return m.set.hi > s.hi;
  });
  if (it != members_.end() && it->set == set) return static_cast<int>(it - members_.begin());
  return -1;
}

std::vector<int> AtomCollection::g1(const Interval& s) const {
  std::vector<int> out;
  auto it = std::lower_bound(members_.begin(), members_.end(), s.lo,
                             [](const Member& m, int lo) { return m.set.lo < lo; });
  int i = static_cast<int>(it - members_.begin());
  while (i < size() && members_[i].set.lo < s.hi) {
    if (s.strictly_contains(members_[i].set)) {
      out.push_back(i);
      i = skip_[i];
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<std::vector<int>> AtomCollection::generations(const Interval& s, int k) const {
  std::vector<std::vector<int>> gens;
  std::vector<int> cur = g1(s);
  for (int j = 1; j <= k; ++j) {
    gens.push_back(cur);
    if (j == k) break;
    std::vector<int> next;
    for (int m : cur) {
      auto sub = g1(members_[m].set);
      next.insert(next.end(), sub.begin(), sub.end());
    }
    cur = std::move(next);
  }
  return gens;
}

std::vector<int> AtomCollection::generation(const Interval& s, int k) const {
  if (k == 0) {
    int i = find(s);
    return i < 0 ? std::vector<int>{} : std::vector<int>{i};
  }
  return generations(s, k).back();
}

AtomCollection AtomCollection::subset(const std::vector<int>& idx, Kind kind) const {
  std::vector<Member> m;
  m.reserve(idx.size());
  for (int i : idx) m.push_back(members_[i]);
  return AtomCollection(*tree_, kind, std::move(m));
}

bool AtomCollection::precedes(int a, int b) const {
  const Member &x = members_[a], &y = members_[b];
  int lx = x.atom >= 0 ? tree_->atom(x.atom).level : 0;
  int ly = y.atom >= 0 ? tree_->atom(y.atom).level : 0;
  if (lx != ly) return lx < ly;
  Q mx = tree_->mass(x.set), my = tree_->mass(y.set);
  if (mx != my) return mx > my;
  if (x.atom != y.atom) return x.atom < y.atom;
  return a < b;
}

AtomCollection error_collection(const FiltrationTree& tree, bool include_omega) {
  std::vector<Member> m;
  if (include_omega) m.push_back({tree.atom(0).leaves, 0});
  for (int id = 0; id < tree.size(); ++id)
    if (tree.atom(id).parent >= 0 && tree.atom(id).rank >= 1) m.push_back({tree.atom(id).leaves, id});
  return AtomCollection(tree, Kind::E, std::move(m));
}

DerivedCollections derive_collections(const FiltrationTree& tree, bool include_omega) {
  std::vector<Member> c, b;
  for (int id = 0; id < tree.size(); ++id) {
    if (!tree.internal(id)) continue;
    c.push_back({tree.atom(tree.star(id)).leaves, tree.star(id)});
    if (tree.num_children(id) >= 2) b.push_back({tree.tilde(id), id});
  }
  return {error_collection(tree, include_omega), AtomCollection(tree, Kind::C, std::move(c)),
          AtomCollection(tree, Kind::B, std::move(b))};
}

Q carleson_constant(const AtomCollection& r) {
  if (r.empty()) throw std::invalid_argument("Carleson constant of an empty collection");
  int n = r.size();
  std::vector<Q> acc(n);
  for (int i = 0; i < n; ++i) acc[i] = r.mass(i);
  for (int i = n - 1; i >= 0; --i)
    if (r.forest_parent(i) >= 0) acc[r.forest_parent(i)] += acc[i];
  Q best = 0;
  for (int i = 0; i < n; ++i) {
    Q ratio = acc[i] / r.mass(i);
    if (ratio > best) best = ratio;
  }
  return best;
}

Q carleson_constant_naive(const AtomCollection& r) {
  if (r.empty()) throw std::invalid_argument("Carleson constant of an empty collection");
  const FiltrationTree& t = r.tree();
  Q best = 0;
  for (const Member& i : r.members()) {
    Q s = 0;
    for (const Member& j : r.members())
      if (i.set.contains(j.set)) s += t.mass(j.set);
    Q ratio = s / t.mass(i.set);
    if (ratio > best) best = ratio;
  }
  return best;
}

std::vector<std::pair<int, Q>> carleson_growth(const std::function<FiltrationTree(int)>& generator,
                                               const std::vector<int>& depths) {
  std::vector<std::pair<int, Q>> out;
  for (int d : depths) {
    FiltrationTree t = generator(d);
    AtomCollection e = error_collection(t);
    out.emplace_back(d, e.empty() ? Q(0) : carleson_constant(e));
  }
  return out;
}

std::vector<std::string> check_generation_decay(const FiltrationTree& tree, const AtomCollection& e) {
  std::vector<std::string> bad;
  for (int id = 0; id < tree.size(); ++id) {
    const Interval s = tree.atom(id).leaves;
    Q pa = tree.mass(s);
    std::vector<int> cur = e.g1(s);
    for (int k = 1; !cur.empty(); ++k) {
      // bound is per member; the union of a generation can fill almost all of A
      for (int i : cur)
        if (e.mass(i) > pa * pow2(-k))
          bad.push_back("atom '" + tree.path(id) + "' generation " + std::to_string(k) + " member '" +
                        tree.path(e[i].atom) + "' mass " + to_string(e.mass(i)));
      std::vector<int> next;
      for (int i : cur) {
        auto sub = e.g1(e[i].set);
        next.insert(next.end(), sub.begin(), sub.end());
      }
      cur = std::move(next);
    }
  }
  return bad;
}

std::vector<std::string> check_collection_links(const FiltrationTree& tree) {
  std::vector<std::string> bad;
  DerivedCollections d = derive_collections(tree);
  // every member of B comes from exactly one atom, and it is the union of that atom's E-children
  for (const Member& k : d.B.members()) {
    int owners = 0;
    for (int id = 0; id < tree.size(); ++id)
      if (tree.num_children(id) >= 2 && tree.tilde(id) == k.set) ++owners;
    if (owners != 1) bad.push_back("B member of '" + tree.path(k.atom) + "' has " + std::to_string(owners) + " owners");
    const auto& ch = tree.atom(k.atom).children;
    Interval u{tree.atom(ch[1]).leaves.lo, tree.atom(ch.back()).leaves.hi};
    if (!(u == k.set)) bad.push_back("B member of '" + tree.path(k.atom) + "' is not the union of its E-children");
    for (size_t j = 1; j < ch.size(); ++j)
      if (d.E.find(tree.atom(ch[j]).leaves) < 0) bad.push_back("child of '" + tree.path(k.atom) + "' missing from E");
  }
  // a B member strictly inside A \ A* lies inside one of the children A_j, j >= 2
  for (int id = 0; id < tree.size(); ++id) {
    if (tree.num_children(id) < 2) continue;
    Interval ta = tree.tilde(id);
    for (const Member& k : d.B.members()) {
      if (!ta.strictly_contains(k.set)) continue;
      bool inside = false;
      for (size_t j = 1; j < tree.atom(id).children.size(); ++j)
        inside = inside || tree.atom(tree.atom(id).children[j]).leaves.contains(k.set);
      if (!inside) bad.push_back("B member strictly inside tilde of '" + tree.path(id) + "' straddles children");
    }
  }
  // A_j strictly inside B forces A \ A* strictly inside B; A_j inside B \ B* forces the same for the tildes
  for (int a = 0; a < tree.size(); ++a) {
    if (tree.num_children(a) < 2) continue;
    for (int b = 0; b < tree.size(); ++b) {
      for (size_t j = 1; j < tree.atom(a).children.size(); ++j) {
        Interval aj = tree.atom(tree.atom(a).children[j]).leaves;
        if (tree.atom(b).leaves.strictly_contains(aj) && !tree.atom(b).leaves.strictly_contains(tree.tilde(a)))
          bad.push_back("tilde of '" + tree.path(a) + "' not strictly inside '" + tree.path(b) + "'");
        if (tree.num_children(b) >= 2 && tree.tilde(b).contains(aj) && !tree.tilde(b).contains(tree.tilde(a)))
          bad.push_back("tilde of '" + tree.path(a) + "' not inside tilde of '" + tree.path(b) + "'");
      }
    }
  }
  // C members determine their atom; B and C of one atom are its tilde and star, and they are disjoint
  for (const Member& l : d.C.members()) {
    int parent = tree.atom(l.atom).parent;
    if (!(tree.atom(tree.star(parent)).leaves == l.set)) bad.push_back("C member is not a star");
  }
  for (const Member& k : d.B.members()) {
    Interval s = tree.atom(tree.star(k.atom)).leaves;
    if (!s.disjoint(k.set) || s.hi != k.set.lo || k.set.hi != tree.atom(k.atom).leaves.hi)
      bad.push_back("star and tilde of '" + tree.path(k.atom) + "' do not split the atom");
  }
  // node-level partition of the non-root atoms into E and C
  for (int id = 1; id < tree.size(); ++id) {
    bool in_e = tree.atom(id).rank >= 1;
    bool in_c = tree.star(tree.atom(id).parent) == id;
    if (in_e == in_c) bad.push_back("atom '" + tree.path(id) + "' is not in exactly one of E, C");
  }
  return bad;
}

}  // namespace mtype
