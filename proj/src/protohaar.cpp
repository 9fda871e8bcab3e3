#include "mtype/protohaar.hpp"

#include <algorithm>
#include <stdexcept>

namespace mtype {

ProtoHaarParams default_protohaar_params(int haar_depth) {
  ProtoHaarParams p;
  p.eps = pow2(-(haar_depth + 3));
  p.k = haar_depth + 3 + 1;
  return p;
}

void validate_protohaar_params(const ProtoHaarParams& prm) {
  if (prm.eps <= 0 || prm.eps >= Q(1, 2))
    throw std::invalid_argument("eps must lie in (0,1/2), got " + to_string(prm.eps));
  if (prm.k < 1 || prm.eps * pow2(prm.k) <= 1)
    throw std::invalid_argument("k must exceed -log2(eps); k=" + std::to_string(prm.k) + " eps=" + to_string(prm.eps));
}

LarconResult check_larcon(const FiltrationTree& tree, const AtomCollection& e, int atom, const ProtoHaarParams& prm) {
  validate_protohaar_params(prm);
  const Interval a = tree.atom(atom).leaves;
  Q covered = e.mass(e.generation(a, prm.k));
  LarconResult r;
  r.witness = covered / tree.mass(a);
  r.holds = r.witness > 1 - prm.eps / 2;
  return r;
}

GreedyState greedy_start(const FiltrationTree& tree, int atom) {
  GreedyState st;
  st.atom = atom;
  st.pa = tree.atom(atom).prob;
  st.prior = 0;
  st.y = tree.atom(atom).leaves;
  st.level = tree.atom(atom).level;
  return st;
}

bool balance_condition(const GreedyState& st) {
  Q half = st.pa / 2;
  return st.prior <= half && half <= st.prior + st.steps.back().y_mass;
}

GreedyStep greedy_step(const FiltrationTree& tree, const AtomCollection& e, GreedyState& st, const ProtoHaarParams& prm) {
  if (st.done) throw std::logic_error("greedy run already finished");
  if (!st.steps.empty() && !balance_condition(st))
    throw std::logic_error("balance condition violated before step " + std::to_string(st.steps.size() + 1));
  GreedyStep s;
  s.y_prev = st.y;
  s.level_prev = st.level;
  s.g1 = e.g1(st.y);
  std::sort(s.g1.begin(), s.g1.end(), [&](int a, int b) { return e.precedes(a, b); });
  Q half = st.pa / 2;
  Q g_mass = e.mass(s.g1);
  if (st.prior + g_mass > half) {
    // first member whose inclusion reaches half of P(A)
    Q cum = 0;
    for (size_t i = 0; i < s.g1.size(); ++i) {
      Q m = e.mass(s.g1[i]);
      if (st.prior + cum + m >= half) {
        s.next_y = s.g1[i];
        s.u.assign(s.g1.begin(), s.g1.begin() + static_cast<long>(i));
        break;
      }
      cum += m;
    }
    s.u_mass = cum;
    s.y_mass = e.mass(s.next_y);
    s.level_next = tree.atom(e[s.next_y].atom).level;
    st.prior += cum;
    st.y = e[s.next_y].set;
    st.level = s.level_next;
  } else {
    // shortest greedy prefix whose mass exceeds the total minus eps/2 P(A)
    Q threshold = g_mass - prm.eps / 2 * st.pa;
    Q cum = 0;
    size_t len = 0;
    while (!(cum > threshold) && len < s.g1.size()) cum += e.mass(s.g1[len++]);
    s.u.assign(s.g1.begin(), s.g1.begin() + static_cast<long>(len));
    s.truncated = true;
    s.u_mass = cum;
    s.y_mass = tree.mass(st.y) - cum;
    s.level_next = s.level_prev;
    for (int m : s.u) s.level_next = std::max(s.level_next, tree.atom(e[m].atom).level);
    st.prior += cum;
    st.done = true;
  }
  st.steps.push_back(s);
  return s;
}

namespace {

std::vector<Interval> runs(const std::vector<signed char>& lab, signed char v) {
  std::vector<Interval> out;
  int n = static_cast<int>(lab.size());
  for (int i = 0; i < n;) {
    if (lab[i] != v) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && lab[j] == v) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

constexpr signed char kOutside = 0, kPlus = 1, kMinus = -1, kOpen = 3, kNeutral = 2;

}  // namespace

ProtoHaarCertificate construct_protohaar(const FiltrationTree& tree, const AtomCollection& e, int atom,
                                         const ProtoHaarParams& prm) {
  LarconResult lc = check_larcon(tree, e, atom, prm);
  if (!lc.holds)
    throw std::invalid_argument("covering hypothesis fails at atom '" + tree.path(atom) + "': generation mass ratio " +
                                to_string(lc.witness) + " <= 1 - eps/2");
  ProtoHaarCertificate c;
  c.atom = atom;
  c.params = prm;
  c.pa = tree.atom(atom).prob;
  const Interval a = tree.atom(atom).leaves;

  GreedyState st = greedy_start(tree, atom);
  bool chain_ok = true;
  for (int m = 0; m < prm.k && !st.done; ++m) {
    greedy_step(tree, e, st, prm);
    if (!st.done) {
      chain_ok = chain_ok && balance_condition(st);
      if (st.steps.back().y_mass > c.pa * pow2(-(m + 1))) {
        chain_ok = false;
        c.notes.push_back("Y_" + std::to_string(m + 1) + " heavier than 2^-m P(A)");
      }
    }
  }
  c.steps = st.steps;
  c.tau = static_cast<int>(st.steps.size());

  std::vector<signed char> lab(tree.leaf_count(), kOutside);
  for (int l = a.lo; l < a.hi; ++l) lab[l] = kOpen;
  for (const GreedyStep& s : c.steps) {
    for (int m : s.u) {
      c.plus_members.push_back(m);
      for (int l = e[m].set.lo; l < e[m].set.hi; ++l) lab[l] = kPlus;
    }
    if (!s.truncated) {
      const Interval y = e[s.next_y].set;
      for (int l = s.y_prev.lo; l < s.y_prev.hi; ++l)
        if (lab[l] == kOpen && !y.contains_leaf(l)) lab[l] = kMinus;
    }
  }
  for (int l = a.lo; l < a.hi; ++l)
    if (lab[l] == kOpen) lab[l] = kNeutral;
  c.minus_set = runs(lab, kMinus);
  c.neutral_set = runs(lab, kNeutral);

  Q p_plus = 0, p_minus = 0, p_neutral = 0;
  for (int l = a.lo; l < a.hi; ++l) {
    if (lab[l] == kPlus) p_plus += tree.leaf_prob(l);
    if (lab[l] == kMinus) p_minus += tree.leaf_prob(l);
    if (lab[l] == kNeutral) p_neutral += tree.leaf_prob(l);
  }
  c.c0 = p_neutral > 0 ? Q((p_minus - p_plus) / p_neutral) : Q(0);
  c.lambda1 = (1 + c.c0) / 2;
  c.lambda2 = (1 - c.c0) / 2;

  SimpleFunction h(tree, 1, tree.depth());
  for (int l = a.lo; l < a.hi; ++l) h.at(l) = lab[l] == kPlus ? Q(1) : lab[l] == kMinus ? Q(-1) : c.c0;
  c.t = h.measurable_level();
  h.set_level(c.t);
  c.h = std::move(h);

  // exhaustive checks straight from the function values
  const Q half = c.pa / 2;
  c.max_abs = 0;
  c.support_ok = true;
  c.off_one_mass = 0;
  c.plus_mass = 0;
  c.minus_mass = 0;
  for (int l = 0; l < tree.leaf_count(); ++l) {
    const Q& v = c.h.at(l);
    if (qabs(v) > c.max_abs) c.max_abs = qabs(v);
    bool in_a = a.contains_leaf(l);
    if (!in_a && v != 0) c.support_ok = false;
    if (in_a && qabs(v) != 1) c.off_one_mass += tree.leaf_prob(l);
    if (v == 1) c.plus_mass += tree.leaf_prob(l);
    if (v == -1) c.minus_mass += tree.leaf_prob(l);
  }
  c.mean = c.h.integral()[0];
  c.variation = variation_norm_exact(c.h);
  c.h1 = c.max_abs <= 1;
  c.h2 = c.support_ok;
  c.h3 = c.t <= tree.depth() && cond_expectation(c.h, c.t) == c.h;
  c.h4 = c.mean == 0;
  c.h5 = c.off_one_mass <= prm.eps * c.pa;
  Q lo = (Q(1, 2) - prm.eps) * c.pa;
  c.h6 = lo <= c.plus_mass && c.plus_mass <= half && lo <= c.minus_mass && c.minus_mass <= half;
  c.h7 = c.variation <= 6 * c.pa;

  // final bounds: the neutral set is small and the plus region is just under half
  Q plus_total = 0;
  for (const GreedyStep& s : c.steps) plus_total += s.u_mass;
  bool final_ok = p_neutral <= prm.eps * c.pa && lo <= plus_total && plus_total <= half && plus_total == p_plus;
  if (!final_ok) c.notes.push_back("final mass bounds fail");
  c.balance_ok = chain_ok && final_ok;

  // for every block j and level p in range, the plus members of level >= p together with
  // what is left of Y_{j-1} form one atom of level p-1
  c.atoms_ok = true;
  for (size_t j = 0; j < c.steps.size(); ++j) {
    const GreedyStep& s = c.steps[j];
    for (int p = s.level_prev + 1; p <= s.level_next; ++p) {
      std::vector<char> drop(s.y_prev.size(), 0);
      for (int m : s.u)
        if (tree.atom(e[m].atom).level < p)
          for (int l = e[m].set.lo; l < e[m].set.hi; ++l) drop[l - s.y_prev.lo] = 1;
      int first = -1, count = 0;
      bool contiguous = true;
      for (int l = s.y_prev.lo; l < s.y_prev.hi; ++l) {
        if (drop[l - s.y_prev.lo]) continue;
        if (first < 0) first = l;
        if (l != first + count) contiguous = false;
        ++count;
      }
      bool ok = first >= 0 && contiguous;
      if (ok) {
        int at = tree.ancestor_at(first, p - 1);
        ok = tree.atom(at).leaves == Interval{first, first + count};
      }
      if (!ok) {
        c.atoms_ok = false;
        c.notes.push_back("block " + std::to_string(j + 1) + " level " + std::to_string(p) + " does not form an atom");
      }
    }
  }
  return c;
}

MonotoneReport verify_monotone_projections(const ProtoHaarCertificate& cert, const AtomCollection& e) {
  MonotoneReport r;
  const FiltrationTree& tree = cert.h.tree();
  std::vector<Vec> means = cert.h.atom_means();
  for (size_t j = 0; j < cert.steps.size(); ++j) {
    const GreedyStep& s = cert.steps[j];
    for (int m : s.u) {
      int node = e[m].atom;
      int p = tree.atom(node).level;
      // ancestors of the stratum member at levels level_prev+1 .. p-1
      std::vector<int> chain(p + 1, -1);
      for (int cur = node; cur >= 0; cur = tree.atom(cur).parent) chain[tree.atom(cur).level] = cur;
      ++r.strata_checked;
      for (int lvl = s.level_prev + 1; lvl + 1 <= p - 1; ++lvl) {
        if (means[chain[lvl]][0] < means[chain[lvl + 1]][0]) {
          r.ok = false;
          r.violation = "block " + std::to_string(j + 1) + ", member '" + tree.path(node) + "': projection rises from level " +
                        std::to_string(lvl) + " to " + std::to_string(lvl + 1);
          return r;
        }
      }
    }
  }
  return r;
}

nlohmann::json certificate_to_json(const ProtoHaarCertificate& c, const AtomCollection& e) {
  const FiltrationTree& t = c.h.tree();
  auto ranges = [&](const std::vector<Interval>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const Interval& iv : v) {
      // express each run through the atoms tiling it at the deepest level
      for (int l = iv.lo; l < iv.hi;) {
        int best = t.leaf_atom(l);
        for (int cur = best; cur >= 0; cur = t.atom(cur).parent) {
          const Interval& lv = t.atom(cur).leaves;
          if (lv.lo == l && lv.hi <= iv.hi) best = cur;
          else if (lv.lo != l || lv.hi > iv.hi) break;
        }
        a.push_back(t.path(best));
        l = t.atom(best).leaves.hi;
      }
    }
    return a;
  };
  nlohmann::json j;
  j["atom"] = t.path(c.atom);
  j["eps"] = to_string(c.params.eps);
  j["k"] = c.params.k;
  j["tau"] = c.tau;
  j["t"] = c.t;
  j["c0"] = to_string(c.c0);
  j["lambda1"] = to_string(c.lambda1);
  j["lambda2"] = to_string(c.lambda2);
  nlohmann::json plus = nlohmann::json::array();
  for (int m : c.plus_members) plus.push_back(t.path(e[m].atom));
  j["plus_set"] = plus;
  j["minus_set"] = ranges(c.minus_set);
  j["neutral_set"] = ranges(c.neutral_set);
  j["bounds"] = {
      {"H1_max_abs", to_string(c.max_abs)},       {"H1", c.h1},
      {"H2_support_in_atom", c.support_ok},       {"H2", c.h2},
      {"H3_level", c.t},                          {"H3", c.h3},
      {"H4_mean", to_string(c.mean)},             {"H4", c.h4},
      {"H5_off_one_mass", to_string(c.off_one_mass)}, {"H5", c.h5},
      {"H6_plus_mass", to_string(c.plus_mass)},   {"H6_minus_mass", to_string(c.minus_mass)}, {"H6", c.h6},
      {"H7_variation", to_string(c.variation)},   {"H7_limit", to_string(6 * c.pa)}, {"H7", c.h7},
  };
  j["atoms_ok"] = c.atoms_ok;
  j["balance_ok"] = c.balance_ok;
  j["notes"] = c.notes;
  return j;
}

}  // namespace mtype
