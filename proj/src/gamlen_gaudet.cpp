#include "mtype/gamlen_gaudet.hpp"

#include "mtype/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace mtype {

using nlohmann::json;

namespace {

void check_domain(int n, const Q& delta) {
  if (n < 1) throw std::invalid_argument("Haar depth n must be at least 1");
  if (delta <= 0 || delta >= 1) throw std::invalid_argument("delta must lie in (0,1)");
}

Q floor_dyadic(double v, int bits) { return Q(static_cast<long>(std::floor(std::ldexp(v, bits))), 1) * pow2(-bits); }

int k_for(const Q& eps) {
  int k = 1;
  while (pow2(-k) >= eps) ++k;
  return k;
}

// Sorted union of member point sets (members assumed disjoint).
std::vector<Interval> union_of(const FiltrationTree& t, const std::vector<int>& atoms) {
  std::vector<Interval> out;
  for (int a : atoms) out.push_back(t.atom(a).leaves);
  std::sort(out.begin(), out.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  return out;
}

std::vector<char> leaf_mask(const FiltrationTree& t, const std::vector<int>& atoms) {
  std::vector<char> m(t.leaf_count(), 0);
  for (int a : atoms)
    for (int l = t.atom(a).leaves.lo; l < t.atom(a).leaves.hi; ++l) m[l] = 1;
  return m;
}

Q union_mass(const FiltrationTree& t, const std::vector<int>& atoms) {
  Q s = 0;
  for (const auto& iv : union_of(t, atoms)) s += t.mass(iv);
  return s;
}

int dyadic_index(const Dyadic& d) { return (1 << d.level) - 1 + d.pos; }

SimpleFunction sign_function(const GGSystem& sys, const std::vector<int>& atoms, std::string* failure) {
  const FiltrationTree& t = *sys.tree;
  SimpleFunction g(t, 1, 0);
  ProtoHaarParams prm{sys.params.eps_h, sys.params.k};
  for (int a : atoms) {
    try {
      ProtoHaarCertificate c = construct_protohaar(t, sys.e, a, prm);
      g += c.h;
    } catch (const std::invalid_argument& ex) {
      if (failure) *failure = "sign function on atom '" + t.path(a) + "': " + ex.what();
      return g;
    }
  }
  return g;
}

}  // namespace

std::string Dyadic::name() const {
  Q den = pow2(level);
  return "[" + to_string(Q(pos) / den) + "," + to_string(Q(pos + 1) / den) + ")";
}

std::vector<Dyadic> dyadics_up_to(int level) {
  std::vector<Dyadic> out;
  for (int l = 0; l <= level; ++l)
    for (int i = 0; i < (1 << l); ++i) out.push_back({l, i});
  return out;
}

GGParams conservative_gg_params(int n, const Q& delta) {
  check_domain(n, delta);
  double hat = to_double(delta * pow2(-n - 1));
  double best = 1.0;
  for (int q = 1; q <= n; ++q) {
    double v = 0.5 * (0.5 - std::pow(std::ldexp(1.0, -q) * (1 - hat), 1.0 / q));
    best = std::min(best, v);
  }
  GGParams p;
  p.eps_h = floor_dyadic(best, 30);
  p.eps_tilde = p.eps_h;
  p.k = k_for(p.eps_h);
  p.rule = "conservative";
  return p;
}

GGParams desk_gg_params(int n, const Q& delta) {
  check_domain(n, delta);
  GGParams p;
  p.eps_h = Q(2, 5);
  p.eps_tilde = Q(1, 2);
  p.k = 2;
  p.rule = "desk";
  return p;
}

GGBuild build_gg_system(const FiltrationTree& tree, int n, const Q& delta) {
  return build_gg_system(tree, n, delta, desk_gg_params(n, delta));
}

GGBuild build_gg_system(const FiltrationTree& tree, int n, const Q& delta, const GGParams& params) {
  check_domain(n, delta);
  validate_protohaar_params({params.eps_h, params.k});
  if (params.eps_tilde <= 0 || params.eps_tilde >= 1) throw std::invalid_argument("eps_tilde must lie in (0,1)");

  GGBuild out;
  GGSystem& sys = out.system;
  sys.tree = &tree;
  sys.e = error_collection(tree, false);
  sys.n = n;
  sys.delta = delta;
  sys.eps_d = delta * pow2(-n - 1);
  sys.params = params;
  sys.b.resize(n + 1);
  sys.g.resize(n);
  sys.b_mass.resize(n + 1);
  for (int l = 0; l <= n; ++l) {
    sys.b[l].resize(1 << l);
    sys.b_mass[l].resize(1 << l);
  }

  sys.condensation = condense(sys.e, params.eps_tilde, n, params.k);
  if (!sys.condensation.found) {
    out.reason = "condensation NotFound: " + sys.condensation.reason;
    return out;
  }
  sys.seed_atom = sys.e[sys.condensation.seed].atom;
  sys.b[0][0] = {sys.seed_atom};

  for (int l = 0; l < n; ++l) {
    const auto& fam = sys.condensation.families[l + 1];
    for (int pos = 0; pos < (1 << l); ++pos) {
      std::string failure;
      sys.g[l].push_back(sign_function(sys, sys.b[l][pos], &failure));
      if (!failure.empty()) {
        out.reason = failure;
        return out;
      }
      const SimpleFunction& g = sys.g[l][pos];
      for (int sgn : {1, -1}) {
        Q target = sgn;
        int level_set = 0;
        for (int leaf = 0; leaf < tree.leaf_count(); ++leaf) level_set += g.at(leaf) == target;
        std::vector<int>& dest = sys.b[l + 1][2 * pos + (sgn == 1 ? 0 : 1)];
        for (int m : fam) {
          const Interval& s = sys.e[m].set;
          bool inside = true;
          for (int leaf = s.lo; leaf < s.hi && inside; ++leaf) inside = g.at(leaf) == target;
          if (inside && s.size() < level_set) dest.push_back(sys.e[m].atom);
        }
        std::sort(dest.begin(), dest.end());
      }
    }
  }

  int s = 0;
  for (const auto& lv : sys.b)
    for (const auto& c : lv)
      for (int a : c) s = std::max(s, tree.atom(a).level);
  for (const auto& lv : sys.g)
    for (const auto& g : lv) s = std::max(s, g.measurable_level());
  sys.s = s;
  for (auto& lv : sys.g)
    for (auto& g : lv) g.set_level(s);
  for (int l = 0; l <= n; ++l)
    for (int pos = 0; pos < (1 << l); ++pos) sys.b_mass[l][pos] = union_mass(tree, sys.b[l][pos]);
  out.feasible = true;
  return out;
}

A8Report verify_A8(const GGSystem& sys) {
  const FiltrationTree& t = *sys.tree;
  A8Report rep;
  std::vector<Dyadic> js = sys.n >= 1 ? dyadics_up_to(sys.n - 1) : std::vector<Dyadic>{};
  // active[j][atom]: the j-th sign function has a nonzero difference on that atom at its level
  std::vector<std::vector<char>> active(js.size());
  parallel_for(static_cast<int>(js.size()), [&](int j) {
    std::vector<Vec> means = sys.fn(js[j]).atom_means();
    active[j].assign(t.size(), 0);
    active[j][0] = means[0][0] != 0;
    for (int id = 1; id < t.size(); ++id) active[j][id] = means[id][0] != means[t.atom(id).parent][0];
  });
  rep.owner.resize(t.depth() + 1);
  for (int m = 0; m <= t.depth(); ++m) {
    const auto& lv = t.level_atoms(m);
    rep.owner[m].assign(lv.size(), -1);
    for (size_t i = 0; i < lv.size(); ++i) {
      std::vector<int> hits;
      for (size_t j = 0; j < js.size(); ++j)
        if (active[j][lv[i]]) hits.push_back(static_cast<int>(j));
      if (hits.size() == 1) rep.owner[m][i] = hits[0];
      if (hits.size() > 1) {
        rep.ok = false;
        std::string w = "atom '" + t.path(lv[i]) + "' level " + std::to_string(m) + ":";
        for (int j : hits) w += " " + js[j].name();
        rep.violations.push_back(w);
      }
    }
  }
  return rep;
}

std::vector<HolderRow> verify_A9_holder(const GGSystem& sys, double p) {
  if (!(p > 1 && p <= 2)) throw std::invalid_argument("p must lie in (1,2]");
  const FiltrationTree& t = *sys.tree;
  std::vector<Dyadic> js = dyadics_up_to(sys.n - 1);
  std::vector<HolderRow> rows(js.size());
  parallel_for(static_cast<int>(js.size()), [&](int j) {
    std::vector<Vec> means = sys.fn(js[j]).atom_means();
    double s = std::pow(std::fabs(to_double(means[0][0])), p);
    for (int id = 1; id < t.size(); ++id) {
      double y = to_double(means[id][0] - means[t.atom(id).parent][0]);
      if (y != 0) s += std::pow(std::fabs(y), p) * to_double(t.atom(id).prob);
    }
    rows[j] = {js[j], s, std::pow(static_cast<double>(sys.big_k), 2 - p) * to_double(sys.b_mass[js[j].level][js[j].pos])};
  });
  return rows;
}

GGVerification verify_gg_system(const GGSystem& sys) {
  const FiltrationTree& t = *sys.tree;
  GGVerification v;
  const int n = sys.n;
  std::vector<Dyadic> all = dyadics_up_to(n);
  std::vector<Dyadic> js = dyadics_up_to(n - 1);
  const Interval a0 = t.atom(sys.seed_atom).leaves;
  const Q pa0 = t.atom(sys.seed_atom).prob;
  auto note = [&](const std::string& s) { v.notes.push_back(s); };

  std::vector<std::vector<char>> mask(all.size());
  parallel_for(static_cast<int>(all.size()), [&](int i) { mask[i] = leaf_mask(t, sys.coll(all[i])); });

  // 1
  v.cond[1] = sys.b[0][0] == std::vector<int>{sys.seed_atom};
  if (!v.cond[1]) note("A1: collection of [0,1) is not the seed alone");

  // 2
  int below_seed = 0;
  for (int i = 0; i < sys.e.size(); ++i) below_seed += a0.contains(sys.e[i].set);
  v.cond[2] = true;
  v.a2_strict = true;
  for (const Dyadic& d : all) {
    for (int a : sys.coll(d)) {
      bool ok = a != 0 && t.atom(a).rank >= 1 && a0.contains(t.atom(a).leaves);
      if (!ok) {
        v.cond[2] = false;
        note("A2: atom '" + t.path(a) + "' in " + d.name() + " is not an error atom inside the seed");
      }
    }
    if (static_cast<int>(sys.coll(d).size()) >= below_seed) v.a2_strict = false;
  }

  // 3
  v.cond[3] = true;
  for (const Dyadic& d : all) {
    auto u = union_of(t, sys.coll(d));
    for (size_t i = 1; i < u.size(); ++i)
      if (u[i].lo < u[i - 1].hi) {
        v.cond[3] = false;
        note("A3: overlapping members in " + d.name());
      }
  }

  // 4
  v.cond[4] = true;
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = 0; j < all.size(); ++j) {
      bool sub = true, meet = false;
      for (int l = 0; l < t.leaf_count(); ++l) {
        if (mask[i][l] && !mask[j][l]) sub = false;
        if (mask[i][l] && mask[j][l]) meet = true;
      }
      if (sub != all[j].contains(all[i]) || meet != all[i].meets(all[j])) {
        v.cond[4] = false;
        note("A4: inclusion pattern of " + all[i].name() + " and " + all[j].name() + " differs from the intervals");
      }
    }

  // 5
  v.cond[5] = true;
  for (const Dyadic& d : js) {
    const SimpleFunction& g = sys.fn(d);
    const auto& m = mask[dyadic_index(d)];
    const auto& mp = mask[dyadic_index({d.level + 1, 2 * d.pos})];
    const auto& mm = mask[dyadic_index({d.level + 1, 2 * d.pos + 1})];
    for (int l = 0; l < t.leaf_count(); ++l) {
      const Q& x = g.at(l);
      bool ok = x >= -1 && x <= 1 && (x == 0 || m[l]) && (!mp[l] || x == 1) && (!mm[l] || x == -1);
      if (!ok) {
        v.cond[5] = false;
        note("A5: sign function of " + d.name() + " fails at leaf " + std::to_string(l));
        break;
      }
    }
  }

  // 6, 7
  v.cond[6] = true;
  for (const Dyadic& d : all)
    for (int a : sys.coll(d)) v.cond[6] = v.cond[6] && t.atom(a).level <= sys.s;
  v.cond[7] = true;
  for (const Dyadic& d : js) v.cond[7] = v.cond[7] && sys.fn(d).measurable_level() <= sys.s;
  if (!v.cond[6] || !v.cond[7]) note("A6/A7: measurability level exceeded");

  // 8
  A8Report a8 = verify_A8(sys);
  v.cond[8] = a8.ok;
  for (const auto& s : a8.violations) note("A8: " + s);

  // 9
  v.variation.resize(js.size());
  parallel_for(static_cast<int>(js.size()), [&](int j) { v.variation[j] = variation_norm_exact(sys.fn(js[j])); });
  v.cond[9] = true;
  for (size_t j = 0; j < js.size(); ++j)
    if (v.variation[j] > sys.big_k * sys.b_mass[js[j].level][js[j].pos]) {
      v.cond[9] = false;
      note("A9: variation of " + js[j].name() + " exceeds K P(B_I*)");
    }

  // 10 and the two replayed bounds
  v.cond[10] = true;
  v.tail_ok = true;
  v.induction_ok = true;
  Q base = Q(1, 2) - sys.params.eps_h - sys.params.eps_tilde;
  if (base < 0) base = 0;
  for (const Dyadic& d : all) {
    Q m = sys.b_mass[d.level][d.pos];
    Q len = d.length();
    if (!((len - 2 * sys.eps_d) * pa0 <= m && m <= len * pa0)) {
      v.cond[10] = false;
      note("A10: mass of " + d.name() + " is " + to_string(m / pa0) + " of the seed");
    }
    if (d.level == n && m < (1 - sys.delta) * len * pa0) v.tail_ok = false;
    if (m < pa0 * qpow(base, d.level)) v.induction_ok = false;
  }
  return v;
}

TransferReport transfer_check(const GGSystem& sys, const std::vector<Vec>& x, double p, const NormedSpace& space) {
  const FiltrationTree& t = *sys.tree;
  if (!(p > 1 && p <= 2)) throw std::invalid_argument("p must lie in (1,2]");
  std::vector<Dyadic> js = dyadics_up_to(sys.n - 1);
  if (x.size() != js.size()) throw std::invalid_argument("need one coefficient per dyadic interval of length >= 2^-(n-1)");
  for (const Vec& v : x)
    if (static_cast<int>(v.size()) != space.dim) throw std::invalid_argument("coefficient dimension mismatch");
  if (sys.seed_atom < 0) throw std::invalid_argument("system was not built");

  TransferReport r;
  const int n = sys.n;
  const int cells = 1 << n;
  const int d = space.dim;
  const Q pa0 = t.atom(sys.seed_atom).prob;
  const Q scale = 1 / (1 - sys.delta);

  // transferred tuples on the pieces B_I* and the Haar tuples on the cells
  using Tuple = std::vector<int>;
  std::vector<Tuple> piece(cells), haar(cells);
  for (int c = 0; c < cells; ++c) {
    Dyadic cell{n, c};
    const auto& atoms = sys.coll(cell);
    auto u = union_of(t, atoms);
    piece[c].assign(js.size(), 0);
    haar[c].assign(js.size(), 0);
    for (size_t j = 0; j < js.size(); ++j) {
      if (js[j].contains(cell)) haar[c][j] = js[j].contains({n, c}) && Dyadic{js[j].level + 1, 2 * js[j].pos}.contains(cell) ? 1 : -1;
      const SimpleFunction& g = sys.fn(js[j]);
      bool first = true;
      Q val;
      for (const auto& iv : u)
        for (int l = iv.lo; l < iv.hi; ++l) {
          if (first) {
            val = g.at(l);
            first = false;
          } else if (g.at(l) != val) {
            r.pieces_constant = false;
          }
        }
      if (first || (val != 1 && val != -1 && val != 0)) r.pieces_constant = false;
      piece[c][j] = first ? 0 : static_cast<int>(val.get_num().get_si());
    }
    r.u_len.push_back(cell.length() - 2 * sys.eps_d);
    r.v_len.push_back(sys.b_mass[n][c] / pa0);
  }
  r.w_u = r.w_v = r.w_b = 0;
  for (int c = 0; c < cells; ++c) {
    r.w_u += r.u_len[c];
    r.w_v += r.v_len[c];
    r.w_b += sys.b_mass[n][c];
  }

  // push-forward measures: (tuple, mass) multisets
  std::map<Tuple, Q> mu_g, mu_h;
  for (int c = 0; c < cells; ++c) {
    mu_g[piece[c]] += scale * r.u_len[c];
    mu_h[haar[c]] += Dyadic{n, c}.length();
  }
  r.distribution_match = r.pieces_constant && mu_g == mu_h;
  r.labelled_match = r.pieces_constant && piece == haar;

  // numerical chain
  std::vector<double> xd(js.size() * d);
  double max_x = 0, weighted = 0;
  for (size_t j = 0; j < js.size(); ++j) {
    for (int c = 0; c < d; ++c) xd[j * d + c] = to_double(x[j][c]);
    double nx = space.norm(&xd[j * d]);
    max_x = std::max(max_x, nx);
    weighted += std::pow(nx, p) * to_double(js[j].length());
  }
  auto norm_p_of_tuple = [&](const Tuple& tp) {
    std::vector<double> v(d, 0.0);
    for (size_t j = 0; j < js.size(); ++j)
      for (int c = 0; c < d; ++c) v[c] += tp[j] * xd[j * d + c];
    return std::pow(space.norm(v.data()), p);
  };
  for (int c = 0; c < cells; ++c) {
    r.haar_norm_p += norm_p_of_tuple(haar[c]) * to_double(Dyadic{n, c}.length());
    r.wu_integral += norm_p_of_tuple(piece[c]) * to_double(scale * r.u_len[c]);
    r.wv_integral += norm_p_of_tuple(piece[c]) * to_double(r.v_len[c]);
  }

  SimpleFunction f(t, d, sys.s);
  for (size_t j = 0; j < js.size(); ++j) {
    const SimpleFunction& g = sys.fn(js[j]);
    for (int l = 0; l < t.leaf_count(); ++l)
      if (g.at(l) != 0)
        for (int c = 0; c < d; ++c) f.at(l, c) += g.at(l) * x[j][c];
  }
  const auto& lp = t.leaf_probs_d();
  std::vector<double> buf(d);
  for (int l = 0; l < t.leaf_count(); ++l) {
    for (int c = 0; c < d; ++c) buf[c] = to_double(f.at(l, c));
    r.f_norm_p += std::pow(space.norm(buf.data()), p) * lp[l];
  }
  Coefficients co = coeffs_from_function(f);
  r.diff_sum = std::pow(space.norm(co.mean), p) + diff_power_sum(t, co.y, p, space);

  double bound_split = 0;
  for (size_t j = 0; j < js.size(); ++j) {
    std::vector<Vec> means = sys.fn(js[j]).atom_means();
    double s = 0;
    for (int id = 1; id < t.size(); ++id) {
      double y = to_double(means[id][0] - means[t.atom(id).parent][0]);
      if (y != 0) s += std::pow(std::fabs(y), p) * to_double(t.atom(id).prob);
    }
    double nx = std::pow(space.norm(&xd[j * d]), p);
    r.diff_sum_split += nx * s;
    bound_split += nx * std::pow(static_cast<double>(sys.big_k), 2 - p) * to_double(sys.b_mass[js[j].level][js[j].pos]);
  }
  r.type_ratio_p = r.diff_sum > 0 ? r.f_norm_p / r.diff_sum : 1.0;
  double kt = std::pow(static_cast<double>(sys.big_k), 2 - p);
  double sc = to_double(scale);
  r.gap_term = n * to_double(sys.delta) * sc * max_x;
  r.bound = r.type_ratio_p * kt * weighted * sc + r.gap_term;

  const double tol = 1e-9;
  auto le = [&](double a, double b) { return a <= b + tol * std::max(1.0, std::fabs(b)); };
  double pa0d = to_double(pa0);
  r.chain_ok = std::fabs(r.haar_norm_p - r.wu_integral) <= tol * std::max(1.0, r.haar_norm_p) &&
               le(r.wu_integral, sc * r.wv_integral) && le(r.wv_integral * pa0d, r.f_norm_p) &&
               std::fabs(r.diff_sum - r.diff_sum_split) <= tol * std::max(1.0, r.diff_sum) &&
               le(r.diff_sum_split, bound_split) && le(bound_split, kt * weighted * pa0d) && le(r.haar_norm_p, r.bound);
  return r;
}

json gg_system_to_json(const GGSystem& sys) {
  const FiltrationTree& t = *sys.tree;
  json cols = json::array();
  for (const Dyadic& d : dyadics_up_to(sys.n)) {
    json atoms = json::array();
    for (int a : sys.coll(d)) atoms.push_back(t.path(a));
    cols.push_back({{"interval", d.name()}, {"level", d.level}, {"pos", d.pos}, {"atoms", atoms}});
  }
  return {{"n", sys.n},
          {"delta", to_string(sys.delta)},
          {"eps", to_string(sys.eps_d)},
          {"params",
           {{"eps_h", to_string(sys.params.eps_h)},
            {"eps_tilde", to_string(sys.params.eps_tilde)},
            {"k", sys.params.k},
            {"rule", sys.params.rule}}},
          {"seed", t.path(sys.seed_atom)},
          {"S", sys.s},
          {"K", sys.big_k},
          {"collections", cols},
          {"tree", tree_to_json(t)}};
}

GGSystem gg_system_from_json(const FiltrationTree& tree, const json& j) {
  GGSystem sys;
  sys.tree = &tree;
  sys.e = error_collection(tree, false);
  sys.n = j.at("n").get<int>();
  sys.delta = parse_rational(j.at("delta").get<std::string>());
  check_domain(sys.n, sys.delta);
  sys.eps_d = sys.delta * pow2(-sys.n - 1);
  const json& pj = j.at("params");
  sys.params.eps_h = parse_rational(pj.at("eps_h").get<std::string>());
  sys.params.eps_tilde = parse_rational(pj.at("eps_tilde").get<std::string>());
  sys.params.k = pj.at("k").get<int>();
  sys.params.rule = pj.value("rule", std::string("custom"));
  validate_protohaar_params({sys.params.eps_h, sys.params.k});
  sys.seed_atom = tree.find_path(j.at("seed").get<std::string>());
  sys.big_k = j.value("K", 6);
  sys.b.resize(sys.n + 1);
  sys.b_mass.resize(sys.n + 1);
  for (int l = 0; l <= sys.n; ++l) {
    sys.b[l].resize(1 << l);
    sys.b_mass[l].resize(1 << l);
  }
  for (const json& c : j.at("collections")) {
    int l = c.at("level").get<int>(), pos = c.at("pos").get<int>();
    if (l < 0 || l > sys.n || pos < 0 || pos >= (1 << l)) throw std::invalid_argument("collection index out of range");
    for (const json& a : c.at("atoms")) sys.b[l][pos].push_back(tree.find_path(a.get<std::string>()));
    std::sort(sys.b[l][pos].begin(), sys.b[l][pos].end());
    sys.b_mass[l][pos] = union_mass(tree, sys.b[l][pos]);
  }
  sys.g.resize(sys.n);
  int s = 0;
  for (const auto& lv : sys.b)
    for (const auto& c : lv)
      for (int a : c) s = std::max(s, tree.atom(a).level);
  for (int l = 0; l < sys.n; ++l)
    for (int pos = 0; pos < (1 << l); ++pos) {
      std::string failure;
      sys.g[l].push_back(sign_function(sys, sys.b[l][pos], &failure));
      if (!failure.empty()) throw std::invalid_argument(failure);
      s = std::max(s, sys.g[l].back().measurable_level());
    }
  sys.s = s;
  for (auto& lv : sys.g)
    for (auto& g : lv) g.set_level(s);
  return sys;
}

}  // namespace mtype
