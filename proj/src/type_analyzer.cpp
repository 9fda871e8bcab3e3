#include "mtype/type_analyzer.hpp"

#include "mtype/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mtype {

namespace {

void check_p(double p) {
  if (!(p > 1 && p <= 2)) throw std::invalid_argument("p must lie in (1,2]");
}

// Per-tree data reused by every probe evaluation.
struct ProbeContext {
  const FiltrationTree* t;
  NormedSpace space;
  double p;
  std::vector<double> prob;  // by atom id
  std::vector<double> y, val;

  ProbeContext(const FiltrationTree& tree, const NormedSpace& s, double pp) : t(&tree), space(s), p(pp) {
    prob.resize(tree.size());
    for (int id = 0; id < tree.size(); ++id) prob[id] = to_double(tree.atom(id).prob);
    y.resize(static_cast<size_t>(tree.size()) * s.dim);
    val.resize(y.size());
  }

  double ratio(const std::vector<double>& mean, const std::vector<double>& x) {
    const int d = space.dim;
    double den = std::pow(space.norm(mean.data()), p);
    for (int c = 0; c < d; ++c) val[c] = mean[c];
    for (int id = 1; id < t->size(); ++id) {
      const auto& a = t->atom(id);
      const auto& sib = t->atom(a.parent).children;
      int r = a.rank;
      double* yy = &y[static_cast<size_t>(id) * d];
      for (int c = 0; c < d; ++c) {
        double v = r >= 1 ? x[static_cast<size_t>(id) * d + c] : 0.0;
        if (r + 1 < static_cast<int>(sib.size())) {
          int nx = sib[r + 1];
          v -= x[static_cast<size_t>(nx) * d + c] * prob[nx] / prob[id];
        }
        yy[c] = v;
        val[static_cast<size_t>(id) * d + c] = val[static_cast<size_t>(a.parent) * d + c] + v;
      }
      den += std::pow(space.norm(yy), p) * prob[id];
    }
    double num = 0;
    for (int l = 0; l < t->leaf_count(); ++l) {
      int id = t->leaf_atom(l);
      num += std::pow(space.norm(&val[static_cast<size_t>(id) * d]), p) * prob[id];
    }
    return den > 0 ? num / den : 0.0;
  }
};

// Leaf values of sum over sets of v_i 1_{set_i}, via difference arrays.
std::vector<double> sum_of_indicators(int leaves, int dim, const std::vector<Interval>& sets,
                                      const std::vector<std::vector<double>>& v) {
  std::vector<double> diff(static_cast<size_t>(leaves + 1) * dim, 0.0);
  for (size_t i = 0; i < sets.size(); ++i)
    for (int c = 0; c < dim; ++c) {
      diff[static_cast<size_t>(sets[i].lo) * dim + c] += v[i][c];
      diff[static_cast<size_t>(sets[i].hi) * dim + c] -= v[i][c];
    }
  std::vector<double> out(static_cast<size_t>(leaves) * dim);
  std::vector<double> run(dim, 0.0);
  for (int l = 0; l < leaves; ++l)
    for (int c = 0; c < dim; ++c) {
      run[c] += diff[static_cast<size_t>(l) * dim + c];
      out[static_cast<size_t>(l) * dim + c] = run[c];
    }
  return out;
}

double lp_power_of_leaf_values(const FiltrationTree& t, const std::vector<double>& vals, int dim, double p,
                               const NormedSpace& space, const Interval& within) {
  const auto& pr = t.leaf_probs_d();
  double s = 0;
  for (int l = within.lo; l < within.hi; ++l) s += std::pow(space.norm(&vals[static_cast<size_t>(l) * dim]), p) * pr[l];
  return s;
}

std::vector<double> to_doubles(const Vec& v) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

}  // namespace

double mt_surrogate(double p) {
  check_p(p);
  return 2 * std::pow(p / (p - 1), 1 / p);
}

double cp_constant(double p) { return 1 / (1 - std::pow(2.0, -1 / p)); }

double tp_bound(double p, double carleson) {
  double mt = mt_surrogate(p);
  return (2 + cp_constant(p)) * std::pow(2.0, 2 - 1 / p) * std::pow(1 + std::pow(mt, p), 1 / p) *
         std::pow(4 * carleson + 1, 1 - 1 / p);
}

double ctilde_bound(double p, double carleson) { return tp_bound(p, carleson) / 2; }

double probe_ratio(const FiltrationTree& tree, const NormedSpace& space, double p, const std::vector<double>& mean,
                   const std::vector<double>& x) {
  ProbeContext ctx(tree, space, p);
  return ctx.ratio(mean, x);
}

TypeEstimate empirical_type_constant(const FiltrationTree& tree, const NormedSpace& space, double p, int budget,
                                     std::uint64_t seed, const TypeEstimate* warm, const FiltrationTree* warm_tree) {
  check_p(p);
  if (budget < 1) throw std::invalid_argument("probe budget must be positive");
  TypeEstimate est;
  est.p = p;
  est.space = space;
  est.seed = seed;
  est.constant = 0;
  const int d = space.dim;
  ProbeContext ctx(tree, space, p);
  std::mt19937_64 rng(seed);
  std::vector<int> err;
  for (int id = 1; id < tree.size(); ++id)
    if (tree.atom(id).rank >= 1) err.push_back(id);

  std::vector<double> best_mean(d, 0.0), best_x(static_cast<size_t>(tree.size()) * d, 0.0);
  auto record = [&](const std::string& kind, double r, const std::vector<double>& mean, const std::vector<double>& x) {
    Probe pr{est.probes++, kind, r};
    est.inventory.push_back(pr);
    if (r > est.constant) {
      est.constant = r;
      est.max_probe = pr.id;
      est.max_kind = kind;
      best_mean = mean;
      best_x = x;
    }
    est.running_max.push_back(est.constant);
  };

  std::vector<double> mean(d, 0.0), x(static_cast<size_t>(tree.size()) * d, 0.0);
  mean[0] = 1;
  record("constant", ctx.ratio(mean, x), mean, x);
  mean[0] = 0;

  int basis = std::min<int>(static_cast<int>(err.size()), (budget - 1) / 2);
  for (int i = 0; i < basis; ++i) {
    int id = err[i];
    x[static_cast<size_t>(id) * d + (i % d)] = 1;
    record("basis", ctx.ratio(mean, x), mean, x);
    x[static_cast<size_t>(id) * d + (i % d)] = 0;
  }

  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> variant(0, 2);
  std::uniform_int_distribution<int> level_pick(1, std::max(1, tree.depth()));
  for (int i = 1 + basis; i < budget; ++i) {
    std::fill(x.begin(), x.end(), 0.0);
    int v = variant(rng);
    int lvl = level_pick(rng);
    for (int id : err) {
      if (v == 2 && tree.atom(id).level != lvl) continue;
      double w = v == 1 ? std::pow(to_double(tree.atom(id).prob), -1 / p) : 1.0;
      for (int c = 0; c < d; ++c) x[static_cast<size_t>(id) * d + c] = (coin(rng) ? w : -w);
    }
    for (int c = 0; c < d; ++c) mean[c] = v == 0 ? (coin(rng) ? 1.0 : -1.0) : 0.0;
    record("rademacher", ctx.ratio(mean, x), mean, x);
  }

  if (warm && warm_tree && warm->space.dim == d && !warm->best_x.empty()) {
    std::vector<double> wx(static_cast<size_t>(tree.size()) * d, 0.0);
    bool prefix = true;
    for (int id = 1; id < warm_tree->size() && prefix; ++id) {
      int here = -1;
      try {
        here = tree.find_path(warm_tree->path(id));
      } catch (const TreeError&) {
        prefix = false;
        break;
      }
      prefix = tree.atom(here).prob == warm_tree->atom(id).prob && tree.atom(here).rank == warm_tree->atom(id).rank;
      for (int c = 0; c < d && prefix; ++c)
        wx[static_cast<size_t>(here) * d + c] = warm->best_x[static_cast<size_t>(id) * d + c];
    }
    if (prefix) record("warm", ctx.ratio(warm->best_mean, wx), warm->best_mean, wx);
  }

  // coordinate ascent from the best probe so far
  if (budget > 1 && !err.empty()) {
    std::vector<double> cm = best_mean, cx = best_x;
    double cur = est.constant, step = 0.5;
    std::uniform_int_distribution<size_t> pick(0, err.size() * d - 1);
    for (int it = 0; it < 200; ++it) {
      size_t k = pick(rng);
      size_t slot = static_cast<size_t>(err[k / d]) * d + k % d;
      double scale = std::max(std::fabs(cx[slot]), 1e-3);
      double orig = cx[slot], best = cur, best_val = orig;
      for (double s : {step, -step}) {
        cx[slot] = orig + s * scale;
        double r = ctx.ratio(cm, cx);
        if (r > best) {
          best = r;
          best_val = cx[slot];
        }
      }
      cx[slot] = best_val;
      if (best > cur) {
        cur = best;
        step = std::min(step * 1.5, 4.0);
      } else {
        step = std::max(step * 0.8, 1e-4);
      }
      record("ascent", cur, cm, cx);
    }
  }
  est.best_mean = best_mean;
  est.best_x = best_x;
  est.constant = std::pow(est.constant, 1 / p);
  for (double& r : est.running_max) r = std::pow(r, 1 / p);
  for (auto& pr : est.inventory) pr.ratio = std::pow(pr.ratio, 1 / p);
  return est;
}

GBDecomposition gb_decompose(const SimpleFunction& f) {
  const FiltrationTree& t = f.tree();
  const int d = f.dim();
  GBDecomposition gb;
  gb.coeffs = coeffs_from_function(f);
  const Coefficients& co = gb.coeffs;
  gb.g = SimpleFunction::constant(t, co.mean);
  gb.b = SimpleFunction(t, d, t.depth());
  gb.g.set_level(t.depth());
  gb.z.assign(t.size(), Vec{});
  for (int id = 1; id < t.size(); ++id) {
    const auto& a = t.atom(id);
    if (a.rank >= 1)
      gb.g.add_on(a.leaves, 1, co.y[id]);
    else
      gb.b.add_on(a.leaves, 1, co.y[id]);
  }
  for (int id = 0; id < t.size(); ++id) {
    if (t.num_children(id) < 2) continue;
    int s = t.star(id);
    Q tilde = t.atom(id).prob - t.atom(s).prob;
    Vec z = co.y[s];
    for (Q& v : z) v /= tilde;
    gb.z[id] = z;
  }
  gb.exact = gb.g + gb.b == f;

  MartingaleDecomposition md = martingale_diffs(f);
  gb.diffs_match = true;
  for (int n = 1; n <= t.depth() && gb.diffs_match; ++n)
    for (int l = 0; l < t.leaf_count() && gb.diffs_match; ++l) {
      const Vec& y = co.y[t.ancestor_at(l, n)];
      // differences past the function's level are zero
      bool have = n <= static_cast<int>(md.diffs.size());
      for (int c = 0; c < d; ++c)
        if ((have ? md.diffs[n - 1].at(l, c) : Q(0)) != y[c]) gb.diffs_match = false;
    }
  return gb;
}

std::vector<std::string> gb_holder_check(const GBDecomposition& gb, double p, const NormedSpace& space) {
  check_p(p);
  const FiltrationTree& t = gb.g.tree();
  std::vector<std::string> out;
  for (int id = 0; id < t.size(); ++id) {
    if (gb.z[id].empty()) continue;
    int s = t.star(id);
    double ps = to_double(t.atom(s).prob);
    double pt = to_double(t.atom(id).prob - t.atom(s).prob);
    double lhs = std::pow(space.norm(gb.z[id]) * ps, p) * pt;
    double rhs = 0;
    for (int c : t.atom(id).children)
      if (c != s) rhs += std::pow(space.norm(gb.coeffs.y[c]), p) * to_double(t.atom(c).prob);
    if (lhs > rhs + 1e-9) out.push_back("atom '" + t.path(id) + "': " + std::to_string(lhs) + " > " + std::to_string(rhs));
  }
  return out;
}

ConscolReport verify_conscol(const AtomCollection& r, const std::vector<Vec>& x, double p, const NormedSpace& space) {
  check_p(p);
  if (static_cast<int>(x.size()) != r.size()) throw std::invalid_argument("need one coefficient per member");
  if (!r.nested()) throw std::invalid_argument("collection is not nested");
  const FiltrationTree& t = r.tree();
  const int d = space.dim;
  ConscolReport rep;
  std::vector<Interval> sets;
  std::vector<std::vector<double>> xv;
  double mass_sum = 0;
  for (int i = 0; i < r.size(); ++i) {
    sets.push_back(r[i].set);
    xv.push_back(to_doubles(x[i]));
    mass_sum += std::pow(space.norm(xv.back().data()), p) * to_double(r.mass(i));
  }
  std::vector<double> vals = sum_of_indicators(t.leaf_count(), d, sets, xv);
  rep.lhs = std::pow(lp_power_of_leaf_values(t, vals, d, p, space, {0, t.leaf_count()}), 1 / p);
  if (r.empty()) {
    rep.colors_ok = true;
    return rep;
  }
  Disjointification dj = disjointify(r);
  rep.m = dj.m;
  rep.colors_ok = dj.ok();
  rep.rhs = cp_constant(p) * std::pow(static_cast<double>(dj.m), 1 - 1 / p) * std::pow(mass_sum, 1 / p);

  // each family through generations with a_k = 2^(-k/p)
  for (const auto& fam_idx : dj.families()) {
    if (fam_idx.empty()) continue;
    AtomCollection fam = r.subset(fam_idx);
    std::vector<int> gen(fam.size(), 0);
    int depth = 0;
    for (int i = 0; i < fam.size(); ++i) {
      int par = fam.forest_parent(i);
      gen[i] = par < 0 ? 0 : gen[par] + 1;
      depth = std::max(depth, gen[i] + 1);
    }
    std::vector<SimpleFunction> gs(depth, SimpleFunction(t, d, t.depth()));
    std::vector<PointSet> ds(depth);
    double fam_mass = 0;
    for (int i = 0; i < fam.size(); ++i) {
      int orig = r.find(fam[i].set);
      gs[gen[i]].add_on(fam[i].set, 1, x[orig]);
      ds[gen[i]].push_back(fam[i].set);
      fam_mass += std::pow(space.norm(xv[orig].data()), p) * to_double(fam.mass(i));
    }
    std::vector<double> a(depth);
    for (int k = 0; k < depth; ++k) a[k] = std::pow(2.0, -k / p);
    EstddResult er = estdd_bound(gs, ds, a, p, space);
    double fam_rhs = cp_constant(p) * std::pow(fam_mass, 1 / p);
    if (!er.hypotheses_ok || er.lhs > er.rhs + 1e-9 || er.lhs > fam_rhs + 1e-9) {
      rep.families_ok = false;
      rep.notes.push_back(er.hypotheses_ok ? "family estimate exceeded" : er.violation);
    }
  }
  return rep;
}

SingleColReport verify_singlecol_estcolb(const FiltrationTree& tree, const std::vector<Vec>& z, double p,
                                         const NormedSpace& space) {
  check_p(p);
  if (static_cast<int>(z.size()) != tree.size()) throw std::invalid_argument("need z indexed by atom id");
  const int d = space.dim;
  SingleColReport rep;
  AtomCollection e = error_collection(tree, false);
  if (e.empty()) return rep;
  double carl = to_double(carleson_constant(e));
  double mt = mt_surrogate(p);
  double single_c = std::pow(2.0, 1 - 1 / p) * std::pow(1 + std::pow(mt, p), 1 / p);

  DerivedCollections dc = derive_collections(tree);
  const AtomCollection& bc = dc.B;
  auto zv = [&](int owner) {
    std::vector<double> v(d, 0.0);
    if (!z[owner].empty())
      for (int c = 0; c < d; ++c) v[c] = to_double(z[owner][c]);
    return v;
  };
  auto phi_p = [&](int owner) {
    double ps = to_double(tree.atom(tree.star(owner)).prob);
    double pt = to_double(tree.atom(owner).prob) - ps;
    return std::pow(pt, p) * ps + std::pow(ps, p) * pt;
  };
  auto star_set = [&](int owner) { return tree.atom(tree.star(owner)).leaves; };
  auto tilde_mass = [&](int owner) { return to_double(tree.atom(owner).prob - tree.atom(tree.star(owner)).prob); };

  // the full B-part estimate
  std::vector<Interval> sets;
  std::vector<std::vector<double>> vals;
  double rhs_sum = 0;
  for (int i = 0; i < bc.size(); ++i) {
    int owner = bc[i].atom;
    auto v = zv(owner);
    rhs_sum += std::pow(space.norm(v.data()), p) * phi_p(owner);
    for (double& c : v) c *= tilde_mass(owner);
    sets.push_back(star_set(owner));
    vals.push_back(v);
  }
  std::vector<double> lv = sum_of_indicators(tree.leaf_count(), d, sets, vals);
  rep.estcolb_lhs = std::pow(lp_power_of_leaf_values(tree, lv, d, p, space, {0, tree.leaf_count()}), 1 / p);
  rep.estcolb_rhs = ctilde_bound(p, carl) * std::pow(rhs_sum, 1 / p);

  // single generation estimates inside each family
  if (bc.empty()) return rep;
  Disjointification dj = disjointify(bc);
  for (const auto& fam_idx : dj.families()) {
    AtomCollection fam = bc.subset(fam_idx);
    std::vector<Interval> roots{{0, tree.leaf_count()}};
    for (int i = 0; i < fam.size(); ++i) roots.push_back(fam[i].set);
    for (const Interval& a : roots) {
      std::vector<int> kids = fam.g1(a);
      if (kids.empty()) continue;
      std::vector<Interval> s;
      std::vector<std::vector<double>> v;
      double rs = 0;
      for (int k : kids) {
        int owner = fam[k].atom;
        auto zz = zv(owner);
        rs += std::pow(space.norm(zz.data()), p) * phi_p(owner);
        for (double& c : zz) c *= tilde_mass(owner);
        Interval st = star_set(owner);
        s.push_back({st.lo - a.lo, st.hi - a.lo});
        v.push_back(zz);
      }
      std::vector<double> loc = sum_of_indicators(a.size(), d, s, v);
      const auto& pr = tree.leaf_probs_d();
      double lhs = 0;
      for (int l = 0; l < a.size(); ++l) lhs += std::pow(space.norm(&loc[static_cast<size_t>(l) * d]), p) * pr[a.lo + l];
      lhs = std::pow(lhs, 1 / p);
      double rhs = single_c * std::pow(rs, 1 / p);
      ++rep.single_checks;
      if (rhs > 0) rep.worst_single_ratio = std::max(rep.worst_single_ratio, lhs / rhs);
      if (lhs > rhs + 1e-9)
        rep.violations.push_back("leaves [" + std::to_string(a.lo) + "," + std::to_string(a.hi) + ")");
    }
  }
  return rep;
}

RzeszutResult rzeszut_example(int n, int random_checks, std::uint64_t seed) {
  if (n < 1 || n > 16) throw std::invalid_argument("n must lie in 1..16");
  RzeszutResult res;
  res.n = n;
  const int depth = n + 1;
  const long leaves = 1L << depth;
  // sum of the Haar functions at a leaf is depth - 2 popcount(leaf); f is its sign
  std::vector<long> sums(leaves);
  for (long l = 0; l < leaves; ++l) {
    long s = depth - 2L * __builtin_popcountl(static_cast<unsigned long>(l));
    sums[l] = (s > 0) - (s < 0);
  }
  // per level m (from the leaves upwards), ||df_m||_1 = sum |2 S(node) - S(parent)| / (2 * leaves)
  res.per_level.assign(depth + 1, Q(0));
  for (int m = depth; m >= 1; --m) {
    std::vector<long> up(sums.size() / 2);
    mpz_class acc = 0;
    for (size_t i = 0; i < up.size(); ++i) {
      up[i] = sums[2 * i] + sums[2 * i + 1];
      acc += std::labs(2 * sums[2 * i] - up[i]) + std::labs(2 * sums[2 * i + 1] - up[i]);
    }
    res.per_level[m] = Q(acc, mpz_class(2 * leaves));
    res.per_level[m].canonicalize();
    sums.swap(up);
  }
  res.per_level[0] = Q(std::labs(sums[0]), leaves);
  res.per_level[0].canonicalize();
  res.variation = 0;
  for (const Q& v : res.per_level) res.variation += v;
  res.lower = std::sqrt(n / 2.0);
  res.lower_ok = res.variation >= 0 && to_double(res.variation * res.variation) >= n / 2.0 &&
                 res.variation * res.variation * 2 >= n;

  res.upper = std::sqrt(static_cast<double>(n));
  res.upper_ok = true;
  if (random_checks > 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const long l2 = 1L << n;
    std::vector<double> g(l2);
    for (int it = 0; it < random_checks; ++it) {
      double ss = 0;
      for (double& v : g) {
        v = gauss(rng);
        ss += v * v;
      }
      double sc = 1 / std::sqrt(ss / static_cast<double>(l2));
      for (double& v : g) v *= sc;
      std::vector<double> cur = g;
      double var = 0;
      long width = 1;
      while (cur.size() > 1) {
        std::vector<double> up(cur.size() / 2);
        for (size_t i = 0; i < up.size(); ++i) {
          up[i] = (cur[2 * i] + cur[2 * i + 1]) / 2;
          var += (std::fabs(cur[2 * i] - up[i]) + std::fabs(cur[2 * i + 1] - up[i])) * width / static_cast<double>(l2);
        }
        width *= 2;
        cur.swap(up);
      }
      res.worst_random = std::max(res.worst_random, var);
      ++res.random_checks;
    }
    res.upper_ok = res.worst_random <= res.upper + 1e-9;
  }
  return res;
}

DichotomyReport dichotomy_report(const std::function<FiltrationTree(int)>& generator, const std::vector<int>& depths,
                                 const NormedSpace& space, double p, int budget, std::uint64_t seed) {
  check_p(p);
  DichotomyReport rep;
  rep.rows.resize(depths.size());
  // sequential so each depth can start from the previous best probe
  FiltrationTree prev_tree;
  TypeEstimate prev;
  bool have_prev = false;
  for (size_t i = 0; i < depths.size(); ++i) {
    FiltrationTree t = generator(depths[i]);
    AtomCollection e = error_collection(t, false);
    DichotomyRow row;
    row.depth = depths[i];
    row.carleson = e.empty() ? Q(0) : carleson_constant(e);
    TypeEstimate est = empirical_type_constant(t, space, p, budget, seed, have_prev ? &prev : nullptr,
                                               have_prev ? &prev_tree : nullptr);
    row.empirical = est.constant;
    row.tp = tp_bound(p, to_double(row.carleson));
    row.max_probe = est.max_probe;
    rep.rows[i] = row;
    prev = std::move(est);
    prev_tree = std::move(t);
    have_prev = true;
  }
  bool grows = false;
  for (size_t i = 1; i < rep.rows.size(); ++i) grows = grows || rep.rows[i].carleson != rep.rows[0].carleson;
  rep.branch = grows ? "growing-Carleson branch" : "bounded-constant branch";
  return rep;
}

std::string dichotomy_csv(const DichotomyReport& r) {
  std::ostringstream os;
  os.precision(12);
  os << "depth,carleson,empirical_constant,tp_bound,max_probe_id\n";
  for (const auto& row : r.rows)
    os << row.depth << "," << to_string(row.carleson) << "," << row.empirical << "," << row.tp << "," << row.max_probe
       << "\n";
  return os.str();
}

}  // namespace mtype
