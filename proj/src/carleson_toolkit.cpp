#include "mtype/carleson_toolkit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mtype {

namespace {

std::vector<int> greedy_order(const AtomCollection& r) {
  std::vector<int> order(r.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return r.precedes(a, b); });
  return order;
}

}  // namespace

int find_dense_seed(const AtomCollection& r, const Q& target, int generations) {
  if (target <= 0 || target > 1) throw std::invalid_argument("seed density target must lie in (0,1]");
  for (int i : greedy_order(r))
    if (r.mass(r.generation(r[i].set, generations)) >= target * r.mass(i)) return i;
  return -1;
}

CondensationResult condense(const AtomCollection& r, const Q& eps_tilde, int n, int k) {
  if (eps_tilde <= 0 || eps_tilde >= 1) throw std::invalid_argument("condensation accuracy must lie in (0,1)");
  if (n < 1 || k < 1) throw std::invalid_argument("condensation needs n, k >= 1");
  CondensationResult res;
  res.eps_tilde = eps_tilde;
  res.eps = eps_tilde / 2;
  res.n = n;
  res.k = k;
  if (r.empty()) {
    res.reason = "empty collection";
    return res;
  }
  res.carleson = carleson_constant(r);
  res.density_target = Q(k * n) / qpow(res.eps, n);
  res.density_reached = res.carleson >= res.density_target;

  int seed = find_dense_seed(r, 1 - qpow(res.eps, n), k * n);
  if (seed < 0) {
    res.reason = "no member whose " + std::to_string(k * n) + "-th generation covers 1 - eps^n of it";
    return res;
  }
  res.found = true;
  res.seed = seed;
  res.families.push_back({seed});
  for (int j = 1; j <= n; ++j) {
    Q need = 1 - qpow(res.eps, n - j);
    std::vector<int> fam;
    Q worst = 1;
    for (int a : res.families[j - 1]) {
      Q covered = 0;
      for (int b : r.generation(r[a].set, k)) {
        if (r.mass(r.generation(r[b].set, k * (n - j))) >= need * r.mass(b)) {
          fam.push_back(b);
          covered += r.mass(b);
        }
      }
      worst = std::min(worst, Q(covered / r.mass(a)));
    }
    std::sort(fam.begin(), fam.end());
    res.families.push_back(fam);
    res.min_coverage.push_back(worst);
  }

  // independent re-check of the four properties
  res.seed_in_r = res.families[0].size() == 1 && res.families[0][0] == seed;
  res.inside_generations = true;
  res.coverage_ok = true;
  res.disjoint = true;
  for (int j = 1; j <= n; ++j) {
    std::vector<int> g = r.generation(r[seed].set, k * j);
    std::set<int> gs(g.begin(), g.end());
    for (int b : res.families[j]) res.inside_generations = res.inside_generations && gs.count(b);
    const auto& fam = res.families[j];
    for (size_t x = 0; x < fam.size(); ++x)
      for (size_t y = x + 1; y < fam.size(); ++y) res.disjoint = res.disjoint && r[fam[x]].set.disjoint(r[fam[y]].set);
    for (int a : res.families[j - 1]) {
      Q inside = 0;
      for (int b : fam)
        if (r[a].set.contains(r[b].set)) inside += r.mass(b);
      res.coverage_ok = res.coverage_ok && inside > (1 - eps_tilde) * r.mass(a);
    }
  }
  return res;
}

std::vector<std::vector<int>> Disjointification::families() const {
  std::vector<std::vector<int>> out(m);
  for (size_t i = 0; i < color.size(); ++i) out[color[i]].push_back(static_cast<int>(i));
  return out;
}

bool check_families(const AtomCollection& r, const std::vector<int>& color, int m, std::vector<std::string>* notes,
                    bool* halving, bool* geomet) {
  *halving = true;
  *geomet = true;
  for (int c = 0; c < m; ++c) {
    std::vector<int> idx;
    for (int i = 0; i < r.size(); ++i)
      if (color[i] == c) idx.push_back(i);
    AtomCollection fam = r.subset(idx);
    for (int i = 0; i < fam.size(); ++i) {
      Q pa = fam.mass(i);
      std::vector<int> cur = fam.g1(fam[i].set);
      if (fam.mass(cur) * 2 > pa) {
        *halving = false;
        if (notes) notes->push_back("family " + std::to_string(c) + " halving fails");
      }
      for (int g = 1; !cur.empty(); ++g) {
        if (fam.mass(cur) > pa * pow2(-g)) {
          *geomet = false;
          if (notes) notes->push_back("family " + std::to_string(c) + " generation " + std::to_string(g) + " too heavy");
        }
        std::vector<int> next;
        for (int x : cur) {
          auto sub = fam.g1(fam[x].set);
          next.insert(next.end(), sub.begin(), sub.end());
        }
        cur = std::move(next);
      }
    }
  }
  return *halving && *geomet;
}

namespace {

// Colors members in preorder; a member may join family c when the nearest ancestor of
// color c keeps its first generation at no more than half its mass.
struct Colorer {
  const AtomCollection& r;
  std::vector<int> color;
  std::vector<Q> used;  // mass of same-colored first generation below each member

  explicit Colorer(const AtomCollection& rr) : r(rr), color(rr.size(), -1), used(rr.size(), Q(0)) {}

  int nearest(int i, int c) const {
    for (int p = r.forest_parent(i); p >= 0; p = r.forest_parent(p))
      if (color[p] == c) return p;
    return -1;
  }
  bool fits(int i, int c) const {
    int p = nearest(i, c);
    return p < 0 || (used[p] + r.mass(i)) * 2 <= r.mass(p);
  }
  void assign(int i, int c) {
    color[i] = c;
    int p = nearest(i, c);
    if (p >= 0) used[p] += r.mass(i);
  }
  void unassign(int i) {
    int c = color[i];
    color[i] = -1;
    int p = nearest(i, c);
    if (p >= 0) used[p] -= r.mass(i);
  }
};

}  // namespace

Disjointification disjointify(const AtomCollection& r) {
  if (!r.nested()) throw std::invalid_argument("disjointification needs a nested collection");
  Disjointification d;
  if (r.empty()) {
    d.cover_ok = d.halving_ok = d.geomet_ok = d.within_bound = true;
    return d;
  }
  d.carleson = carleson_constant(r);
  Q b = 4 * d.carleson + 1;
  d.bound = static_cast<int>(mpz_class(b.get_num() / b.get_den()).get_si());

  Colorer col(r);
  int m = 0;
  for (int i = 0; i < r.size(); ++i) {
    int c = 0;
    while (!col.fits(i, c)) ++c;
    col.assign(i, c);
    m = std::max(m, c + 1);
  }
  if (m > d.bound) {
    // exhaustive search with the color budget capped at the bound
    Colorer ex(r);
    long budget = 5'000'000;
    std::function<bool(int)> rec = [&](int i) {
      if (i == r.size()) return true;
      if (--budget < 0) return false;
      for (int c = 0; c < d.bound; ++c) {
        if (!ex.fits(i, c)) continue;
        ex.assign(i, c);
        if (rec(i + 1)) return true;
        ex.unassign(i);
      }
      return false;
    };
    if (rec(0)) {
      col.color = ex.color;
      col.used = ex.used;
      m = 0;
      for (int c : col.color) m = std::max(m, c + 1);
      d.fallback = true;
    } else {
      d.notes.push_back("greedy used " + std::to_string(m) + " colors and the capped search did not finish");
    }
  }
  d.color = col.color;
  d.m = m;
  d.cover_ok = std::all_of(d.color.begin(), d.color.end(), [&](int c) { return c >= 0 && c < m; });
  check_families(r, d.color, m, &d.notes, &d.halving_ok, &d.geomet_ok);
  d.within_bound = d.m <= d.bound;
  return d;
}

EstddResult estdd_bound(const std::vector<SimpleFunction>& gs, const std::vector<PointSet>& ds,
                        const std::vector<double>& a, double p, const NormedSpace& x) {
  EstddResult res;
  if (gs.empty()) return res;
  const FiltrationTree& t = gs.front().tree();
  int L = t.leaf_count();
  const auto& pr = t.leaf_probs_d();
  std::vector<std::vector<char>> mask(ds.size(), std::vector<char>(L, 0));
  for (size_t k = 0; k < ds.size(); ++k)
    for (const Interval& iv : ds[k])
      for (int l = iv.lo; l < iv.hi; ++l) mask[k][l] = 1;
  auto coeff = [&](size_t k) { return k < a.size() ? std::fabs(a[k]) : 0.0; };

  std::vector<std::vector<double>> nrm(gs.size(), std::vector<double>(L));
  std::vector<double> vals(gs.front().dim());
  for (size_t j = 0; j < gs.size(); ++j)
    for (int l = 0; l < L; ++l) {
      for (int c = 0; c < gs[j].dim(); ++c) vals[c] = to_double(gs[j].at(l, c));
      nrm[j][l] = x.norm(vals.data());
    }
  for (size_t j = 0; j < gs.size() && res.hypotheses_ok; ++j) {
    double total = 0;
    for (int l = 0; l < L; ++l) total += std::pow(nrm[j][l], p) * pr[l];
    for (int l = 0; l < L; ++l) {
      if (nrm[j][l] == 0) continue;
      bool covered = false;
      for (size_t k = j; k < ds.size() && !covered; ++k) covered = mask[k][l];
      if (!covered) {
        res.hypotheses_ok = false;
        res.violation = "support of g_" + std::to_string(j) + " leaves the union of D_k, k >= j";
        break;
      }
    }
    for (size_t k = 0; k + j < ds.size() && res.hypotheses_ok; ++k) {
      double part = 0;
      for (int l = 0; l < L; ++l)
        if (mask[k + j][l]) part += std::pow(nrm[j][l], p) * pr[l];
      if (part > std::pow(coeff(k), p) * total * (1 + 1e-9) + 1e-15) {
        res.hypotheses_ok = false;
        res.violation = "decay fails at (k,j) = (" + std::to_string(k) + "," + std::to_string(j) + ")";
      }
    }
  }
  if (!res.hypotheses_ok) return res;

  int dim = gs.front().dim();
  double lhs = 0, sum_p = 0;
  std::vector<double> acc(dim);
  for (int l = 0; l < L; ++l) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const auto& g : gs)
      for (int c = 0; c < dim; ++c) acc[c] += to_double(g.at(l, c));
    lhs += std::pow(x.norm(acc.data()), p) * pr[l];
  }
  for (size_t j = 0; j < gs.size(); ++j)
    for (int l = 0; l < L; ++l) sum_p += std::pow(nrm[j][l], p) * pr[l];
  double asum = 0;
  for (double v : a) asum += std::fabs(v);
  res.lhs = std::pow(lhs, 1.0 / p);
  res.rhs = asum * std::pow(sum_p, 1.0 / p);
  return res;
}

}  // namespace mtype
