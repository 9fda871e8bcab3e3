#include "mtype/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mtype {

NormedSpace NormedSpace::lq(double q, int dim) {
  if (!(q >= 1.0)) throw std::invalid_argument("l_q needs q >= 1");
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  return {dim, q};
}

NormedSpace NormedSpace::parse(const std::string& spec) {
  if (spec == "real" || spec == "R") return real();
  std::stringstream ss(spec);
  std::string head, qs, ds;
  std::getline(ss, head, ':');
  std::getline(ss, qs, ':');
  std::getline(ss, ds, ':');
  if (head != "lq" || qs.empty() || ds.empty())
    throw std::invalid_argument("space must be 'real' or 'lq:<q>:<dim>', got '" + spec + "'");
  double q = (qs == "inf") ? kInf : std::stod(qs);
  return lq(q, std::stoi(ds));
}

double NormedSpace::norm(const double* v) const {
  if (dim == 1) return std::fabs(v[0]);
  if (std::isinf(q)) {
    double m = 0;
    for (int i = 0; i < dim; ++i) m = std::max(m, std::fabs(v[i]));
    return m;
  }
  if (q == 1.0) {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += std::fabs(v[i]);
    return s;
  }
  double s = 0;
  for (int i = 0; i < dim; ++i) s += std::pow(std::fabs(v[i]), q);
  return std::pow(s, 1.0 / q);
}

double NormedSpace::norm(const Vec& v) const {
  std::vector<double> d(v.size());
  for (size_t i = 0; i < v.size(); ++i) d[i] = to_double(v[i]);
  return norm(d.data());
}

std::string NormedSpace::name() const {
  if (dim == 1) return "real";
  std::ostringstream os;
  os << "lq:" << (std::isinf(q) ? std::string("inf") : (std::ostringstream() << q).str()) << ":" << dim;
  return os.str();
}

Vec zero_vec(int dim) { return Vec(dim, Q(0)); }

Vec& add_scaled(Vec& acc, const Q& s, const Vec& v) {
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += s * v[i];
  return acc;
}

SimpleFunction::SimpleFunction(const FiltrationTree& tree, int dim, int level)
    : tree_(&tree), dim_(dim), level_(level), values_(static_cast<size_t>(tree.leaf_count()) * dim, Q(0)) {}

SimpleFunction SimpleFunction::constant(const FiltrationTree& tree, const Vec& v) {
  SimpleFunction f(tree, static_cast<int>(v.size()), 0);
  f.set_on(tree.atom(0).leaves, v);
  return f;
}

SimpleFunction SimpleFunction::indicator(const FiltrationTree& tree, const Interval& set, int level) {
  SimpleFunction f(tree, 1, level);
  f.set_on(set, {Q(1)});
  return f;
}

Vec SimpleFunction::value(int leaf) const {
  auto b = values_.begin() + static_cast<long>(leaf) * dim_;
  return Vec(b, b + dim_);
}

void SimpleFunction::set_on(const Interval& set, const Vec& v) {
  for (int l = set.lo; l < set.hi; ++l)
    for (int c = 0; c < dim_; ++c) at(l, c) = v[c];
}

void SimpleFunction::add_on(const Interval& set, const Q& scalar, const Vec& v) {
  for (int l = set.lo; l < set.hi; ++l)
    for (int c = 0; c < dim_; ++c) at(l, c) += scalar * v[c];
}

SimpleFunction& SimpleFunction::operator+=(const SimpleFunction& o) {
  for (size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  level_ = std::max(level_, o.level_);
  return *this;
}

SimpleFunction& SimpleFunction::operator-=(const SimpleFunction& o) {
  for (size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  level_ = std::max(level_, o.level_);
  return *this;
}

SimpleFunction& SimpleFunction::operator*=(const Q& s) {
  for (auto& v : values_) v *= s;
  return *this;
}

bool SimpleFunction::operator==(const SimpleFunction& o) const {
  return tree_ == o.tree_ && dim_ == o.dim_ && values_ == o.values_;
}

Vec SimpleFunction::integral() const { return integral_over(tree_->atom(0).leaves); }

Vec SimpleFunction::integral_over(const Interval& set) const {
  Vec s = zero_vec(dim_);
  for (int l = set.lo; l < set.hi; ++l)
    for (int c = 0; c < dim_; ++c) s[c] += at(l, c) * tree_->leaf_prob(l);
  return s;
}

bool SimpleFunction::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](const Q& q) { return q == 0; });
}

int SimpleFunction::measurable_level() const {
  const FiltrationTree& t = *tree_;
  std::vector<char> flat(t.size(), 1);
  for (int id = t.size() - 1; id >= 0; --id) {
    const auto& a = t.atom(id);
    if (a.children.empty()) continue;
    bool ok = true;
    int first = t.atom(a.children.front()).leaves.lo;
    for (int c : a.children) ok = ok && flat[c];
    if (ok)
      for (int l = a.leaves.lo; l < a.leaves.hi && ok; ++l)
        for (int c = 0; c < dim_ && ok; ++c) ok = at(l, c) == at(first, c);
    flat[id] = ok;
  }
  for (int n = 0; n <= t.depth(); ++n) {
    bool all = true;
    for (int id : t.level_atoms(n)) all = all && flat[id];
    if (all) return n;
  }
  return t.depth();
}

std::vector<Vec> SimpleFunction::atom_means() const {
  const FiltrationTree& t = *tree_;
  std::vector<Vec> integ(t.size(), zero_vec(dim_));
  for (int id = t.size() - 1; id >= 0; --id) {
    const auto& a = t.atom(id);
    if (a.children.empty()) {
      for (int c = 0; c < dim_; ++c) integ[id][c] = at(a.leaves.lo, c) * a.prob;
    } else {
      for (int ch : a.children)
        for (int c = 0; c < dim_; ++c) integ[id][c] += integ[ch][c];
    }
  }
  for (int id = 0; id < t.size(); ++id)
    for (int c = 0; c < dim_; ++c) integ[id][c] /= t.atom(id).prob;
  return integ;
}

SimpleFunction cond_expectation(const SimpleFunction& f, int n) {
  const FiltrationTree& t = f.tree();
  if (n < 0 || n > t.depth()) throw std::out_of_range("conditioning level " + std::to_string(n) + " out of range");
  if (n == t.depth()) {
    SimpleFunction g = f;
    g.set_level(n);
    return g;
  }
  SimpleFunction g(t, f.dim(), n);
  for (int id : t.level_atoms(n)) {
    Vec s = f.integral_over(t.atom(id).leaves);
    for (auto& v : s) v /= t.atom(id).prob;
    g.set_on(t.atom(id).leaves, s);
  }
  return g;
}

MartingaleDecomposition martingale_diffs(const SimpleFunction& f) {
  const FiltrationTree& t = f.tree();
  std::vector<Vec> means = f.atom_means();
  MartingaleDecomposition d;
  d.mean = means[0];
  int top = std::max(f.level(), f.measurable_level());
  for (int n = 1; n <= top; ++n) {
    SimpleFunction g(t, f.dim(), n);
    for (int id : t.level_atoms(n)) {
      Vec v = means[id];
      add_scaled(v, Q(-1), means[t.atom(id).parent]);
      g.set_on(t.atom(id).leaves, v);
    }
    d.diffs.push_back(std::move(g));
  }
  return d;
}

SimpleFunction basis_k(const FiltrationTree& tree, int atom) {
  const auto& a = tree.atom(atom);
  if (a.parent < 0 || a.rank < 1)
    throw std::invalid_argument("k is defined only for non-largest children; atom '" + tree.path(atom) + "' is not one");
  int prev = tree.atom(a.parent).children[a.rank - 1];
  SimpleFunction f(tree, 1, a.level);
  f.set_on(a.leaves, {Q(1)});
  f.set_on(tree.atom(prev).leaves, {Q(-(a.prob / tree.atom(prev).prob))});
  return f;
}

SimpleFunction basis_phi(const FiltrationTree& tree, int atom) {
  if (!tree.internal(atom)) throw std::invalid_argument("phi needs an atom with children");
  SimpleFunction f(tree, 1, tree.atom(atom).level + 1);
  Interval ti = tree.tilde(atom);
  if (ti.empty()) return f;
  int s = tree.star(atom);
  f.set_on(tree.atom(s).leaves, {tree.mass(ti)});
  f.set_on(ti, {Q(-tree.atom(s).prob)});
  return f;
}

std::vector<Vec> y_from_x(const FiltrationTree& tree, int dim, const std::vector<Vec>& x) {
  std::vector<Vec> y(tree.size());
  for (int id = 1; id < tree.size(); ++id) y[id] = zero_vec(dim);
  for (int id = 0; id < tree.size(); ++id) {
    const auto& ch = tree.atom(id).children;
    for (size_t j = 1; j < ch.size(); ++j) {
      const Vec& xj = x[ch[j]];
      if (xj.empty()) continue;
      add_scaled(y[ch[j]], Q(1), xj);
      add_scaled(y[ch[j - 1]], Q(-(tree.atom(ch[j]).prob / tree.atom(ch[j - 1]).prob)), xj);
    }
  }
  return y;
}

std::vector<Vec> x_from_y(const FiltrationTree& tree, int dim, const std::vector<Vec>& y) {
  std::vector<Vec> x(tree.size());
  for (int id = 0; id < tree.size(); ++id) {
    const auto& ch = tree.atom(id).children;
    if (ch.size() < 2) continue;
    // x_i P(A_i) is the tail sum of y_l P(A_l) over l >= i
    Vec tail = zero_vec(dim);
    for (size_t j = ch.size() - 1; j >= 1; --j) {
      add_scaled(tail, tree.atom(ch[j]).prob, y[ch[j]]);
      Vec xi = tail;
      for (auto& v : xi) v /= tree.atom(ch[j]).prob;
      x[ch[j]] = std::move(xi);
    }
    add_scaled(tail, tree.atom(ch[0]).prob, y[ch[0]]);
    for (const Q& v : tail)
      if (v != 0) throw std::logic_error("difference with nonzero conditional mean below '" + tree.path(id) + "'");
  }
  return x;
}

Coefficients coeffs_from_function(const SimpleFunction& f) {
  const FiltrationTree& t = f.tree();
  std::vector<Vec> means = f.atom_means();
  Coefficients c;
  c.dim = f.dim();
  c.mean = means[0];
  c.y.resize(t.size());
  for (int id = 1; id < t.size(); ++id) {
    c.y[id] = means[id];
    add_scaled(c.y[id], Q(-1), means[t.atom(id).parent]);
  }
  c.x = x_from_y(t, f.dim(), c.y);
  return c;
}

SimpleFunction expand_y(const FiltrationTree& tree, const Vec& mean, const std::vector<Vec>& y) {
  int dim = static_cast<int>(mean.size());
  std::vector<Vec> acc(tree.size());
  acc[0] = mean;
  int level = 0;
  for (int id = 1; id < tree.size(); ++id) {
    acc[id] = acc[tree.atom(id).parent];
    add_scaled(acc[id], Q(1), y[id]);
    for (const Q& v : y[id])
      if (v != 0) level = std::max(level, tree.atom(id).level);
  }
  SimpleFunction f(tree, dim, level);
  for (int l = 0; l < tree.leaf_count(); ++l) f.set_on({l, l + 1}, acc[tree.leaf_atom(l)]);
  return f;
}

SimpleFunction expand_coeffs(const FiltrationTree& tree, const Vec& mean, const std::vector<Vec>& x) {
  return expand_y(tree, mean, y_from_x(tree, static_cast<int>(mean.size()), x));
}

double lp_norm(const SimpleFunction& f, double p, const NormedSpace& x) {
  if (!(p >= 1.0)) throw std::invalid_argument("L^p norm needs p >= 1");
  const FiltrationTree& t = f.tree();
  std::vector<double> v(f.dim());
  double s = 0;
  for (int l = 0; l < t.leaf_count(); ++l) {
    for (int c = 0; c < f.dim(); ++c) v[c] = to_double(f.at(l, c));
    s += std::pow(x.norm(v.data()), p) * t.leaf_probs_d()[l];
  }
  return std::pow(s, 1.0 / p);
}

double diff_power_sum(const FiltrationTree& tree, const std::vector<Vec>& y, double p, const NormedSpace& x) {
  double s = 0;
  for (int id = 1; id < tree.size(); ++id)
    if (!y[id].empty()) s += std::pow(x.norm(y[id]), p) * to_double(tree.atom(id).prob);
  return s;
}

double variation_norm(const SimpleFunction& f, const NormedSpace& x) {
  Coefficients c = coeffs_from_function(f);
  return diff_power_sum(f.tree(), c.y, 1.0, x);
}

Q variation_norm_exact(const SimpleFunction& f) {
  if (f.dim() != 1) throw std::invalid_argument("exact variation is for scalar functions");
  const FiltrationTree& t = f.tree();
  std::vector<Vec> means = f.atom_means();
  Q s = 0;
  for (int id = 1; id < t.size(); ++id) s += qabs(means[id][0] - means[t.atom(id).parent][0]) * t.atom(id).prob;
  return s;
}

}  // namespace mtype
