#pragma once
#include "mtype/tree.hpp"

#include <limits>
#include <string>
#include <vector>

namespace mtype {

using Vec = std::vector<Q>;

// The space l_q^d; q = infinity gives the max norm, d = 1 is the real line.
struct NormedSpace {
  int dim = 1;
  double q = 1.0;

  static NormedSpace real() { return {1, 1.0}; }
  static NormedSpace lq(double q, int dim);
  static NormedSpace parse(const std::string& spec);  // "real", "lq:1:3", "lq:inf:3"
  double norm(const double* v) const;
  double norm(const Vec& v) const;
  std::string name() const;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Piecewise constant function stored by its value on every leaf; `level` records the
// filtration level at which it is declared measurable.
class SimpleFunction {
 public:
  SimpleFunction() = default;
  SimpleFunction(const FiltrationTree& tree, int dim, int level);

  static SimpleFunction constant(const FiltrationTree& tree, const Vec& v);
  static SimpleFunction indicator(const FiltrationTree& tree, const Interval& set, int level);

  const FiltrationTree& tree() const { return *tree_; }
  int dim() const { return dim_; }
  int level() const { return level_; }
  void set_level(int level) { level_ = level; }
  Q& at(int leaf, int c = 0) { return values_[static_cast<size_t>(leaf) * dim_ + c]; }
  const Q& at(int leaf, int c = 0) const { return values_[static_cast<size_t>(leaf) * dim_ + c]; }
  Vec value(int leaf) const;
  void set_on(const Interval& set, const Vec& v);
  void add_on(const Interval& set, const Q& scalar, const Vec& v);

  SimpleFunction& operator+=(const SimpleFunction& o);
  SimpleFunction& operator-=(const SimpleFunction& o);
  SimpleFunction& operator*=(const Q& s);
  friend SimpleFunction operator+(SimpleFunction a, const SimpleFunction& b) { return a += b; }
  friend SimpleFunction operator-(SimpleFunction a, const SimpleFunction& b) { return a -= b; }
  friend SimpleFunction operator*(const Q& s, SimpleFunction a) { return a *= s; }
  bool operator==(const SimpleFunction& o) const;

  Vec integral() const;
  Vec integral_over(const Interval& set) const;
  bool is_zero() const;
  // Smallest n for which the function is constant on every level-n atom.
  int measurable_level() const;
  // Mean of the function on every atom, indexed by atom id.
  std::vector<Vec> atom_means() const;

 private:
  const FiltrationTree* tree_ = nullptr;
  int dim_ = 1;
  int level_ = 0;
  std::vector<Q> values_;
};

SimpleFunction cond_expectation(const SimpleFunction& f, int n);

struct MartingaleDecomposition {
  Vec mean;
  std::vector<SimpleFunction> diffs;  // diffs[n-1] is the n-th difference
};
MartingaleDecomposition martingale_diffs(const SimpleFunction& f);

// k for a non-largest child: its indicator minus the mass-ratio multiple of the previous sibling.
SimpleFunction basis_k(const FiltrationTree& tree, int atom);
// P(A\A*) on A* minus P(A*) on A\A*; zero when A does not split.
SimpleFunction basis_phi(const FiltrationTree& tree, int atom);

// Both coefficient systems of a function:
//   f = mean + sum over non-largest children B of x_B k_B, and
//   the n-th difference equals y_A on each level-n atom A.
struct Coefficients {
  int dim = 1;
  Vec mean;
  std::vector<Vec> x;  // by atom id; empty unless the atom is a non-largest child
  std::vector<Vec> y;  // by atom id; y[root] is empty
};
Coefficients coeffs_from_function(const SimpleFunction& f);
std::vector<Vec> y_from_x(const FiltrationTree& tree, int dim, const std::vector<Vec>& x);
std::vector<Vec> x_from_y(const FiltrationTree& tree, int dim, const std::vector<Vec>& y);
SimpleFunction expand_coeffs(const FiltrationTree& tree, const Vec& mean, const std::vector<Vec>& x);
SimpleFunction expand_y(const FiltrationTree& tree, const Vec& mean, const std::vector<Vec>& y);

double lp_norm(const SimpleFunction& f, double p, const NormedSpace& x);
double variation_norm(const SimpleFunction& f, const NormedSpace& x);
Q variation_norm_exact(const SimpleFunction& f);  // scalar functions
// Sum over n of ||n-th difference||_p^p, straight from the y-coefficients.
double diff_power_sum(const FiltrationTree& tree, const std::vector<Vec>& y, double p, const NormedSpace& x);

// Vector helpers
Vec zero_vec(int dim);
Vec& add_scaled(Vec& acc, const Q& s, const Vec& v);

}  // namespace mtype
