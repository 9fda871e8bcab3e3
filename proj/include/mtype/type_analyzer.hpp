#pragma once
#include "mtype/carleson_toolkit.hpp"
#include "mtype/martingale.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mtype {

// Upper-bound surrogate for the scalar martingale type constant: 2 (p/(p-1))^(1/p).
double mt_surrogate(double p);
// Constant of the finite-Carleson bound and its B-part analogue.
double tp_bound(double p, double carleson);
double ctilde_bound(double p, double carleson);
// (1 - 2^(-1/p))^-1
double cp_constant(double p);

struct Probe {
  int id = 0;
  std::string kind;  // constant, basis, rademacher, ascent
  double ratio = 0;
};

struct TypeEstimate {
  double p = 2;
  NormedSpace space;
  double constant = 1;   // sup of ||f||_p / (||Ef||^p + sum ||df_n||_p^p)^(1/p) over probes
  int max_probe = 0;
  std::string max_kind;
  int probes = 0;
  std::vector<double> running_max;  // after each probe
  std::vector<Probe> inventory;
  std::uint64_t seed = 0;
  // best probe, as a mean and x-coefficients laid out dim entries per atom id
  std::vector<double> best_mean, best_x;
};

// Deterministic given the seed. Throws unless 1 < p <= 2 and budget >= 1.
// A previous estimate on a tree whose atoms form a prefix of this one (same paths and masses)
// contributes its best probe as a starting point.
TypeEstimate empirical_type_constant(const FiltrationTree& tree, const NormedSpace& space, double p, int budget,
                                     std::uint64_t seed = 1, const TypeEstimate* warm = nullptr,
                                     const FiltrationTree* warm_tree = nullptr);

// Ratio ||f||_p^p / (||Ef||^p + sum ||df_n||_p^p) for f = mean + sum x_B k_B, in doubles.
// x is indexed by atom id and laid out as dim consecutive entries per atom.
double probe_ratio(const FiltrationTree& tree, const NormedSpace& space, double p, const std::vector<double>& mean,
                   const std::vector<double>& x);

struct GBDecomposition {
  Coefficients coeffs;
  std::vector<Vec> z;     // by split atom id; empty when the atom has a single child
  SimpleFunction g, b;    // g carries the mean on Omega and y_A on error atoms; b the largest children
  bool exact = false;     // f == g + b
  bool diffs_match = false;  // every difference equals the y-coefficients of its level
};
GBDecomposition gb_decompose(const SimpleFunction& f);
// Per split atom: ||z P(A*) 1_{A~}||^p <= sum over j >= 2 of ||y_{A_j}||^p P(A_j); returns violations.
std::vector<std::string> gb_holder_check(const GBDecomposition& gb, double p, const NormedSpace& space);

struct ConscolReport {
  double lhs = 0, rhs = 0;
  int m = 0;
  bool colors_ok = false;
  bool families_ok = true;  // the per-family estimate obtained through almost disjoint supports
  std::vector<std::string> notes;
  bool holds() const { return lhs <= rhs + 1e-9 && colors_ok && families_ok; }
};
// x is indexed by member of r.
ConscolReport verify_conscol(const AtomCollection& r, const std::vector<Vec>& x, double p, const NormedSpace& space);

struct SingleColReport {
  double estcolb_lhs = 0, estcolb_rhs = 0;
  double worst_single_ratio = 0;  // max over (family, A) of lhs/rhs of the single-generation estimate
  int single_checks = 0;
  std::vector<std::string> violations;
  bool holds() const { return estcolb_lhs <= estcolb_rhs + 1e-9 && violations.empty(); }
};
// z is indexed by atom id (split atoms only; others ignored).
SingleColReport verify_singlecol_estcolb(const FiltrationTree& tree, const std::vector<Vec>& z, double p,
                                         const NormedSpace& space);

struct RzeszutResult {
  int n = 0;
  Q variation;              // sum over all levels of ||df_k||_1, exact
  std::vector<Q> per_level;
  double lower = 0;         // sqrt(n/2)
  bool lower_ok = false;
  int random_checks = 0;
  double worst_random = 0;  // largest variation seen among L2-normalized random functions
  double upper = 0;         // sqrt(n)
  bool upper_ok = false;
};
// Sign of the sum of the Haar functions of length >= 2^-n, on the depth n+1 dyadic tree.
// random_checks > 0 also tests L2-normalized random functions on the depth-n tree.
RzeszutResult rzeszut_example(int n, int random_checks = 0, std::uint64_t seed = 1);

struct DichotomyRow {
  int depth = 0;
  Q carleson;
  double empirical = 0;
  double tp = 0;
  int max_probe = 0;
};
struct DichotomyReport {
  std::vector<DichotomyRow> rows;
  std::string branch;  // "bounded-constant branch" or "growing-Carleson branch"
};
DichotomyReport dichotomy_report(const std::function<FiltrationTree(int)>& generator, const std::vector<int>& depths,
                                 const NormedSpace& space, double p, int budget, std::uint64_t seed = 1);
std::string dichotomy_csv(const DichotomyReport& r);

}  // namespace mtype
