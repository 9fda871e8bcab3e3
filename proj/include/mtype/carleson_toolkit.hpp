#pragma once
#include "mtype/collections.hpp"
#include "mtype/martingale.hpp"

#include <string>
#include <vector>

namespace mtype {

// The least member (in greedy order) whose generation of the given depth covers at least
// `target` of it; -1 when there is none. Throws if target is outside (0,1].
int find_dense_seed(const AtomCollection& r, const Q& target, int generations);

struct CondensationResult {
  bool found = false;
  std::string reason;
  int seed = -1;
  Q eps_tilde, eps;
  int n = 0, k = 0;
  std::vector<std::vector<int>> families;  // families[0] = {seed}
  std::vector<Q> min_coverage;             // per j >= 1: min over parents of P(A and T_j*) / P(A)
  Q carleson;                              // Carleson constant of the input
  Q density_target;                        // kn / eps^n
  bool density_reached = false;
  bool seed_in_r = false, inside_generations = false, coverage_ok = false, disjoint = false;
  bool verified() const { return found && seed_in_r && inside_generations && coverage_ok && disjoint; }
};

CondensationResult condense(const AtomCollection& r, const Q& eps_tilde, int n, int k);

struct Disjointification {
  std::vector<int> color;  // per member of the input collection
  int m = 0;
  Q carleson;
  int bound = 0;           // floor(4 Carl + 1)
  bool fallback = false;
  bool cover_ok = false, halving_ok = false, geomet_ok = false, within_bound = false;
  std::vector<std::string> notes;
  bool ok() const { return cover_ok && halving_ok && geomet_ok && within_bound; }
  std::vector<std::vector<int>> families() const;
};

Disjointification disjointify(const AtomCollection& r);
// Re-checks halving and geometric decay for an arbitrary coloring.
bool check_families(const AtomCollection& r, const std::vector<int>& color, int m, std::vector<std::string>* notes,
                    bool* halving, bool* geomet);

using PointSet = std::vector<Interval>;

struct EstddResult {
  bool hypotheses_ok = true;
  std::string violation;
  double lhs = 0, rhs = 0;
};
EstddResult estdd_bound(const std::vector<SimpleFunction>& gs, const std::vector<PointSet>& ds,
                        const std::vector<double>& a, double p, const NormedSpace& x);

}  // namespace mtype
