#pragma once
#include "mtype/collections.hpp"
#include "mtype/martingale.hpp"

#include <string>
#include <vector>

namespace mtype {

struct ProtoHaarParams {
  Q eps;
  int k = 0;
};
// Default accuracy for a Haar depth n: eps = 2^-(n+3) and k = ceil(-log2 eps) + 1.
ProtoHaarParams default_protohaar_params(int haar_depth);
// Throws unless 0 < eps < 1/2 and 2^-k < eps.
void validate_protohaar_params(const ProtoHaarParams& prm);

struct LarconResult {
  bool holds = false;
  Q witness;  // P(union of G_k(E, A)) / P(A)
};
LarconResult check_larcon(const FiltrationTree& tree, const AtomCollection& e, int atom, const ProtoHaarParams& prm);

// One pass of the greedy loop. U lists collection indices in greedy order.
struct GreedyStep {
  bool truncated = false;
  int next_y = -1;         // member index of the chosen Y when not truncated
  Interval y_prev;         // the atom being split at this step
  std::vector<int> u;      // members of G_1(E, Y_prev) taken into the plus region
  std::vector<int> g1;     // all of G_1(E, Y_prev), greedy order
  Q u_mass;
  Q y_mass;                // mass of the new Y (the remainder set when truncated)
  int level_prev = 0;      // level of Y_prev
  int level_next = 0;      // level of the new Y, or deepest U level when truncated
};

struct GreedyState {
  int atom = -1;
  Q pa;
  Q prior;                 // accumulated mass of the plus region
  Interval y;              // current Y (an atom) while not truncated
  int level = 0;
  bool done = false;
  std::vector<GreedyStep> steps;
};

GreedyState greedy_start(const FiltrationTree& tree, int atom);
// Advances by one step; throws std::logic_error if the balance condition fails beforehand.
GreedyStep greedy_step(const FiltrationTree& tree, const AtomCollection& e, GreedyState& st, const ProtoHaarParams& prm);
// The balance condition after m steps: prior <= P(A)/2 <= P(Y_m) + prior.
bool balance_condition(const GreedyState& st);

struct ProtoHaarCertificate {
  int atom = -1;
  ProtoHaarParams params;
  int tau = 0;
  std::vector<GreedyStep> steps;
  SimpleFunction h;
  std::vector<int> plus_members;   // collection indices forming the +1 region
  std::vector<Interval> minus_set; // leaf ranges of the -1 region
  std::vector<Interval> neutral_set;
  Q c0, lambda1, lambda2;
  int t = 0;
  // exact witnesses
  Q max_abs, mean, off_one_mass, plus_mass, minus_mass, variation, pa;
  bool support_ok = false;
  bool h1 = false, h2 = false, h3 = false, h4 = false, h5 = false, h6 = false, h7 = false;
  bool atoms_ok = false;     // each stratum union is an atom of the right level
  bool balance_ok = false;   // balance condition along the chain and the final two bounds
  std::vector<std::string> notes;
  bool all_ok() const { return h1 && h2 && h3 && h4 && h5 && h6 && h7 && atoms_ok && balance_ok; }
};

// Throws std::invalid_argument when parameters or the covering hypothesis fail.
ProtoHaarCertificate construct_protohaar(const FiltrationTree& tree, const AtomCollection& e, int atom,
                                         const ProtoHaarParams& prm);

struct MonotoneReport {
  bool ok = true;
  std::string violation;
  int strata_checked = 0;
};
MonotoneReport verify_monotone_projections(const ProtoHaarCertificate& cert, const AtomCollection& e);

nlohmann::json certificate_to_json(const ProtoHaarCertificate& cert, const AtomCollection& e);

}  // namespace mtype
