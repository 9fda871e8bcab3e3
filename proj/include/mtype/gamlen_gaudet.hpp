#pragma once
#include "mtype/carleson_toolkit.hpp"
#include "mtype/protohaar.hpp"

#include <string>
#include <vector>

namespace mtype {

// Accuracy of the sign functions (eps_h, k) and of the condensation (eps_tilde).
struct GGParams {
  Q eps_h;
  Q eps_tilde;
  int k = 2;
  std::string rule;
};
// Conservative choice making (1/2 - eps - eps~)^q >= 2^-q - eps^ for all q <= n, eps = eps~.
GGParams conservative_gg_params(int n, const Q& delta);
// Coarse choice that keeps the required tree depth at desk scale; the built system is
// verified condition by condition, so correctness does not rest on the choice.
GGParams desk_gg_params(int n, const Q& delta);

// Dyadic interval of length 2^-level with index pos.
struct Dyadic {
  int level = 0;
  int pos = 0;
  Q length() const { return pow2(-level); }
  bool contains(const Dyadic& o) const { return o.level >= level && (o.pos >> (o.level - level)) == pos; }
  bool meets(const Dyadic& o) const { return contains(o) || o.contains(*this); }
  std::string name() const;
};

struct GGSystem {
  const FiltrationTree* tree = nullptr;
  AtomCollection e;  // E without Omega
  int n = 0;
  Q delta, eps_d;    // eps_d = delta 2^-(n+1)
  GGParams params;
  int seed_atom = -1;
  std::vector<std::vector<std::vector<int>>> b;     // b[level][pos] -> atom ids
  std::vector<std::vector<SimpleFunction>> g;       // g[level][pos] for level < n
  std::vector<std::vector<Q>> b_mass;
  int s = 0;
  int big_k = 6;
  CondensationResult condensation;

  const std::vector<int>& coll(const Dyadic& d) const { return b[d.level][d.pos]; }
  const SimpleFunction& fn(const Dyadic& d) const { return g[d.level][d.pos]; }
};

struct GGBuild {
  bool feasible = false;
  std::string reason;
  GGSystem system;
};
GGBuild build_gg_system(const FiltrationTree& tree, int n, const Q& delta, const GGParams& params);
GGBuild build_gg_system(const FiltrationTree& tree, int n, const Q& delta);

struct A8Report {
  bool ok = true;
  std::vector<std::string> violations;
  // owner[m][atom] = index into the list of sign functions, -1 if none; atoms of level m
  std::vector<std::vector<int>> owner;
};
A8Report verify_A8(const GGSystem& sys);

struct HolderRow {
  Dyadic interval;
  double lhs = 0, rhs = 0;
};
std::vector<HolderRow> verify_A9_holder(const GGSystem& sys, double p);

struct GGVerification {
  bool cond[11] = {};    // cond[1..10]
  bool a2_strict = false;
  bool induction_ok = false;
  bool tail_ok = false;  // (1-delta) 2^-n P(A0) <= P(B_I*) at the finest level
  std::vector<Q> variation;       // per sign function, exact
  std::vector<std::string> notes;
  bool all() const {
    for (int i = 1; i <= 10; ++i)
      if (!cond[i]) return false;
    return true;
  }
};
GGVerification verify_gg_system(const GGSystem& sys);

struct TransferReport {
  bool pieces_constant = true;
  bool distribution_match = false;
  bool labelled_match = false;
  std::vector<Q> u_len, v_len;  // |U_I| and |V_I| per finest interval
  Q w_u, w_v, w_b;
  double haar_norm_p = 0;       // || sum x_J h_J ||_p^p on [0,1]
  double wu_integral = 0;       // (1-delta)^-1 int over W_U of the transferred function
  double wv_integral = 0;
  double f_norm_p = 0;          // int over Omega of ||f||^p
  double diff_sum = 0;          // sum of ||n-th difference of f||_p^p
  double diff_sum_split = 0;    // the same, summed sign function by sign function
  double type_ratio_p = 0;      // f_norm_p / diff_sum
  double gap_term = 0;          // n delta / (1-delta) max ||x_J||
  double bound = 0;
  bool chain_ok = false;
};
TransferReport transfer_check(const GGSystem& sys, const std::vector<Vec>& x, double p, const NormedSpace& space);

nlohmann::json gg_system_to_json(const GGSystem& sys);
// Rebuilds the sign functions from the stored collections.
GGSystem gg_system_from_json(const FiltrationTree& tree, const nlohmann::json& j);

std::vector<Dyadic> dyadics_up_to(int level);

}  // namespace mtype
