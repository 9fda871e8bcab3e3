#pragma once
#include "mtype/tree.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace mtype {

enum class Kind { E, C, B, Generic };
const char* kind_name(Kind k);

// A member is a point set (leaf range) together with the atom it came from:
// the atom itself for E and C, and the split atom A for a member A \ A* of B.
struct Member {
  Interval set;
  int atom = -1;
};

// A family of point sets over one tree. Members are deduplicated by point set and kept
// sorted by (lo ascending, hi descending), so a nested family reads as a preorder forest.
class AtomCollection {
 public:
  AtomCollection() = default;
  AtomCollection(const FiltrationTree& tree, Kind kind, std::vector<Member> members);

  const FiltrationTree& tree() const { return *tree_; }
  Kind kind() const { return kind_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  const Member& operator[](int i) const { return members_[i]; }
  const std::vector<Member>& members() const { return members_; }
  Q mass(int i) const { return tree_->mass(members_[i].set); }
  Q mass(const std::vector<int>& idx) const;  // members assumed pairwise disjoint
  int find(const Interval& set) const;        // -1 when absent

  bool nested() const { return nested_; }
  int forest_parent(int i) const { return parent_[i]; }
  int subtree_end(int i) const { return skip_[i]; }

  // Maximal members strictly inside s.
  std::vector<int> g1(const Interval& s) const;
  // G_1 .. G_k, iterating maximal strict submembers.
  std::vector<std::vector<int>> generations(const Interval& s, int k) const;
  std::vector<int> generation(const Interval& s, int k) const;

  // Members of the given indices as a new collection of the same tree.
  AtomCollection subset(const std::vector<int>& idx, Kind kind = Kind::Generic) const;
  // Order used by greedy procedures: shallower first, then heavier, then atom index.
  bool precedes(int a, int b) const;

 private:
  const FiltrationTree* tree_ = nullptr;
  Kind kind_ = Kind::Generic;
  std::vector<Member> members_;
  std::vector<int> parent_;
  std::vector<int> skip_;
  std::vector<int> depth_;
  bool nested_ = true;
};

struct DerivedCollections {
  AtomCollection E;  // non-largest children; Omega included only if requested
  AtomCollection C;  // largest children A*
  AtomCollection B;  // A \ A* for atoms that split
};

DerivedCollections derive_collections(const FiltrationTree& tree, bool include_omega = false);
AtomCollection error_collection(const FiltrationTree& tree, bool include_omega = false);

// Sum over members J inside I of P(J)/P(I), maximised over I. Two independent routes.
Q carleson_constant(const AtomCollection& r);
Q carleson_constant_naive(const AtomCollection& r);

std::vector<std::pair<int, Q>> carleson_growth(const std::function<FiltrationTree(int)>& generator,
                                               const std::vector<int>& depths);

// Mass of the k-th generation below every atom against 2^-k P(A); returns violations.
std::vector<std::string> check_generation_decay(const FiltrationTree& tree, const AtomCollection& e);

// Structural facts linking B, C and E; returns a list of violated statements.
std::vector<std::string> check_collection_links(const FiltrationTree& tree);

}  // namespace mtype
