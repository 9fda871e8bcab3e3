#pragma once
#include "mtype/rational.hpp"

#include <cstdint>
#include "json.hpp"
#include <stdexcept>
#include <string>
#include <vector>

namespace mtype {

// Half-open range [lo, hi) of leaf indices. With leaves in depth-first order every
// atom, and every union of trailing siblings, is such a range.
struct Interval {
  int lo = 0;
  int hi = 0;
  int size() const { return hi - lo; }
  bool empty() const { return hi <= lo; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool strictly_contains(const Interval& o) const { return contains(o) && (lo != o.lo || hi != o.hi); }
  bool disjoint(const Interval& o) const { return hi <= o.lo || o.hi <= lo; }
  bool contains_leaf(int leaf) const { return lo <= leaf && leaf < hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

class TreeError : public std::runtime_error {
 public:
  TreeError(const std::string& path, const std::string& what)
      : std::runtime_error("atom '" + path + "': " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Nested description used to build trees: a probability and an ordered child list.
struct TreeSpec {
  Q p;
  std::vector<TreeSpec> children;
};

class FiltrationTree {
 public:
  struct Atom {
    int level = 0;
    Q prob;
    int parent = -1;
    int rank = 0;  // position among siblings; rank 0 is the largest child A*
    std::vector<int> children;
    Interval leaves;
  };

  FiltrationTree() = default;
  explicit FiltrationTree(const TreeSpec& spec);

  int size() const { return static_cast<int>(atoms_.size()); }
  int depth() const { return depth_; }
  int root() const { return 0; }
  const Atom& atom(int id) const { return atoms_[id]; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  int leaf_count() const { return static_cast<int>(leaf_atoms_.size()); }
  int leaf_atom(int leaf) const { return leaf_atoms_[leaf]; }
  const Q& leaf_prob(int leaf) const { return atoms_[leaf_atoms_[leaf]].prob; }
  const std::vector<double>& leaf_probs_d() const { return leaf_prob_d_; }
  const std::vector<int>& level_atoms(int n) const { return levels_[n]; }

  int num_children(int id) const { return static_cast<int>(atoms_[id].children.size()); }
  bool internal(int id) const { return !atoms_[id].children.empty(); }
  int star(int id) const { return atoms_[id].children.front(); }
  // Leaves of A minus its largest child; empty when A does not split.
  Interval tilde(int id) const;

  // Probability of a leaf range, exact.
  Q mass(const Interval& iv) const { return prefix_[iv.hi] - prefix_[iv.lo]; }
  double mass_d(const Interval& iv) const { return prefix_d_[iv.hi] - prefix_d_[iv.lo]; }

  // Level-n atom containing the given leaf.
  int ancestor_at(int leaf, int n) const { return anc_[static_cast<size_t>(n) * leaf_count() + leaf]; }

  // Total order: level ascending, probability descending, construction index.
  bool precedes(int a, int b) const;

  std::string path(int id) const;
  int find_path(const std::string& path) const;  // throws TreeError if absent

  TreeSpec to_spec() const;
  bool same_structure(const FiltrationTree& other) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<std::vector<int>> levels_;
  std::vector<int> leaf_atoms_;
  std::vector<Q> prefix_;
  std::vector<double> prefix_d_;
  std::vector<double> leaf_prob_d_;
  std::vector<int> anc_;
  int depth_ = 0;
};

FiltrationTree build_dyadic(int depth);
FiltrationTree build_chain(int depth, const Q& delta);
FiltrationTree build_random(int depth, int max_children, std::uint64_t seed, bool distinct = true);

nlohmann::json tree_to_json(const FiltrationTree& t);
FiltrationTree tree_from_json(const nlohmann::json& j);
FiltrationTree load_tree(const std::string& file);
void save_tree(const FiltrationTree& t, const std::string& file);

}  // namespace mtype
