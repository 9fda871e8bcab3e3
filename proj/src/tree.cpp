#include "mtype/tree.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace mtype {

namespace {

std::string join_path(const std::string& parent, int rank) {
  return parent.empty() ? std::to_string(rank) : parent + "/" + std::to_string(rank);
}

Q canon(Q q) {
  q.canonicalize();
  return q;
}

}  // namespace

FiltrationTree::FiltrationTree(const TreeSpec& spec) {
  if (canon(spec.p) != 1) throw TreeError("", "root probability must be 1, got " + to_string(spec.p));

  struct Pending {
    const TreeSpec* spec;
    int parent;
    int rank;
    int level;
    std::string path;
  };
  std::deque<Pending> queue{{&spec, -1, 0, 0, ""}};
  std::vector<const TreeSpec*> specs;
  std::vector<std::string> paths;
  while (!queue.empty()) {
    Pending cur = std::move(queue.front());
    queue.pop_front();
    const TreeSpec& s = *cur.spec;
    if (s.p <= 0) throw TreeError(cur.path, "probability must be positive, got " + to_string(s.p));
    int id = static_cast<int>(atoms_.size());
    Atom a;
    a.level = cur.level;
    a.prob = canon(s.p);
    a.parent = cur.parent;
    a.rank = cur.rank;
    atoms_.push_back(std::move(a));
    specs.push_back(&s);
    paths.push_back(cur.path);
    if (cur.parent >= 0) atoms_[cur.parent].children.push_back(id);
    depth_ = std::max(depth_, cur.level);
    if (!s.children.empty()) {
      Q sum = 0;
      for (size_t j = 0; j < s.children.size(); ++j) {
        const TreeSpec& c = s.children[j];
        sum += canon(c.p);
        if (j > 0 && canon(c.p) > canon(s.children[j - 1].p))
          throw TreeError(join_path(cur.path, static_cast<int>(j)),
                          "children must be listed by nonincreasing probability");
      }
      if (sum != canon(s.p))
        throw TreeError(cur.path, "children probabilities sum to " + to_string(sum) + ", expected " + to_string(s.p));
      for (size_t j = 0; j < s.children.size(); ++j)
        queue.push_back({&s.children[j], id, static_cast<int>(j), cur.level + 1, join_path(cur.path, static_cast<int>(j))});
    }
  }
  for (int id = 0; id < size(); ++id)
    if (atoms_[id].level < depth_ && atoms_[id].children.empty())
      throw TreeError(paths[id], "leaf at level " + std::to_string(atoms_[id].level) + " but tree depth is " +
                                     std::to_string(depth_) + "; unsplit atoms need a single child copy");

  levels_.assign(depth_ + 1, {});
  for (int id = 0; id < size(); ++id) levels_[atoms_[id].level].push_back(id);

  // depth-first leaf numbering
  std::vector<int> stack{0};
  std::vector<int> order;
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    order.push_back(id);
    const auto& ch = atoms_[id].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  for (int id : order)
    if (atoms_[id].children.empty()) {
      atoms_[id].leaves = {static_cast<int>(leaf_atoms_.size()), static_cast<int>(leaf_atoms_.size()) + 1};
      leaf_atoms_.push_back(id);
    }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Atom& a = atoms_[*it];
    if (!a.children.empty()) a.leaves = {atoms_[a.children.front()].leaves.lo, atoms_[a.children.back()].leaves.hi};
  }

  int L = leaf_count();
  prefix_.assign(L + 1, Q(0));
  prefix_d_.assign(L + 1, 0.0);
  leaf_prob_d_.resize(L);
  for (int i = 0; i < L; ++i) {
    prefix_[i + 1] = prefix_[i] + leaf_prob(i);
    leaf_prob_d_[i] = to_double(leaf_prob(i));
    prefix_d_[i + 1] = prefix_d_[i] + leaf_prob_d_[i];
  }
  anc_.assign(static_cast<size_t>(depth_ + 1) * L, -1);
  for (int id = 0; id < size(); ++id) {
    const Atom& a = atoms_[id];
    for (int leaf = a.leaves.lo; leaf < a.leaves.hi; ++leaf) anc_[static_cast<size_t>(a.level) * L + leaf] = id;
  }
}

Interval FiltrationTree::tilde(int id) const {
  const Atom& a = atoms_[id];
  if (a.children.size() < 2) return {a.leaves.hi, a.leaves.hi};
  return {atoms_[a.children.front()].leaves.hi, a.leaves.hi};
}

bool FiltrationTree::precedes(int a, int b) const {
  const Atom& x = atoms_[a];
  const Atom& y = atoms_[b];
  if (x.level != y.level) return x.level < y.level;
  if (x.prob != y.prob) return x.prob > y.prob;
  return a < b;
}

std::string FiltrationTree::path(int id) const {
  std::vector<int> ranks;
  for (int cur = id; atoms_[cur].parent >= 0; cur = atoms_[cur].parent) ranks.push_back(atoms_[cur].rank);
  std::string out;
  for (auto it = ranks.rbegin(); it != ranks.rend(); ++it) {
    if (!out.empty()) out += '/';
    out += std::to_string(*it);
  }
  return out;
}

int FiltrationTree::find_path(const std::string& path) const {
  int cur = 0;
  if (path.empty() || path == "/") return cur;
  std::stringstream ss(path);
  std::string part;
  std::string walked;
  while (std::getline(ss, part, '/')) {
    if (part.empty()) continue;
    int r = -1;
    try {
      size_t used = 0;
      r = std::stoi(part, &used);
      if (used != part.size()) r = -1;
    } catch (...) {
      r = -1;
    }
    walked = join_path(walked, r);
    if (r < 0 || r >= num_children(cur)) throw TreeError(path, "no such atom (failed at '" + walked + "')");
    cur = atoms_[cur].children[r];
  }
  return cur;
}

TreeSpec FiltrationTree::to_spec() const {
  std::function<TreeSpec(int)> rec = [&](int id) {
    TreeSpec s{atoms_[id].prob, {}};
    for (int c : atoms_[id].children) s.children.push_back(rec(c));
    return s;
  };
  return rec(0);
}

bool FiltrationTree::same_structure(const FiltrationTree& o) const {
  if (size() != o.size() || depth_ != o.depth_) return false;
  for (int i = 0; i < size(); ++i) {
    const Atom &a = atoms_[i], &b = o.atoms_[i];
    if (a.prob != b.prob || a.parent != b.parent || a.children != b.children || a.level != b.level) return false;
  }
  return true;
}

FiltrationTree build_dyadic(int depth) {
  if (depth < 1) throw std::invalid_argument("dyadic depth must be >= 1");
  std::function<TreeSpec(int, const Q&)> rec = [&](int level, const Q& p) {
    TreeSpec s{p, {}};
    if (level < depth) {
      Q half = p / 2;
      s.children.push_back(rec(level + 1, half));
      s.children.push_back(rec(level + 1, half));
    }
    return s;
  };
  return FiltrationTree(rec(0, Q(1)));
}

FiltrationTree build_chain(int depth, const Q& delta) {
  if (depth < 1) throw std::invalid_argument("chain depth must be >= 1");
  if (delta <= 0 || delta >= 1) throw std::invalid_argument("chain delta must lie in (0,1), got " + to_string(delta));
  // Atoms that have stopped splitting are carried down as single-child copies.
  std::function<TreeSpec(int, const Q&)> carry = [&](int level, const Q& p) {
    TreeSpec s{p, {}};
    if (level < depth) s.children.push_back(carry(level + 1, p));
    return s;
  };
  std::function<TreeSpec(int, const Q&)> split = [&](int level, const Q& p) {
    TreeSpec s{p, {}};
    if (level == depth) return s;
    Q a = (1 - delta) * p, b = delta * p;
    if (b > a) std::swap(a, b);
    s.children.push_back(split(level + 1, a));
    s.children.push_back(carry(level + 1, b));
    return s;
  };
  return FiltrationTree(split(0, Q(1)));
}

FiltrationTree build_random(int depth, int max_children, std::uint64_t seed, bool distinct) {
  if (depth < 1) throw std::invalid_argument("random depth must be >= 1");
  if (max_children < 2) throw std::invalid_argument("max_children must be >= 2");
  std::mt19937_64 rng(seed);
  std::function<TreeSpec(int, const Q&)> rec = [&](int level, const Q& p) {
    TreeSpec s{p, {}};
    if (level == depth) return s;
    // the root always splits so that the derived collections are nonempty
    int lo = level == 0 ? 2 : 1;
    int n = std::uniform_int_distribution<int>(lo, max_children)(rng);
    std::vector<long> w;
    if (distinct) {
      std::set<long> used;
      long range = 4L * n + 4;
      while (static_cast<int>(used.size()) < n) used.insert(std::uniform_int_distribution<long>(1, range)(rng));
      w.assign(used.begin(), used.end());
    } else {
      for (int i = 0; i < n; ++i) w.push_back(std::uniform_int_distribution<long>(1, 4)(rng));
    }
    std::sort(w.begin(), w.end(), std::greater<>());
    long total = 0;
    for (long x : w) total += x;
    for (long x : w) {
      Q share(x, total);
      share.canonicalize();
      s.children.push_back(rec(level + 1, p * share));
    }
    return s;
  };
  return FiltrationTree(rec(0, Q(1)));
}

nlohmann::json tree_to_json(const FiltrationTree& t) {
  std::function<nlohmann::json(int)> rec = [&](int id) {
    nlohmann::json j;
    j["p"] = to_string(t.atom(id).prob);
    if (t.internal(id)) {
      j["children"] = nlohmann::json::array();
      for (int c : t.atom(id).children) j["children"].push_back(rec(c));
    }
    return j;
  };
  return rec(0);
}

FiltrationTree tree_from_json(const nlohmann::json& j) {
  std::function<TreeSpec(const nlohmann::json&, const std::string&)> rec = [&](const nlohmann::json& node,
                                                                                const std::string& path) {
    if (!node.is_object()) throw TreeError(path, "expected an object");
    if (!node.contains("p")) throw TreeError(path, "missing field 'p'");
    const auto& pj = node.at("p");
    TreeSpec s;
    try {
      if (pj.is_string())
        s.p = parse_rational(pj.get<std::string>());
      else if (pj.is_number_integer())
        s.p = Q(pj.get<long>());
      else
        throw std::invalid_argument("'p' must be a rational string like \"1/2\"");
    } catch (const std::invalid_argument& e) {
      throw TreeError(path, e.what());
    }
    if (node.contains("children")) {
      const auto& ch = node.at("children");
      if (!ch.is_array()) throw TreeError(path, "'children' must be an array");
      for (size_t i = 0; i < ch.size(); ++i) s.children.push_back(rec(ch[i], join_path(path, static_cast<int>(i))));
    }
    return s;
  };
  return FiltrationTree(rec(j, ""));
}

FiltrationTree load_tree(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open tree file '" + file + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed JSON in '" + file + "': " + e.what());
  }
  return tree_from_json(j);
}

void save_tree(const FiltrationTree& t, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write '" + file + "'");
  out << tree_to_json(t).dump() << "\n";
}

}  // namespace mtype
