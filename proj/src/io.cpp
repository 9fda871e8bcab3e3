#include "mtype/io.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace mtype {

using nlohmann::json;

json function_to_json(const SimpleFunction& f) {
  const FiltrationTree& t = f.tree();
  int s = f.level();
  json values = json::object();
  for (int id : t.level_atoms(s)) {
    json v = json::array();
    for (int c = 0; c < f.dim(); ++c) v.push_back(to_string(f.at(t.atom(id).leaves.lo, c)));
    values[t.path(id)] = v;
  }
  return {{"level", s}, {"values", values}};
}

SimpleFunction function_from_json(const FiltrationTree& tree, const json& j) {
  if (!j.is_object() || !j.contains("level") || !j.contains("values"))
    throw std::invalid_argument("function file needs 'level' and 'values'");
  int s = j.at("level").get<int>();
  if (s < 0 || s > tree.depth()) throw std::invalid_argument("function level outside 0.." + std::to_string(tree.depth()));
  const json& values = j.at("values");
  if (!values.is_object() || values.empty()) throw std::invalid_argument("'values' must be a nonempty object");
  int dim = -1;
  std::set<int> seen;
  SimpleFunction f;
  for (auto it = values.begin(); it != values.end(); ++it) {
    int id = tree.find_path(it.key());
    if (tree.atom(id).level != s) throw TreeError(it.key(), "not an atom of level " + std::to_string(s));
    if (!it.value().is_array() || it.value().empty()) throw TreeError(it.key(), "value must be a nonempty array");
    if (dim < 0) {
      dim = static_cast<int>(it.value().size());
      f = SimpleFunction(tree, dim, s);
    }
    if (static_cast<int>(it.value().size()) != dim) throw TreeError(it.key(), "inconsistent value dimension");
    Vec v;
    for (const json& x : it.value()) v.push_back(parse_rational(x.is_string() ? x.get<std::string>() : x.dump()));
    f.set_on(tree.atom(id).leaves, v);
    seen.insert(id);
  }
  for (int id : tree.level_atoms(s))
    if (!seen.count(id)) throw TreeError(tree.path(id), "missing value");
  return f;
}

json load_json(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(file + ": malformed JSON: " + e.what());
  }
}

SimpleFunction load_function(const FiltrationTree& tree, const std::string& file) {
  return function_from_json(tree, load_json(file));
}

void save_json(const json& j, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << j.dump(2) << "\n";
}

}  // namespace mtype
