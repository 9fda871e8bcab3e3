#pragma once
#include "mtype/martingale.hpp"

#include <string>

namespace mtype {

// {"level": S, "values": {"0/1": ["1/2", "-3/4"], ...}} with one entry for every level-S atom.
nlohmann::json function_to_json(const SimpleFunction& f);
SimpleFunction function_from_json(const FiltrationTree& tree, const nlohmann::json& j);
SimpleFunction load_function(const FiltrationTree& tree, const std::string& file);
void save_json(const nlohmann::json& j, const std::string& file);
nlohmann::json load_json(const std::string& file);

}  // namespace mtype
