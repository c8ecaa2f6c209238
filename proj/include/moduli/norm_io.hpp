#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "moduli/norm.hpp"

namespace moduli {

/// {"kind":"euclidean"} | {"kind":"lp","p":3} | {"kind":"weighted-lp","p":2,"w":[1,2]}
/// | {"kind":"polygon","vertices":[[x,y],...]}. An infinite exponent is
/// written as the string "inf".
nlohmann::json norm_to_json(const Norm& norm);
Norm norm_from_json(const nlohmann::json& j);

/// Short human-readable label, e.g. "lp(3)" or "polygon(6)".
std::string norm_label(const Norm& norm);

/// Parses the command-line norm syntax:
///   euclidean | lp:<p> | lp:inf | weighted-lp:<p>:<w1>,<w2> | regular:<n>
///   | polygon:<file.json> | <file.json> | inline JSON object.
Norm parse_norm_spec(std::string_view spec);

}  // namespace moduli
