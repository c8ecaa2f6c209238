#include "moduli/norm_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace moduli {

namespace {

using nlohmann::json;

json exponent_to_json(double p) {
  if (std::isinf(p)) return "inf";
  return p;
}

double exponent_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "∞") return std::numeric_limits<double>::infinity();
    throw InputError("norm JSON: exponent string must be \"inf\"");
  }
  if (!j.is_number()) throw InputError("norm JSON: exponent must be a number or \"inf\"");
  return j.get<double>();
}

double parse_real(std::string_view s) {
  if (s == "inf" || s == "infinity" || s == "∞") return std::numeric_limits<double>::infinity();
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InputError("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open norm file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("norm file '" + path + "': " + e.what());
  }
}

Norm polygon_from_json_vertices(const json& arr) {
  if (!arr.is_array()) throw InputError("norm JSON: vertices must be an array");
  std::vector<Vector2d> vs;
  for (const auto& v : arr) {
    if (!v.is_array() || v.size() != 2) throw InputError("norm JSON: vertex must be [x, y]");
    vs.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  return Norm::polygon(std::move(vs));
}

}  // namespace

json norm_to_json(const Norm& norm) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, kinds::Euclidean>) {
          return {{"kind", "euclidean"}};
        } else if constexpr (std::is_same_v<K, kinds::Lp<double>>) {
          return {{"kind", "lp"}, {"p", exponent_to_json(k.p)}};
        } else if constexpr (std::is_same_v<K, kinds::WeightedLp<double>>) {
          return {{"kind", "weighted-lp"}, {"p", exponent_to_json(k.p)}, {"w", {k.w1, k.w2}}};
        } else {
          json vs = json::array();
          for (const auto& v : k.vertices) vs.push_back({v(0), v(1)});
          return {{"kind", "polygon"}, {"vertices", vs}};
        }
      },
      norm.kind());
}

Norm norm_from_json(const json& j) {
  if (j.is_array()) return polygon_from_json_vertices(j);
  if (!j.is_object() || !j.contains("kind")) throw InputError("norm JSON: missing \"kind\"");
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "euclidean") return Norm::euclidean();
    if (kind == "lp") return Norm::lp(exponent_from_json(j.at("p")));
    if (kind == "weighted-lp") {
      const auto& w = j.at("w");
      if (!w.is_array() || w.size() != 2) throw InputError("norm JSON: w must be [w1, w2]");
      return Norm::weighted_lp(exponent_from_json(j.at("p")), w[0].get<double>(), w[1].get<double>());
    }
    if (kind == "polygon") return polygon_from_json_vertices(j.at("vertices"));
    throw InputError("norm JSON: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw InputError(std::string("norm JSON: ") + e.what());
  }
}

std::string norm_label(const Norm& norm) {
  std::ostringstream os;
  os.precision(6);
  std::visit(
      [&os](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, kinds::Euclidean>) {
          os << "euclidean";
        } else if constexpr (std::is_same_v<K, kinds::Lp<double>>) {
          os << "lp(";
          if (std::isinf(k.p)) {
            os << "inf";
          } else {
            os << k.p;
          }
          os << ")";
        } else if constexpr (std::is_same_v<K, kinds::WeightedLp<double>>) {
          os << "weighted-lp(" << k.p << "; " << k.w1 << ", " << k.w2 << ")";
        } else {
          os << "polygon(" << k.vertices.size() << ")";
        }
      },
      norm.kind());
  return os.str();
}

Norm parse_norm_spec(std::string_view spec) {
  const std::string s(spec);
  if (s.empty()) throw InputError("empty norm spec");
  if (s.front() == '{' || s.front() == '[') {
    try {
      return norm_from_json(json::parse(s));
    } catch (const json::parse_error& e) {
      throw InputError(std::string("inline norm JSON: ") + e.what());
    }
  }
  if (s == "euclidean") return Norm::euclidean();
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string rest = colon == std::string::npos ? std::string() : s.substr(colon + 1);
  if (head == "lp") {
    if (rest.empty()) throw InputError("lp spec needs an exponent, e.g. lp:3");
    return Norm::lp(parse_real(rest));
  }
  if (head == "weighted-lp") {
    const auto c2 = rest.find(':');
    const auto comma = rest.find(',');
    if (c2 == std::string::npos || comma == std::string::npos || comma < c2) {
      throw InputError("weighted-lp spec must be weighted-lp:<p>:<w1>,<w2>");
    }
    return Norm::weighted_lp(parse_real(std::string_view(rest).substr(0, c2)),
                             parse_real(std::string_view(rest).substr(c2 + 1, comma - c2 - 1)),
                             parse_real(std::string_view(rest).substr(comma + 1)));
  }
  if (head == "regular") {
    const double n = parse_real(rest);
    if (n != std::floor(n)) throw InputError("regular:<n> needs an integer vertex count");
    return Norm::regular_polygon(static_cast<int>(n));
  }
  if (head == "hexagon") return Norm::regular_polygon(6);
  if (head == "octagon") return Norm::regular_polygon(8);
  if (head == "polygon") return norm_from_json(read_json_file(rest));
  if (s.size() > 5 && s.ends_with(".json")) return norm_from_json(read_json_file(s));
  throw InputError("unrecognized norm spec '" + s + "'");
}

}  // namespace moduli
