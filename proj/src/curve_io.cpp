#include "moduli/curve_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "moduli/norm_io.hpp"

namespace moduli {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view first_line(std::string_view text) {
  const auto nl = text.find('\n');
  std::string_view line = text.substr(0, nl);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

double parse_double(const std::string& field, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw InputError("curve CSV row " + std::to_string(row) + ": bad number '" + field + "'");
  }
}

}  // namespace

std::string curve_to_csv(const ModulusCurve& curve, bool with_hilbert) {
  std::string out = with_hilbert ? "eps,value,grid_n,refine_tol,hilbert\n" : "eps,value,grid_n,refine_tol\n";
  for (const auto& s : curve.samples) {
    out += g17(s.eps) + "," + g17(s.value) + "," + std::to_string(s.grid_n) + "," + g17(s.refine_tol);
    if (with_hilbert) out += "," + g17(hilbert_reference(curve.kind, s.eps));
    out += "\n";
  }
  return out;
}

bool csv_has_hilbert(std::string_view text) {
  return first_line(text) == "eps,value,grid_n,refine_tol,hilbert";
}

ModulusCurve curve_from_csv(std::string_view text, const ModulusKind& kind, const Norm& norm) {
  const std::string_view header = first_line(text);
  const bool hilbert = csv_has_hilbert(text);
  if (!hilbert && header != "eps,value,grid_n,refine_tol") {
    throw InputError("curve CSV: unexpected header '" + std::string(header) + "'");
  }
  ModulusCurve curve{kind, norm, {}};
  std::istringstream in{std::string(text)};
  std::string line;
  std::getline(in, line);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    if (fields.size() != (hilbert ? 5u : 4u)) {
      throw InputError("curve CSV row " + std::to_string(row) + ": wrong field count");
    }
    CurveSample s;
    s.eps = parse_double(fields[0], row);
    s.value = parse_double(fields[1], row);
    s.grid_n = static_cast<int>(parse_double(fields[2], row));
    s.refine_tol = parse_double(fields[3], row);
    curve.samples.push_back(s);
  }
  return curve;
}

nlohmann::json curve_to_json(const ModulusCurve& curve, bool with_hilbert) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : curve.samples) {
    nlohmann::json j = {{"eps", s.eps},
                        {"value", s.value},
                        {"grid_n", s.grid_n},
                        {"refine_tol", s.refine_tol},
                        {"witness", configuration_to_json(s.witness)}};
    if (with_hilbert) j["hilbert"] = hilbert_reference(curve.kind, s.eps);
    samples.push_back(std::move(j));
  }
  return {{"kind", curve.kind.name()}, {"norm", norm_to_json(curve.norm)}, {"samples", samples}};
}

ModulusCurve curve_from_json(const nlohmann::json& j) {
  try {
    ModulusCurve curve{ModulusKind::parse(j.at("kind").get<std::string>()), norm_from_json(j.at("norm")), {}};
    for (const auto& e : j.at("samples")) {
      CurveSample s;
      s.eps = e.at("eps").get<double>();
      s.value = e.at("value").get<double>();
      s.grid_n = e.at("grid_n").get<int>();
      s.refine_tol = e.at("refine_tol").get<double>();
      if (e.contains("witness")) s.witness = configuration_from_json(e.at("witness"));
      curve.samples.push_back(s);
    }
    return curve;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("curve JSON: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace moduli
