#include "moduli/cli.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "moduli/curve_io.hpp"
#include "moduli/norm_io.hpp"
#include "moduli/triangle.hpp"
#include "moduli/verification.hpp"

namespace moduli {

using json = nlohmann::json;

std::vector<double> parse_eps_range(std::string_view spec) {
  std::vector<double> parts;
  std::string s(spec);
  std::istringstream in(s);
  for (std::string f; std::getline(in, f, ':');) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(f, &used));
      if (used != f.size()) throw std::invalid_argument(f);
    } catch (const std::exception&) {
      throw InputError("bad eps range '" + s + "': expected a:b:step");
    }
  }
  if (parts.size() != 3) throw InputError("bad eps range '" + s + "': expected a:b:step");
  const double a = parts[0];
  const double b = parts[1];
  const double step = parts[2];
  if (!(step > 0) || !(b >= a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InputError("bad eps range '" + s + "': need a <= b and step > 0");
  }
  const auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
  if (n > 1000000) throw InputError("eps range '" + s + "' has too many points");
  std::vector<double> grid;
  for (long long i = 0; i <= n; ++i) {
    double v = a + static_cast<double>(i) * step;
    if (std::abs(v - b) <= 1e-9 * std::max(1.0, std::abs(b))) v = b;
    grid.push_back(v);
  }
  return grid;
}

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string f; std::getline(in, f, ',');) {
    if (!f.empty()) out.push_back(f);
  }
  return out;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

struct ComputeArgs {
  std::string norm;
  std::string modulus;
  std::string eps;
  int grid_n = 1024;
  int refine_rounds = 6;
  std::string out;
  std::string format;
  bool with_hilbert = false;
};

int cmd_compute(const ComputeArgs& a, std::ostream& out) {
  const Norm norm = parse_norm_spec(a.norm);
  const ModulusKind kind = ModulusKind::parse(a.modulus);
  const auto grid = parse_eps_range(a.eps);
  ModulusOptions opts;
  opts.grid_n = a.grid_n;
  opts.refine_rounds = a.refine_rounds;
  const ModulusCurve curve = modulus_curve(norm, kind, grid, opts);
  std::string format = a.format;
  if (format.empty()) format = a.out.ends_with(".json") ? "json" : "csv";
  if (format == "json") {
    emit(a.out, curve_to_json(curve, a.with_hilbert).dump(2) + "\n", out);
  } else {
    emit(a.out, curve_to_csv(curve, a.with_hilbert), out);
  }
  return kExitOk;
}

struct VerifyArgs {
  std::vector<std::string> norms;
  std::string checks;
  double slack = 1e-3;
  std::uint64_t seed = 42;
  int grid_n = 1024;
  int refine_rounds = 6;
  std::string out;
  bool timings = false;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<Norm> norms;
  for (const auto& s : a.norms) norms.push_back(parse_norm_spec(s));
  if (norms.empty()) norms = default_norms();
  if (!(a.slack >= 0)) throw InputError("--slack must be >= 0");
  auto specs = default_suite(norms, a.slack);
  if (!a.checks.empty()) specs = select_checks(specs, split_commas(a.checks));
  SuiteOptions opts;
  opts.modulus.grid_n = a.grid_n;
  opts.modulus.refine_rounds = a.refine_rounds;
  opts.slack = a.slack;
  opts.seed = a.seed;
  opts.timings = a.timings;
  const VerificationReport report = run_suite(specs, opts);
  emit(a.out, report_to_json(report).dump(2) + "\n", out);
  for (const auto& c : report.checks) {
    err << to_string(c.status) << "  " << c.id;
    if (c.worst_margin) err << "  worst_margin=" << *c.worst_margin;
    err << "\n";
  }
  return has_failure(report) ? kExitCheckFailed : kExitOk;
}

struct ProbeArgs {
  std::string family = "random-polygons,lp";
  int count = 10;
  std::uint64_t seed = 42;
  int grid_n = 256;
  std::string out;
};

int cmd_probe(const ProbeArgs& a, std::ostream& out) {
  if (a.count < 1) throw InputError("--count must be at least 1");
  ProbeFamily family;
  for (const auto& f : split_commas(a.family)) {
    if (f == "random-polygons") {
      family.random_polygons = a.count;
    } else if (f == "lp") {
      family.random_lp = a.count;
    } else if (f == "euclidean") {
      family.include_euclidean = true;
    } else {
      throw InputError("unknown probe family '" + f + "'; valid: random-polygons, lp, euclidean");
    }
  }
  ProbeOptions opts = default_probe_options();
  opts.seed = a.seed;
  opts.modulus.grid_n = a.grid_n;
  const VerificationReport report = probe_conjectures(family, opts);
  emit(a.out, report_to_json(report).dump(2) + "\n", out);
  return kExitOk;
}

struct FigureArgs {
  std::string norm;
  double theta_x = 0;
  std::optional<double> y_angle;
  int y_sign = 1;
  double eps = 0;
  int samples = 720;
  std::string out;
};

int cmd_figure(const FigureArgs& a, std::ostream& out) {
  const Norm norm = parse_norm_spec(a.norm);
  if (!(a.eps > 0 && a.eps <= 1)) {
    throw DomainError("figure: eps = " + std::to_string(a.eps) + " outside the legal domain (0, 1]");
  }
  if (a.samples < 3) throw InputError("--samples must be at least 3");
  const Vector2d x = norm.sphere_point(a.theta_x);
  const QuasiNormalCone cone = quasi_normals(norm, x);
  const double alpha = a.y_angle.value_or(cone.begin);
  const Vector2d y = (a.y_sign < 0 ? -1.0 : 1.0) * norm.sphere_point(alpha);
  const TriangleFigure fig = build_figure(norm, x, y, a.eps);
  json sphere = json::array();
  for (int i = 0; i < a.samples; ++i) {
    const Vector2d u = norm.sphere_point(2 * std::numbers::pi * i / a.samples);
    sphere.push_back({u(0), u(1)});
  }
  const json doc = {{"norm", norm_to_json(norm)},
                    {"figure", figure_to_json(fig)},
                    {"quasi_normal_cone", {{"begin", cone.begin}, {"width", cone.width}}},
                    {"zy1", norm(Vector2d(fig.y1 - fig.z))},
                    {"p_x_minus_z", pairing(fig.p, Vector2d(fig.x - fig.z))},
                    {"projection_margin", check_projection_bound(norm, fig)},
                    {"sphere", sphere}};
  emit(a.out, doc.dump(2) + "\n", out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric moduli of normed planes", "moduli"};
  app.require_subcommand(1);

  ComputeArgs ca;
  auto* compute = app.add_subcommand("compute", "Compute a modulus curve");
  compute->add_option("--norm", ca.norm, "Norm spec (euclidean, lp:3, lp:inf, regular:6, polygon:file.json, ...)")
      ->required();
  compute->add_option("--modulus", ca.modulus, "Modulus kind, e.g. phi-minus or delta-t(0.25)")->required();
  compute->add_option("--eps", ca.eps, "Grid a:b:step")->required();
  compute->add_option("--grid-n", ca.grid_n, "Coarse grid per angle")->check(CLI::Range(64, 1 << 20));
  compute->add_option("--refine-rounds", ca.refine_rounds, "Refinement rounds")->check(CLI::Range(0, 40));
  compute->add_option("--out", ca.out, "Output path (stdout if omitted)");
  compute->add_option("--format", ca.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  compute->add_flag("--with-hilbert", ca.with_hilbert, "Add the Euclidean closed form");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run the inequality suite");
  verify->add_option("--norm", va.norms, "Norm spec; repeatable (default: the seven standard norms)");
  verify->add_option("--checks", va.checks, "Comma-separated check ids or id prefixes");
  verify->add_option("--slack", va.slack, "Additive slack");
  verify->add_option("--seed", va.seed, "Seed for random figures");
  verify->add_option("--grid-n", va.grid_n, "Coarse grid per angle")->check(CLI::Range(64, 1 << 20));
  verify->add_option("--refine-rounds", va.refine_rounds, "Refinement rounds")->check(CLI::Range(0, 40));
  verify->add_option("--out", va.out, "Report path (stdout if omitted)");
  verify->add_flag("--timings", va.timings, "Record measured runtimes in the report");

  ProbeArgs pa;
  auto* probe = app.add_subcommand("probe", "Probe the conjectures on random norms");
  probe->add_option("--family", pa.family, "Comma list of random-polygons, lp, euclidean");
  probe->add_option("--count", pa.count, "Norms per random family");
  probe->add_option("--seed", pa.seed, "Seed");
  probe->add_option("--grid-n", pa.grid_n, "Coarse grid per angle")->check(CLI::Range(64, 1 << 20));
  probe->add_option("--out", pa.out, "Report path (stdout if omitted)");

  FigureArgs fa;
  auto* figure = app.add_subcommand("figure", "Emit right-angled triangle plot data");
  figure->add_option("--norm", fa.norm, "Norm spec")->required();
  figure->add_option("--theta-x", fa.theta_x, "Angle of x on the sphere");
  figure->add_option("--y-angle", fa.y_angle, "Angle of the quasi-normal y (default: first cone direction)");
  figure->add_option("--y-sign", fa.y_sign, "Sign of y")->check(CLI::IsMember({-1, 1}));
  figure->add_option("--eps", fa.eps, "Offset along y, in (0, 1]")->required();
  figure->add_option("--samples", fa.samples, "Sphere polyline points");
  figure->add_option("--out", fa.out, "Output path (stdout if omitted)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*compute) return cmd_compute(ca, out);
    if (*verify) return cmd_verify(va, out, err);
    if (*probe) return cmd_probe(pa, out);
    if (*figure) return cmd_figure(fa, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace moduli
