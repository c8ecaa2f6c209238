#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "moduli/norm_io.hpp"
#include "moduli/parallel.hpp"
#include "moduli/verification.hpp"
#include "random.hpp"

namespace moduli {

using json = nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

/// Centrally symmetric polygon with 2m vertices built from m edge vectors
/// with sorted random directions in [0, π) and random lengths; the remaining
/// edges are their negatives. Every vertex is extreme by construction.
std::optional<Norm> random_polygon(std::mt19937_64& gen) {
  const int m = 3 + static_cast<int>(gen() % 10);
  std::vector<double> angles(m);
  std::vector<double> lengths(m);
  for (int i = 0; i < m; ++i) {
    angles[i] = kPi * detail::uniform01(gen);
    lengths[i] = 0.5 + detail::uniform01(gen);
  }
  std::sort(angles.begin(), angles.end());
  for (int i = 0; i < m; ++i) {
    const double gap = i + 1 < m ? angles[i + 1] - angles[i] : angles[0] + kPi - angles[i];
    if (gap < 1e-3) return std::nullopt;
  }
  std::vector<Vector2d> edges;
  for (int i = 0; i < m; ++i) edges.emplace_back(lengths[i] * std::cos(angles[i]), lengths[i] * std::sin(angles[i]));
  for (int i = 0; i < m; ++i) edges.push_back(-edges[i]);
  std::vector<Vector2d> vs{Vector2d::Zero()};
  for (int i = 0; i + 1 < 2 * m; ++i) vs.push_back(vs.back() + edges[i]);
  const Vector2d center = (vs[0] + vs[m]) / 2;
  double radius = 0;
  for (auto& v : vs) {
    v -= center;
    radius = std::max(radius, v.norm());
  }
  for (auto& v : vs) v /= radius;
  try {
    return Norm::polygon(std::move(vs));
  } catch (const RepresentationError&) {
    return std::nullopt;
  }
}

struct NormProbe {
  std::vector<NormOutcome> outcomes;  // one per conjecture
};

json sample_json(const CurveSample& s) {
  return {{"value", s.value}, {"refine_tol", s.refine_tol}, {"configuration", configuration_to_json(s.witness)}};
}

NormProbe probe_norm(const Norm& norm, const std::string& label, const ProbeOptions& options) {
  NormProbe out;
  out.outcomes.resize(3);
  for (auto& o : out.outcomes) {
    o.norm = label;
    o.status = CheckStatus::report_only;
  }
  const json norm_json = norm_to_json(norm);
  auto offer = [](NormOutcome& o, double margin, const std::function<json()>& witness) {
    ++o.instances;
    if (!o.worst_margin || margin < *o.worst_margin) {
      o.worst_margin = margin;
      o.witness = witness();
    }
  };
  for (double eps : options.eps_grid) {
    try {
      auto m = [&](ModulusFamily f) { return modulus(norm, f, eps, options.modulus); };
      const CurveSample gm = m(ModulusFamily::gamma_minus);
      const CurveSample gp = m(ModulusFamily::gamma_plus);
      const double e2 = eps * eps;
      offer(out.outcomes[0], std::min(e2 - gm.value, gp.value - e2), [&] {
        return json{{"norm", norm_json}, {"eps", eps}, {"eps_squared", e2}, {"sigma", gm.refine_tol + gp.refine_tol},
                    {"gamma_minus", sample_json(gm)}, {"gamma_plus", sample_json(gp)}};
      });
      const CurveSample dm = m(ModulusFamily::d_minus);
      const CurveSample dp = m(ModulusFamily::d_plus);
      offer(out.outcomes[1], std::min(eps - dm.value, dp.value - eps), [&] {
        return json{{"norm", norm_json}, {"eps", eps}, {"sigma", dm.refine_tol + dp.refine_tol},
                    {"d_minus", sample_json(dm)}, {"d_plus", sample_json(dp)}};
      });
      const CurveSample zm = m(ModulusFamily::zeta_minus);
      const CurveSample zp = m(ModulusFamily::zeta_plus);
      const CurveSample bm = m(ModulusFamily::milman_minus);
      const CurveSample bp = m(ModulusFamily::milman_plus);
      const double dev = std::max(std::abs(zm.value - 1 - bm.value), std::abs(zp.value - 1 - bp.value));
      offer(out.outcomes[2], -dev, [&] {
        const double sigma = zm.refine_tol + zp.refine_tol + bm.refine_tol + bp.refine_tol;
        return json{{"norm", norm_json},          {"eps", eps}, {"sigma", sigma},
                    {"zeta_minus", sample_json(zm)}, {"milman_minus", sample_json(bm)},
                    {"zeta_plus", sample_json(zp)},  {"milman_plus", sample_json(bp)}};
      });
    } catch (const Error& e) {
      for (auto& o : out.outcomes) o.skipped.push_back("eps " + std::to_string(eps) + ": " + e.what());
    }
  }
  for (auto& o : out.outcomes) {
    if (o.instances == 0) o.status = CheckStatus::skipped;
  }
  return out;
}

}  // namespace

ProbeOptions default_probe_options() {
  ProbeOptions o;
  o.modulus.grid_n = 256;
  o.modulus.inner_grid_n = 128;
  for (int i = 1; i <= 8; ++i) o.eps_grid.push_back(i == 8 ? 2 - 1e-6 : 0.25 * i);
  return o;
}

std::vector<Norm> sample_probe_norms(const ProbeFamily& family, std::uint64_t seed) {
  if (family.random_polygons < 0 || family.random_lp < 0) throw InputError("probe counts must be >= 0");
  auto gen = detail::make_rng(seed, "probe-norms", 0);
  std::vector<Norm> out;
  if (family.include_euclidean) out.push_back(Norm::euclidean());
  for (int i = 0; i < family.random_polygons; ++i) {
    std::optional<Norm> n;
    while (!n) n = random_polygon(gen);
    out.push_back(std::move(*n));
  }
  for (int i = 0; i < family.random_lp; ++i) out.push_back(Norm::lp(1.1 + 8.9 * detail::uniform01(gen)));
  return out;
}

VerificationReport probe_conjectures(const ProbeFamily& family, const ProbeOptions& options) {
  const int count = family.random_polygons + family.random_lp + (family.include_euclidean ? 1 : 0);
  if (count < 1) throw InputError("probe: count must be at least 1");
  ProbeOptions opts = options;
  if (opts.eps_grid.empty()) opts.eps_grid = default_probe_options().eps_grid;

  const auto norms = sample_probe_norms(family, opts.seed);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < norms.size(); ++i) labels.push_back("#" + std::to_string(i) + " " + norm_label(norms[i]));
  const auto probes = parallel_map(norms.size(), [&](std::size_t i) { return probe_norm(norms[i], labels[i], opts); });

  VerificationReport report;
  report.suite = {{"seed", opts.seed},
                  {"grid_n", opts.modulus.grid_n},
                  {"inner_grid_n", opts.modulus.inner_grid_n},
                  {"refine_rounds", opts.modulus.refine_rounds},
                  {"eps_grid", opts.eps_grid},
                  {"family",
                   {{"random_polygons", family.random_polygons},
                    {"random_lp", family.random_lp},
                    {"include_euclidean", family.include_euclidean},
                    {"polygon_sides", "2m, m uniform in [3, 12]"},
                    {"lp_exponent", "uniform in [1.1, 10]"}}},
                  {"tool_version", kToolVersion}};

  const struct {
    const char* id;
    const char* description;
  } conjectures[] = {
      {"conjecture-1-gamma", "gamma-(eps) <= eps^2 <= gamma+(eps); margin min(eps^2 - gamma-, gamma+ - eps^2)"},
      {"conjecture-2-d", "d-(eps) <= eps <= d+(eps); margin min(eps - d-, d+ - eps)"},
      {"conjecture-3-milman",
       "zeta+-(eps) - 1 = Milman beta+-(eps); margin -max |zeta+- - 1 - beta+-|"},
  };
  for (std::size_t c = 0; c < 3; ++c) {
    CheckRecord rec;
    rec.id = conjectures[c].id;
    rec.kind = CheckKind::conjecture_probe;
    rec.description = conjectures[c].description;
    rec.status = CheckStatus::report_only;
    int negative = 0;
    int beyond_tolerance = 0;
    for (const auto& p : probes) {
      const NormOutcome& o = p.outcomes[c];
      if (o.worst_margin && (!rec.worst_margin || *o.worst_margin < *rec.worst_margin)) {
        rec.worst_margin = o.worst_margin;
        rec.witness = o.witness;
      }
      // Conjecture 3 margins are never positive; count visible deviations instead.
      const double threshold = c == 2 ? -1e-3 : 0.0;
      if (o.worst_margin && *o.worst_margin < threshold) ++negative;
      if (o.worst_margin && *o.worst_margin + o.witness.value("sigma", 0.0) < threshold) ++beyond_tolerance;
      rec.norms.push_back(o);
    }
    rec.extra = {{c == 2 ? "norms_with_deviation_above_1e-3" : "norms_with_negative_margin", negative},
                 {"beyond_refine_tolerance", beyond_tolerance}};
    report.checks.push_back(std::move(rec));
  }
  return report;
}

}  // namespace moduli
