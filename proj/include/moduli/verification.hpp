#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moduli/moduli.hpp"

namespace moduli {

inline constexpr const char* kToolVersion = "0.1.0";

enum class CheckKind { inequality, monotonicity, coincidence, figure, area_additivity, conjecture_probe };
enum class CheckStatus { pass, fail, report_only, skipped };

std::string to_string(CheckKind kind);
std::string to_string(CheckStatus status);

/// One side of an inequality: coef · M(arg(ε)) + offset for a modulus M, or
/// a closed-form function of (norm, ε) when `kind` is empty.
struct Term {
  std::string label;
  std::optional<ModulusKind> kind;
  std::function<double(double)> arg = [](double e) { return e; };
  double coef = 1;
  double offset = 0;
  std::function<double(const Norm&, double)> closed;
};

enum class FigureProperty { projection_bound, identity, lambda_convexity, lambda_range };

struct CheckSpec {
  std::string id;
  CheckKind kind = CheckKind::inequality;
  std::string description;
  std::vector<Norm> norms;
  /// Explicit ε grid; when empty, `grid_points` points on `domain` with the
  /// endpoints moved inward by 1e−6.
  std::vector<double> eps_grid;
  Domain domain{0, 1};
  int grid_points = 33;
  double slack = 0;

  /// inequality: each chain asserts chain[0] ≤ chain[1] ≤ ...;
  /// coincidence: every term of a chain equals the first.
  std::vector<std::vector<Term>> chains;
  /// monotonicity: moduli that must be nondecreasing along the grid.
  std::vector<ModulusKind> monotone;
  /// figure checks.
  FigureProperty figure = FigureProperty::projection_bound;
  int samples = 0;
  double tolerance = 0;
  /// Restricts the check to the Euclidean plane; other norms are skipped.
  bool euclidean_only = false;
};

struct NormOutcome {
  std::string norm;
  CheckStatus status = CheckStatus::pass;
  std::optional<double> worst_margin;
  nlohmann::json witness;
  int instances = 0;
  std::vector<std::string> skipped;
};

struct CheckRecord {
  std::string id;
  CheckKind kind = CheckKind::inequality;
  std::string description;
  CheckStatus status = CheckStatus::pass;
  std::optional<double> worst_margin;
  nlohmann::json witness;
  std::int64_t runtime_ms = 0;
  std::vector<NormOutcome> norms;
  nlohmann::json extra;
};

struct SuiteOptions {
  ModulusOptions modulus;
  double slack = 1e-3;
  std::uint64_t seed = 42;
  /// Write measured runtimes; otherwise runtime_ms is 0 so reports are
  /// reproducible byte for byte.
  bool timings = false;
};

struct VerificationReport {
  nlohmann::json suite;
  std::vector<CheckRecord> checks;
};

/// {euclidean, lp(1), lp(1.5), lp(3), lp(∞), regular hexagon, regular octagon}.
std::vector<Norm> default_norms();

/// Every inequality, monotonicity, coincidence, figure and area check.
std::vector<CheckSpec> default_suite(const std::vector<Norm>& norms, double slack);

/// Keeps the checks named by `tokens`. A token matches a check whose id equals
/// it or whose id begins with `token-`. Unknown tokens raise InputError
/// listing the valid ids.
std::vector<CheckSpec> select_checks(const std::vector<CheckSpec>& all, const std::vector<std::string>& tokens);

/// Runs the checks in order; records are sorted by id.
VerificationReport run_suite(const std::vector<CheckSpec>& specs, const SuiteOptions& options);

bool has_failure(const VerificationReport& report);

nlohmann::json report_to_json(const VerificationReport& report);

/// min over consecutive grid points of γ(ε_{i+1}) − γ(ε_i) for γ⁻ and γ⁺;
/// +∞ for grids with fewer than two points.
double gamma_monotonicity_check(const Norm& norm, const std::vector<double>& eps_grid,
                                const ModulusOptions& options = {});

/// Re-evaluates one side of a witness produced by an inequality check.
/// `side` is "lhs" or "rhs".
double replay_witness_term(const nlohmann::json& witness, const std::string& side,
                           const ModulusOptions& options = {});

struct ProbeFamily {
  int random_polygons = 0;
  int random_lp = 0;
  bool include_euclidean = false;
};

struct ProbeOptions {
  ModulusOptions modulus;
  std::uint64_t seed = 42;
  std::vector<double> eps_grid;  // empty: {0.25, 0.5, ..., 2 − 1e−6}
};

ProbeOptions default_probe_options();

/// Random symmetric polygon with 2m vertices, m ∈ [3, 12], and random lp
/// norms with p ∈ [1.1, 10], drawn in that order from one generator.
std::vector<Norm> sample_probe_norms(const ProbeFamily& family, std::uint64_t seed);

/// Report-only margins of the three conjectures for every sampled norm.
VerificationReport probe_conjectures(const ProbeFamily& family, const ProbeOptions& options);

}  // namespace moduli
