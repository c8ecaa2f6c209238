#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "moduli/extremize.hpp"
#include "moduli/norm.hpp"

namespace moduli {

enum class ModulusFamily {
  delta,
  rho,
  banas,
  lambda_minus,
  lambda_plus,
  phi_minus,
  phi_plus,
  zeta_minus,
  zeta_plus,
  gamma_minus,
  gamma_plus,
  d_minus,
  d_plus,
  milman_minus,
  milman_plus,
  delta_t,
  beta_t,
};

/// Closed interval of legal arguments; `upper` may be +∞.
struct Domain {
  double lower;
  double upper;

  bool contains(double eps) const { return eps >= lower && eps <= upper; }
  std::string describe() const;
};

/// A modulus together with its parameter t (only for delta-t / beta-t).
class ModulusKind {
 public:
  ModulusKind(ModulusFamily family) : family_(family) {}  // NOLINT(google-explicit-constructor)

  static ModulusKind delta_t(double t) { return ModulusKind(ModulusFamily::delta_t, t); }
  static ModulusKind beta_t(double t) { return ModulusKind(ModulusFamily::beta_t, t); }

  /// "phi-minus", "delta-t(0.25)", ...
  static ModulusKind parse(std::string_view name);
  static std::vector<std::string> names();

  ModulusFamily family() const { return family_; }
  double t() const { return t_; }
  std::string name() const;

  Mode mode() const;
  Domain domain() const;
  /// Value at ε = 0 (0 for every kind except the hypotenuse moduli, which give 1).
  double value_at_zero() const;

  friend bool operator==(const ModulusKind& a, const ModulusKind& b) {
    return a.family_ == b.family_ && a.t_ == b.t_;
  }

 private:
  ModulusKind(ModulusFamily family, double t);

  ModulusFamily family_;
  double t_ = 0;
};

/// A point of the configuration space of one modulus. Which fields are
/// meaningful depends on the kind:
///   chord kinds (δ, Banaś, δ(·,t), β(·,t), φ±, γ±, d±): theta is x, theta2
///     the partner on the sphere at chord ε found on `side` (+1 ccw, −1 cw)
///     with the lower or upper root of the chord equation; j1/j2 pick
///     endpoints of J(x), J(partner); (s, t) parametrize them for d−.
///   λ±, ζ±: theta is x, theta2 the angle of the quasi-normal y, sign its sign.
///   ρ, Milman: theta is x, theta2 is y.
struct Configuration {
  double theta = 0;
  double theta2 = 0;
  int side = 1;
  int root = 0;
  int sign = 1;
  int j1 = 0;
  int j2 = 0;
  double s = 0;
  double t = 0;
  /// Refinement tolerance of a nested (inner) extremization, if any.
  double inner_tol = 0;
};

nlohmann::json configuration_to_json(const Configuration& c);
Configuration configuration_from_json(const nlohmann::json& j);

struct CurveSample {
  double eps = 0;
  double value = 0;
  int grid_n = 0;
  double refine_tol = 0;
  Configuration witness;
};

struct ModulusCurve {
  ModulusKind kind;
  Norm norm;
  std::vector<CurveSample> samples;
};

struct ModulusOptions {
  int grid_n = 1024;
  int refine_rounds = 6;
  int keep = 8;
  /// Interior directions sampled in a non-degenerate quasi-normal cone.
  int cone_samples = 17;
  /// Resolution of the (s, t) minimization over support segments for d−.
  int segment_grid_n = 33;
  int segment_refine_rounds = 3;
  /// Inner (y) resolution of the nested searches for ρ and Milman's moduli.
  int inner_grid_n = 256;
};

/// Value of one modulus of `norm` at `eps`, with the witness configuration.
/// Throws DomainError for eps outside kind.domain().
CurveSample modulus(const Norm& norm, const ModulusKind& kind, double eps,
                    const ModulusOptions& options = {});

/// Pointwise modulus over a strictly increasing grid; computed in parallel,
/// identical to sequential evaluation.
ModulusCurve modulus_curve(const Norm& norm, const ModulusKind& kind, std::span<const double> eps_grid,
                           const ModulusOptions& options = {});

/// Re-evaluates the modulus objective at a fixed configuration.
double evaluate_configuration(const Norm& norm, const ModulusKind& kind, double eps,
                              const Configuration& config, const ModulusOptions& options = {});

/// Euclidean-plane closed form of the modulus.
double hilbert_reference(const ModulusKind& kind, double eps);

/// Chord partner: the point z = sphere_point(θ + side·s) with ‖x − z‖ = ε,
/// s ∈ [0, π]. root 0 returns the smallest such s, root 1 the largest
/// (they differ only where the chord length is locally constant).
std::optional<double> chord_partner(const Norm& norm, double theta, double eps, int side, int root);

struct AreaAdditivity {
  double a1;
  double a2;
  double a3;
  double defect;
};

/// Shoelace areas of the unit sphere f¹, of the tangent curve f² = ε·t(f¹)
/// and of f¹ + f². Smooth norms only (UnsupportedError otherwise).
AreaAdditivity area_additivity_check(const Norm& norm, double eps, int samples);

/// Unit-ball area by the shoelace formula on `samples` sphere points.
double unit_ball_area(const Norm& norm, int samples);

}  // namespace moduli
