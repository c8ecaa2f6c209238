#include "moduli/moduli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "moduli/parallel.hpp"
#include "moduli/triangle.hpp"

namespace moduli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr int kChordSteps = 64;

struct FamilyInfo {
  ModulusFamily family;
  const char* name;
  Mode mode;
  double upper;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr FamilyInfo kFamilies[] = {
    {ModulusFamily::delta, "delta", Mode::inf, 2},
    {ModulusFamily::rho, "rho", Mode::sup, kInf},
    {ModulusFamily::banas, "banas", Mode::sup, 2},
    {ModulusFamily::lambda_minus, "lambda-minus", Mode::inf, 1},
    {ModulusFamily::lambda_plus, "lambda-plus", Mode::sup, 1},
    {ModulusFamily::phi_minus, "phi-minus", Mode::inf, 2},
    {ModulusFamily::phi_plus, "phi-plus", Mode::sup, 2},
    {ModulusFamily::zeta_minus, "zeta-minus", Mode::inf, kInf},
    {ModulusFamily::zeta_plus, "zeta-plus", Mode::sup, kInf},
    {ModulusFamily::gamma_minus, "gamma-minus", Mode::inf, 2},
    {ModulusFamily::gamma_plus, "gamma-plus", Mode::sup, 2},
    {ModulusFamily::d_minus, "d-minus", Mode::inf, 2},
    {ModulusFamily::d_plus, "d-plus", Mode::sup, 2},
    {ModulusFamily::milman_minus, "milman-minus", Mode::inf, 2},
    {ModulusFamily::milman_plus, "milman-plus", Mode::sup, 2},
    {ModulusFamily::delta_t, "delta-t", Mode::inf, 2},
    {ModulusFamily::beta_t, "beta-t", Mode::sup, 2},
};

const FamilyInfo& info(ModulusFamily f) {
  for (const auto& i : kFamilies) {
    if (i.family == f) return i;
  }
  throw InputError("unknown modulus family");
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

enum class Space { chord, cone, nested };

Space space_of(ModulusFamily f) {
  switch (f) {
    case ModulusFamily::lambda_minus:
    case ModulusFamily::lambda_plus:
    case ModulusFamily::zeta_minus:
    case ModulusFamily::zeta_plus:
      return Space::cone;
    case ModulusFamily::rho:
    case ModulusFamily::milman_minus:
    case ModulusFamily::milman_plus:
      return Space::nested;
    default:
      return Space::chord;
  }
}

bool better(Mode mode, double a, double b) { return mode == Mode::inf ? a < b : a > b; }

std::vector<std::vector<double>> vertex_seeds(const Norm& norm, double period) {
  std::vector<std::vector<double>> seeds;
  for (double a : norm.vertex_angles()) seeds.push_back({std::fmod(a, period)});
  return seeds;
}

int endpoint_count(const SupportSet<double>& j) { return j.smooth() ? 1 : 2; }

DualVector2d endpoint(const SupportSet<double>& j, int k) { return k == 0 ? j.minus : j.plus; }

/// Everything needed to score one modulus at one ε.
class Objective {
 public:
  Objective(const Norm& norm, const ModulusKind& kind, double eps, const ModulusOptions& options)
      : norm_(norm), kind_(kind), eps_(eps), options_(options), mode_(kind.mode()) {}

  /// Best value over the discrete choices attached to the primary angle θ.
  std::optional<Evaluation<Configuration>> at(double theta) const {
    switch (space_of(kind_.family())) {
      case Space::chord:
        return chord_at(theta);
      case Space::cone:
        return cone_at(theta);
      case Space::nested:
        return nested_at(theta);
    }
    return std::nullopt;
  }

  double replay(const Configuration& c) const {
    switch (space_of(kind_.family())) {
      case Space::chord: {
        const auto theta2 = chord_partner(norm_, c.theta, eps_, c.side, c.root);
        if (!theta2) throw InfeasibleError("replay: no chord partner for the stored configuration");
        const Vector2d x = norm_.sphere_point(c.theta);
        const Vector2d z = norm_.sphere_point(*theta2);
        const auto jx = norm_.support_set_unchecked(x);
        const auto jz = norm_.support_set_unchecked(z);
        if (kind_.family() == ModulusFamily::d_minus && !(jx.smooth() && jz.smooth())) {
          return norm_.dual(DualVector2d(jx.at(c.s) - jz.at(c.t)));
        }
        return chord_value(x, z, endpoint(jx, c.j1), endpoint(jz, c.j2));
      }
      case Space::cone: {
        const Vector2d x = norm_.sphere_point(c.theta);
        const Vector2d y = c.sign * norm_.sphere_point(c.theta2);
        return cone_value(x, y);
      }
      case Space::nested:
        return nested_value(norm_.sphere_point(c.theta), norm_.sphere_point(c.theta2));
    }
    return 0;
  }

 private:
  double chord_value(const Vector2d& x, const Vector2d& z, const DualVector2d& p1,
                     const DualVector2d& p2) const {
    switch (kind_.family()) {
      case ModulusFamily::delta:
      case ModulusFamily::banas:
        return 1 - norm_.eval_unchecked(x + z) / 2;
      case ModulusFamily::delta_t:
      case ModulusFamily::beta_t:
        return 1 - norm_.eval_unchecked(kind_.t() * x + (1 - kind_.t()) * z);
      case ModulusFamily::phi_minus:
      case ModulusFamily::phi_plus:
        return pairing(p1, Vector2d(x - z));
      case ModulusFamily::gamma_minus:
      case ModulusFamily::gamma_plus:
        return pairing(DualVector2d(p1 - p2), Vector2d(x - z));
      case ModulusFamily::d_minus:
      case ModulusFamily::d_plus:
        return norm_.dual(DualVector2d(p1 - p2));
      default:
        throw InputError("chord_value: not a chord modulus");
    }
  }

  bool uses_x_support() const {
    switch (kind_.family()) {
      case ModulusFamily::phi_minus:
      case ModulusFamily::phi_plus:
      case ModulusFamily::gamma_minus:
      case ModulusFamily::gamma_plus:
      case ModulusFamily::d_minus:
      case ModulusFamily::d_plus:
        return true;
      default:
        return false;
    }
  }

  bool uses_partner_support() const {
    switch (kind_.family()) {
      case ModulusFamily::gamma_minus:
      case ModulusFamily::gamma_plus:
      case ModulusFamily::d_minus:
      case ModulusFamily::d_plus:
        return true;
      default:
        return false;
    }
  }

  std::optional<Evaluation<Configuration>> chord_at(double theta) const {
    const Vector2d x = norm_.sphere_point(theta);
    const bool need_x = uses_x_support();
    const bool need_z = uses_partner_support();
    const SupportSet<double> jx = need_x ? norm_.support_set_unchecked(x) : SupportSet<double>{};
    const int roots = norm_.is_strictly_convex() ? 1 : 2;

    std::optional<Evaluation<Configuration>> best;
    auto offer = [&](double value, const Configuration& c) {
      if (!best || better(mode_, value, best->value)) best = Evaluation<Configuration>{value, c};
    };

    for (int side : {1, -1}) {
      for (int root = 0; root < roots; ++root) {
        const auto theta2 = chord_partner(norm_, theta, eps_, side, root);
        if (!theta2) continue;
        const Vector2d z = norm_.sphere_point(*theta2);
        Configuration c;
        c.theta = theta;
        c.theta2 = *theta2;
        c.side = side;
        c.root = root;
        if (!need_x) {
          offer(chord_value(x, z, DualVector2d::Zero(), DualVector2d::Zero()), c);
          continue;
        }
        const SupportSet<double> jz = need_z ? norm_.support_set_unchecked(z) : SupportSet<double>{};
        if (kind_.family() == ModulusFamily::d_minus && !(jx.smooth() && jz.smooth())) {
          offer(segment_distance(jx, jz, c), c);
          continue;
        }
        const int n1 = endpoint_count(jx);
        const int n2 = need_z ? endpoint_count(jz) : 1;
        for (int j1 = 0; j1 < n1; ++j1) {
          for (int j2 = 0; j2 < n2; ++j2) {
            c.j1 = j1;
            c.j2 = j2;
            offer(chord_value(x, z, endpoint(jx, j1), need_z ? endpoint(jz, j2) : DualVector2d::Zero()),
                  c);
          }
        }
      }
    }
    return best;
  }

  /// min over (s, t) of ‖J(x)(s) − J(z)(t)‖_*; writes the minimizer into c.
  double segment_distance(const SupportSet<double>& jx, const SupportSet<double>& jz,
                          Configuration& c) const {
    ExtremizeOptions opts;
    opts.grid_n = options_.segment_grid_n;
    opts.refine_rounds = options_.segment_refine_rounds;
    opts.keep = options_.keep;
    auto f = [&](std::span<const double> st) -> std::optional<Evaluation<int>> {
      return Evaluation<int>{norm_.dual(DualVector2d(jx.at(st[0]) - jz.at(st[1]))), 0};
    };
    const auto r = extremize(f, ParameterBox::unit_square(), Mode::inf, opts);
    c.s = r.point[0];
    c.t = r.point[1];
    return r.value;
  }

  double cone_value(const Vector2d& x, const Vector2d& y) const {
    if (kind_.family() == ModulusFamily::lambda_minus || kind_.family() == ModulusFamily::lambda_plus) {
      return lambda_point(norm_, x, y, eps_);
    }
    return norm_.eval_unchecked(x + eps_ * y);
  }

  std::optional<Evaluation<Configuration>> cone_at(double theta) const {
    const Vector2d x = norm_.sphere_point(theta);
    const auto jx = norm_.support_set_unchecked(x);
    QuasiNormalCone cone;
    cone.begin = angle_of(kernel_direction(jx.minus));
    if (!jx.smooth()) {
      cone.width = std::atan2(jx.minus(0) * jx.plus(1) - jx.minus(1) * jx.plus(0),
                              jx.minus.dot(jx.plus));
    }
    std::optional<Evaluation<Configuration>> best;
    for (double alpha : cone.sample_angles(options_.cone_samples)) {
      const Vector2d dir = norm_.sphere_point(alpha);
      for (int sign : {1, -1}) {
        const double v = cone_value(x, sign * dir);
        if (!best || better(mode_, v, best->value)) {
          Configuration c;
          c.theta = theta;
          c.theta2 = alpha;
          c.sign = sign;
          best = Evaluation<Configuration>{v, c};
        }
      }
    }
    return best;
  }

  double nested_value(const Vector2d& x, const Vector2d& y) const {
    const double a = norm_.eval_unchecked(x + eps_ * y);
    const double b = norm_.eval_unchecked(x - eps_ * y);
    switch (kind_.family()) {
      case ModulusFamily::rho:
        return (a + b) / 2 - 1;
      case ModulusFamily::milman_minus:
        return std::max(a, b) - 1;
      default:
        return std::min(a, b) - 1;
    }
  }

  std::optional<Evaluation<Configuration>> nested_at(double theta) const {
    const Vector2d x = norm_.sphere_point(theta);
    ExtremizeOptions opts;
    opts.grid_n = std::min(options_.inner_grid_n, options_.grid_n);
    opts.refine_rounds = options_.refine_rounds;
    opts.keep = options_.keep;
    opts.seeds = vertex_seeds(norm_, kPi);
    auto f = [&](std::span<const double> a) -> std::optional<Evaluation<int>> {
      return Evaluation<int>{nested_value(x, norm_.sphere_point(a[0])), 0};
    };
    // Both objectives are invariant under y → −y.
    const auto r = extremize(f, ParameterBox::circle(kPi), mode_, opts);
    Configuration c;
    c.theta = theta;
    c.theta2 = r.point[0];
    c.inner_tol = r.tol_estimate;
    return Evaluation<Configuration>{r.value, c};
  }

  const Norm& norm_;
  ModulusKind kind_;
  double eps_;
  const ModulusOptions& options_;
  Mode mode_;
};

void check_domain(const ModulusKind& kind, double eps) {
  if (!std::isfinite(eps) || !kind.domain().contains(eps)) {
    throw DomainError(kind.name() + ": eps = " + shortest(eps) + " outside the legal domain " +
                      kind.domain().describe());
  }
}

}  // namespace

std::string Domain::describe() const {
  return "[" + shortest(lower) + ", " + (std::isinf(upper) ? std::string("inf)") : shortest(upper) + "]");
}

ModulusKind::ModulusKind(ModulusFamily family, double t) : family_(family), t_(t) {
  if (!(t > 0 && t < 1)) throw DomainError("modulus parameter t must lie strictly inside (0, 1)");
}

ModulusKind ModulusKind::parse(std::string_view name) {
  for (const auto& i : kFamilies) {
    const std::string_view base = i.name;
    if (i.family == ModulusFamily::delta_t || i.family == ModulusFamily::beta_t) {
      if (!name.starts_with(base) || name.size() <= base.size() + 1) continue;
      std::string_view rest = name.substr(base.size());
      if (rest.front() == '(' && rest.back() == ')') {
        rest = rest.substr(1, rest.size() - 2);
      } else if (rest.front() == ':') {
        rest = rest.substr(1);
      } else {
        continue;
      }
      double t = 0;
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), t);
      if (ec != std::errc() || ptr != rest.data() + rest.size()) {
        throw InputError("cannot parse modulus parameter in '" + std::string(name) + "'");
      }
      return ModulusKind(i.family, t);
    }
    if (name == base) return ModulusKind(i.family);
  }
  std::string msg = "unknown modulus '" + std::string(name) + "'; valid:";
  for (const auto& n : names()) msg += " " + n;
  throw InputError(msg);
}

std::vector<std::string> ModulusKind::names() {
  std::vector<std::string> out;
  for (const auto& i : kFamilies) {
    std::string n = i.name;
    if (i.family == ModulusFamily::delta_t || i.family == ModulusFamily::beta_t) n += "(t)";
    out.push_back(n);
  }
  return out;
}

std::string ModulusKind::name() const {
  std::string n = info(family_).name;
  if (family_ == ModulusFamily::delta_t || family_ == ModulusFamily::beta_t) {
    n += "(" + shortest(t_) + ")";
  }
  return n;
}

Mode ModulusKind::mode() const { return info(family_).mode; }

Domain ModulusKind::domain() const { return {0.0, info(family_).upper}; }

double ModulusKind::value_at_zero() const {
  return family_ == ModulusFamily::zeta_minus || family_ == ModulusFamily::zeta_plus ? 1.0 : 0.0;
}

nlohmann::json configuration_to_json(const Configuration& c) {
  return {{"theta", c.theta}, {"theta2", c.theta2}, {"side", c.side}, {"root", c.root},
          {"sign", c.sign},   {"j1", c.j1},         {"j2", c.j2},     {"s", c.s},
          {"t", c.t},         {"inner_tol", c.inner_tol}};
}

Configuration configuration_from_json(const nlohmann::json& j) {
  Configuration c;
  try {
    c.theta = j.at("theta").get<double>();
    c.theta2 = j.at("theta2").get<double>();
    c.side = j.at("side").get<int>();
    c.root = j.at("root").get<int>();
    c.sign = j.at("sign").get<int>();
    c.j1 = j.at("j1").get<int>();
    c.j2 = j.at("j2").get<int>();
    c.s = j.at("s").get<double>();
    c.t = j.at("t").get<double>();
    c.inner_tol = j.value("inner_tol", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("configuration JSON: ") + e.what());
  }
  return c;
}

std::optional<double> chord_partner(const Norm& norm, double theta, double eps, int side, int root) {
  if (eps <= 0) return theta;
  const Vector2d x = norm.sphere_point(theta);
  auto h = [&](double s) { return norm.eval_unchecked(x - norm.sphere_point(theta + side * s)) - eps; };
  const double h_end = h(kPi);
  double lo = 0;
  double hi = kPi;
  if (root == 0) {
    if (h_end < 0) return std::nullopt;
    for (int i = 0; i < kChordSteps; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (h(mid) >= 0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return theta + side * hi;
  }
  if (h_end <= 0) {
    if (h_end < -1e-12) return std::nullopt;
    return theta + side * kPi;
  }
  for (int i = 0; i < kChordSteps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h(mid) <= 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return theta + side * lo;
}

CurveSample modulus(const Norm& norm, const ModulusKind& kind, double eps, const ModulusOptions& options) {
  check_domain(kind, eps);
  if (options.grid_n < 64) throw InputError("modulus: grid_n must be at least 64");
  CurveSample sample;
  sample.eps = eps;
  sample.grid_n = options.grid_n;
  if (eps == 0) {
    sample.value = kind.value_at_zero();
    return sample;
  }
  const Objective objective(norm, kind, eps, options);
  const bool nested = space_of(kind.family()) == Space::nested;
  const double period = nested ? kPi : kTwoPi;
  ExtremizeOptions opts;
  opts.grid_n = options.grid_n;
  opts.refine_rounds = options.refine_rounds;
  opts.keep = options.keep;
  opts.seeds = vertex_seeds(norm, period);
  auto f = [&](std::span<const double> a) { return objective.at(a[0]); };
  const auto r = extremize(f, ParameterBox::circle(period), kind.mode(), opts);
  sample.value = r.value;
  sample.witness = r.witness;
  sample.refine_tol = r.tol_estimate + r.witness.inner_tol;
  return sample;
}

ModulusCurve modulus_curve(const Norm& norm, const ModulusKind& kind, std::span<const double> eps_grid,
                           const ModulusOptions& options) {
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    check_domain(kind, eps_grid[i]);
    if (i > 0 && !(eps_grid[i] > eps_grid[i - 1])) {
      throw InputError("modulus_curve: eps grid must be strictly increasing");
    }
  }
  ModulusCurve curve{kind, norm, {}};
  curve.samples = parallel_map(eps_grid.size(), [&](std::size_t i) {
    return modulus(norm, kind, eps_grid[i], options);
  });
  return curve;
}

double evaluate_configuration(const Norm& norm, const ModulusKind& kind, double eps,
                              const Configuration& config, const ModulusOptions& options) {
  check_domain(kind, eps);
  if (eps == 0) return kind.value_at_zero();
  return Objective(norm, kind, eps, options).replay(config);
}

double hilbert_reference(const ModulusKind& kind, double eps) {
  check_domain(kind, eps);
  const double e2 = eps * eps;
  switch (kind.family()) {
    case ModulusFamily::delta:
    case ModulusFamily::banas:
      return 1 - std::sqrt(1 - e2 / 4);
    case ModulusFamily::rho:
    case ModulusFamily::milman_minus:
    case ModulusFamily::milman_plus:
      return std::sqrt(1 + e2) - 1;
    case ModulusFamily::lambda_minus:
    case ModulusFamily::lambda_plus:
      return 1 - std::sqrt(1 - e2);
    case ModulusFamily::phi_minus:
    case ModulusFamily::phi_plus:
      return e2 / 2;
    case ModulusFamily::zeta_minus:
    case ModulusFamily::zeta_plus:
      return std::sqrt(1 + e2);
    case ModulusFamily::gamma_minus:
    case ModulusFamily::gamma_plus:
      return e2;
    case ModulusFamily::d_minus:
    case ModulusFamily::d_plus:
      return eps;
    case ModulusFamily::delta_t:
    case ModulusFamily::beta_t:
      return 1 - std::sqrt(1 - kind.t() * (1 - kind.t()) * e2);
  }
  return 0;
}

namespace {

double shoelace(const std::vector<Vector2d>& pts) {
  double twice = 0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(pts[i], pts[(i + 1) % n]);
  return twice / 2;
}

}  // namespace

double unit_ball_area(const Norm& norm, int samples) {
  if (samples < 3) throw InputError("unit_ball_area: need at least 3 samples");
  std::vector<Vector2d> pts;
  pts.reserve(samples);
  for (int i = 0; i < samples; ++i) pts.push_back(norm.sphere_point(kTwoPi * i / samples));
  return shoelace(pts);
}

AreaAdditivity area_additivity_check(const Norm& norm, double eps, int samples) {
  if (!norm.is_smooth()) {
    throw UnsupportedError("area additivity is implemented for smooth norms only");
  }
  if (samples < 1024) throw InputError("area_additivity_check: samples must be at least 1024");
  if (!std::isfinite(eps) || eps < 0) throw DomainError("area_additivity_check: eps must be >= 0");
  std::vector<Vector2d> f1, f2, f3;
  f1.reserve(samples);
  f2.reserve(samples);
  f3.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const Vector2d u = norm.sphere_point(kTwoPi * i / samples);
    const Vector2d t = eps * norm.tangent(u);
    f1.push_back(u);
    f2.push_back(t);
    f3.push_back(u + t);
  }
  AreaAdditivity r{shoelace(f1), shoelace(f2), shoelace(f3), 0};
  r.defect = r.a3 - (r.a1 + r.a2);
  return r;
}

}  // namespace moduli
