#include "moduli/triangle.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace moduli {

namespace {

constexpr int kBisectionSteps = 80;

double ccw_angle_between(const DualVector2d& a, const DualVector2d& b) {
  double w = std::atan2(a(0) * b(1) - a(1) * b(0), a(0) * b(0) + a(1) * b(1));
  if (w < 0) w += 2 * std::numbers::pi;
  return w;
}

nlohmann::json vec_json(const Vector2d& v) { return {v(0), v(1)}; }

}  // namespace

std::vector<double> QuasiNormalCone::sample_angles(int interior) const {
  if (degenerate()) return {begin};
  std::vector<double> out;
  out.reserve(interior + 2);
  for (int k = 0; k <= interior + 1; ++k) out.push_back(begin + width * k / (interior + 1));
  return out;
}

bool is_quasi_orthogonal(const Norm& norm, const Vector2d& y, const Vector2d& x, double tol) {
  if (!x.allFinite() || !y.allFinite()) throw InputError("is_quasi_orthogonal: non-finite input");
  const double r = norm(x);
  if (r == 0) throw InputError("is_quasi_orthogonal: x must be nonzero");
  const auto j = norm.support_set_unchecked(x / r);
  const double a = pairing(j.minus, y);
  const double b = pairing(j.plus, y);
  if (a * b <= 0) return true;
  return std::min(std::abs(a), std::abs(b)) <= tol;
}

QuasiNormalCone quasi_normals(const Norm& norm, const Vector2d& x) {
  const auto j = norm.support_set(x);
  QuasiNormalCone cone;
  cone.begin = angle_of(kernel_direction(j.minus));
  cone.width = j.smooth() ? 0.0 : ccw_angle_between(j.minus, j.plus);
  return cone;
}

double lambda_point(const Norm& norm, const Vector2d& x, const Vector2d& y, double eps, double tol) {
  if (!(eps >= 0 && eps <= 1)) throw DomainError("lambda_point: eps must lie in [0, 1]");
  const Vector2d y1 = x + eps * y;
  auto g = [&](double lambda) { return norm.eval_unchecked(y1 - lambda * x) - 1.0; };
  const double g0 = g(0);
  if (g0 < -tol) {
    throw PreconditionError("lambda_point: y is not quasi-orthogonal to x (g(0) = " +
                            std::to_string(g0) + ")");
  }
  if (g0 <= 0) return 0;
  double lo = 0;
  double hi = 1;
  for (int i = 0; i < kBisectionSteps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

TriangleFigure build_figure(const Norm& norm, const Vector2d& x, const Vector2d& y, double eps) {
  if (!(eps > 0 && eps <= 1)) throw DomainError("build_figure: eps must lie in (0, 1]");
  TriangleFigure fig;
  fig.x = x;
  fig.y = y;
  fig.eps = eps;
  fig.y1 = x + eps * y;
  fig.lambda = lambda_point(norm, x, y, eps);
  fig.z = fig.y1 - fig.lambda * x;
  fig.d = fig.y1 / norm(fig.y1);

  // x + τy = d + s·x
  Eigen::Matrix2d a;
  a.col(0) = y;
  a.col(1) = -x;
  const Eigen::Vector2d ts = a.colPivHouseholderQr().solve(fig.d - x);
  fig.y2 = x + ts(0) * y;

  const auto j = norm.support_set(x);
  const double am = pairing(j.minus, y);
  const double ap = pairing(j.plus, y);
  constexpr double kTol = 1e-9;
  if (j.smooth() || std::abs(am) <= kTol) {
    fig.p = j.minus;
  } else if (std::abs(ap) <= kTol) {
    fig.p = j.plus;
  } else {
    if (am * ap > 0) throw PreconditionError("build_figure: y is not quasi-orthogonal to x");
    fig.p = j.at(am / (am - ap));
  }
  return fig;
}

double check_projection_bound(const Norm& norm, const TriangleFigure& fig) {
  return 2 * norm(Vector2d(fig.y1 - fig.x)) - norm(Vector2d(fig.x - fig.z));
}

nlohmann::json figure_to_json(const TriangleFigure& fig) {
  return {{"x", vec_json(fig.x)},   {"y", vec_json(fig.y)},   {"eps", fig.eps},
          {"y1", vec_json(fig.y1)}, {"z", vec_json(fig.z)},   {"d", vec_json(fig.d)},
          {"y2", vec_json(fig.y2)}, {"p", {fig.p(0), fig.p(1)}}, {"lambda", fig.lambda}};
}

}  // namespace moduli
