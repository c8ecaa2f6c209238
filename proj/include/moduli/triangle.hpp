#pragma once

#include <vector>

#include <json.hpp>

#include "moduli/norm.hpp"

namespace moduli {

/// Directions y with y ⌐ x, as the counterclockwise angular interval
/// [begin, begin + width] of sphere_point angles. The opposite directions
/// are quasi-orthogonal as well and are not listed separately. width is 0
/// when J(x) is a single functional.
struct QuasiNormalCone {
  double begin = 0;
  double width = 0;

  bool degenerate() const { return width == 0; }

  /// Boundary directions plus `interior` equally spaced interior ones.
  std::vector<double> sample_angles(int interior) const;
};

/// True iff some p in J(x/‖x‖) satisfies |⟨p, y⟩| ≤ tol.
bool is_quasi_orthogonal(const Norm& norm, const Vector2d& y, const Vector2d& x, double tol = 1e-9);

QuasiNormalCone quasi_normals(const Norm& norm, const Vector2d& x);

/// Smallest λ with ‖x + εy − λx‖ = 1 for unit x, unit y ⌐ x and ε ∈ [0, 1].
///
/// g(λ) = ‖x + εy − λx‖ − 1 is convex with g(0) ≥ 0 and g(1) ≤ 0. Bisection
/// keeps g(lo) > 0 ≥ g(hi), so the left end of {g ≤ 0} is returned.
double lambda_point(const Norm& norm, const Vector2d& x, const Vector2d& y, double eps,
                    double tol = 1e-9);

/// The right-angled triangle configuration built from a unit x, a unit
/// quasi-normal y and an offset ε along y.
struct TriangleFigure {
  Vector2d x;
  Vector2d y;
  double eps = 0;
  Vector2d y1;  // x + εy, on the supporting line at x
  Vector2d z;   // first sphere point met walking from y1 in direction −x
  Vector2d d;   // y1 / ‖y1‖
  Vector2d y2;  // on the line x + τy with d − y2 parallel to x
  DualVector2d p;  // element of J(x) annihilating y
  double lambda = 0;  // ‖y1 − z‖
};

TriangleFigure build_figure(const Norm& norm, const Vector2d& x, const Vector2d& y, double eps);

/// 2‖y1 − x‖ − ‖x − z‖; nonnegative for every valid figure.
double check_projection_bound(const Norm& norm, const TriangleFigure& fig);

nlohmann::json figure_to_json(const TriangleFigure& fig);

}  // namespace moduli
