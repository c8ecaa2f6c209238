#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "moduli/errors.hpp"

namespace moduli {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

// Functionals are row vectors, so the standard pairing is a plain product.
template <typename Scalar>
using DualVector2 = Eigen::Matrix<Scalar, 1, 2>;

using Vector2d = Vector2<double>;
using DualVector2d = DualVector2<double>;

template <typename Scalar>
inline Scalar pairing(const DualVector2<Scalar>& p, const Vector2<Scalar>& x) {
  return p(0) * x(0) + p(1) * x(1);
}

template <typename Scalar>
inline Scalar cross(const Vector2<Scalar>& a, const Vector2<Scalar>& b) {
  return a(0) * b(1) - a(1) * b(0);
}

/// Counterclockwise quarter turn.
template <typename Scalar>
inline Vector2<Scalar> perp(const Vector2<Scalar>& v) {
  return Vector2<Scalar>(-v(1), v(0));
}

/// Direction annihilated by p, i.e. the quarter turn of p viewed as a vector.
template <typename Scalar>
inline Vector2<Scalar> kernel_direction(const DualVector2<Scalar>& p) {
  return Vector2<Scalar>(-p(1), p(0));
}

template <typename Scalar>
inline Scalar angle_of(const Vector2<Scalar>& v) {
  using std::atan2;
  return atan2(v(1), v(0));
}

/// Endpoints of the segment J(x) of norm-one functionals supporting the unit
/// ball at x. `minus` precedes `plus` counterclockwise; they coincide at
/// smooth points.
template <typename Scalar>
struct SupportSet {
  DualVector2<Scalar> minus;
  DualVector2<Scalar> plus;

  bool smooth() const { return minus == plus; }
  DualVector2<Scalar> at(Scalar s) const { return (Scalar(1) - s) * minus + s * plus; }
};

namespace kinds {

struct Euclidean {};

template <typename Scalar>
struct Lp {
  Scalar p;
};

/// ‖v‖ = ‖(w1·v1, w2·v2)‖_p
template <typename Scalar>
struct WeightedLp {
  Scalar p;
  Scalar w1;
  Scalar w2;
};

/// Counterclockwise vertices of an origin-symmetric convex polygon.
template <typename Scalar>
struct Polygon {
  std::vector<Vector2<Scalar>> vertices;
};

}  // namespace kinds

/// An origin-symmetric convex gauge on the plane.
///
/// The unit balls of ℓ1 and ℓ∞ (weighted or not) are kept internally as
/// 4-vertex polygons, so every non-smooth norm goes through the same polygon
/// code path. The declared kind is preserved for display and serialization.
template <typename Scalar>
class BasicNorm {
 public:
  using Vector = Vector2<Scalar>;
  using Dual = DualVector2<Scalar>;
  using Kind = std::variant<kinds::Euclidean, kinds::Lp<Scalar>, kinds::WeightedLp<Scalar>,
                            kinds::Polygon<Scalar>>;

  static BasicNorm euclidean() { return BasicNorm(kinds::Euclidean{}); }

  static BasicNorm lp(Scalar p) { return BasicNorm(kinds::Lp<Scalar>{p}); }

  static BasicNorm weighted_lp(Scalar p, Scalar w1, Scalar w2) {
    return BasicNorm(kinds::WeightedLp<Scalar>{p, w1, w2});
  }

  static BasicNorm polygon(std::vector<Vector> vertices) {
    return BasicNorm(kinds::Polygon<Scalar>{std::move(vertices)});
  }

  /// Regular polygon with `n` (even) vertices on the Euclidean unit circle,
  /// the first one at angle 0.
  static BasicNorm regular_polygon(int n) {
    if (n < 4 || n % 2 != 0) {
      throw RepresentationError("regular polygon needs an even vertex count >= 4");
    }
    std::vector<Vector> vs;
    vs.reserve(n);
    for (int k = 0; k < n; ++k) {
      const Scalar a = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(n);
      vs.emplace_back(std::cos(a), std::sin(a));
    }
    // Exact antipodal symmetry regardless of trig rounding.
    for (int k = n / 2; k < n; ++k) vs[k] = -vs[k - n / 2];
    return polygon(std::move(vs));
  }

  const Kind& kind() const { return kind_; }

  bool is_polygonal() const { return !vertices_.empty(); }
  bool is_euclidean() const { return std::holds_alternative<kinds::Euclidean>(kind_); }

  /// Smooth and strictly convex norms (Euclidean and ℓp with 1 < p < ∞).
  bool is_smooth() const { return !is_polygonal(); }
  bool is_strictly_convex() const { return !is_polygonal(); }

  /// Canonical polygon vertices (empty for smooth norms).
  const std::vector<Vector>& vertices() const { return vertices_; }

  /// normals()[k] is the functional equal to 1 on the edge vertices()[k] → vertices()[k+1].
  const std::vector<Dual>& normals() const { return normals_; }

  Scalar operator()(const Vector& v) const {
    if (!v.allFinite()) throw InputError("norm evaluated at a non-finite vector");
    return eval_unchecked(v);
  }

  Scalar eval_unchecked(const Vector& v) const {
    using std::abs;
    if (is_polygonal()) {
      Scalar best = 0;
      for (const Dual& n : normals_) best = std::max(best, pairing(n, v));
      return best;
    }
    if (is_euclidean()) return std::hypot(v(0), v(1));
    Scalar a = abs(v(0));
    Scalar b = abs(v(1));
    if (const auto* w = std::get_if<kinds::WeightedLp<Scalar>>(&kind_)) {
      a *= w->w1;
      b *= w->w2;
    }
    return lp_magnitude(a, b, exponent_);
  }

  /// Dual norm sup{⟨p, x⟩ : ‖x‖ ≤ 1}.
  Scalar dual(const Dual& p) const {
    using std::abs;
    if (!p.allFinite()) throw InputError("dual norm evaluated at a non-finite functional");
    if (is_polygonal()) {
      Scalar best = 0;
      for (const Vector& v : vertices_) best = std::max(best, pairing(p, v));
      return best;
    }
    if (is_euclidean()) return std::hypot(p(0), p(1));
    Scalar a = abs(p(0));
    Scalar b = abs(p(1));
    if (const auto* w = std::get_if<kinds::WeightedLp<Scalar>>(&kind_)) {
      a /= w->w1;
      b /= w->w2;
    }
    return lp_magnitude(a, b, conjugate_exponent(exponent_));
  }

  /// The norm whose unit ball is the polar of this one.
  BasicNorm dual_norm() const {
    return std::visit(
        [this](const auto& k) -> BasicNorm {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, kinds::Euclidean>) {
            return euclidean();
          } else if constexpr (std::is_same_v<K, kinds::Lp<Scalar>>) {
            return lp(conjugate_exponent(k.p));
          } else if constexpr (std::is_same_v<K, kinds::WeightedLp<Scalar>>) {
            return weighted_lp(conjugate_exponent(k.p), Scalar(1) / k.w1, Scalar(1) / k.w2);
          } else {
            std::vector<Vector> polar;
            polar.reserve(normals_.size());
            for (const Dual& n : normals_) polar.push_back(n.transpose());
            return polygon(std::move(polar));
          }
        },
        kind_);
  }

  /// (cos θ, sin θ) / ‖(cos θ, sin θ)‖.
  Vector sphere_point(Scalar theta) const {
    using std::cos;
    using std::sin;
    if (!std::isfinite(static_cast<double>(theta))) throw InputError("non-finite angle");
    const Vector u(cos(theta), sin(theta));
    return u / eval_unchecked(u);
  }

  /// Angles of the canonical polygon vertices in [0, 2π); empty for smooth norms.
  std::vector<Scalar> vertex_angles() const {
    std::vector<Scalar> out;
    for (const Vector& v : vertices_) {
      Scalar a = angle_of(v);
      if (a < 0) a += Scalar(2) * std::numbers::pi_v<Scalar>;
      out.push_back(a);
    }
    return out;
  }

  /// J(x/‖x‖). Throws InputError unless |‖x‖ − 1| ≤ sphere_tol.
  SupportSet<Scalar> support_set(const Vector& x, Scalar sphere_tol = Scalar(1e-9)) const {
    using std::abs;
    const Scalar r = (*this)(x);
    if (abs(r - Scalar(1)) > sphere_tol) {
      throw InputError("support_set: point is not on the unit sphere");
    }
    return support_set_unchecked(x / r);
  }

  /// J(u) for u already on the unit sphere.
  SupportSet<Scalar> support_set_unchecked(const Vector& u) const {
    using std::abs;
    using std::pow;
    if (is_polygonal()) return polygon_support(u);
    if (is_euclidean()) {
      const Dual p = u.transpose() / std::hypot(u(0), u(1));
      return {p, p};
    }
    Scalar w1 = 1, w2 = 1;
    if (const auto* w = std::get_if<kinds::WeightedLp<Scalar>>(&kind_)) {
      w1 = w->w1;
      w2 = w->w2;
    }
    const Scalar p = exponent_;
    const Scalar s1 = w1 * u(0);
    const Scalar s2 = w2 * u(1);
    // Gradient of the norm; renormalize so the dual norm is 1 to rounding.
    Dual g(w1 * sign(s1) * pow(abs(s1), p - 1), w2 * sign(s2) * pow(abs(s2), p - 1));
    g /= dual(g);
    return {g, g};
  }

  /// Unit tangent direction of the supporting line at a smooth unit vector,
  /// oriented counterclockwise.
  Vector tangent(const Vector& u) const {
    const Vector t = kernel_direction(support_set_unchecked(u).minus);
    return t / eval_unchecked(t);
  }

 private:
  explicit BasicNorm(Kind k) : kind_(std::move(k)) { canonicalize(); }

  static Scalar sign(Scalar v) { return v > 0 ? Scalar(1) : (v < 0 ? Scalar(-1) : Scalar(0)); }

  static bool is_inf(Scalar p) { return p == std::numeric_limits<Scalar>::infinity(); }

  static Scalar conjugate_exponent(Scalar p) {
    if (p == Scalar(1)) return std::numeric_limits<Scalar>::infinity();
    if (is_inf(p)) return Scalar(1);
    return p / (p - Scalar(1));
  }

  static Scalar lp_magnitude(Scalar a, Scalar b, Scalar p) {
    using std::pow;
    const Scalar m = std::max(a, b);
    if (m == Scalar(0)) return Scalar(0);
    if (is_inf(p)) return m;
    if (p == Scalar(1)) return a + b;
    const Scalar r = std::min(a, b) / m;
    return m * pow(Scalar(1) + pow(r, p), Scalar(1) / p);
  }

  static void validate_exponent(Scalar p) {
    if (std::isnan(static_cast<double>(p)) || p < Scalar(1)) {
      throw RepresentationError("lp exponent must lie in [1, inf]");
    }
  }

  void canonicalize() {
    std::visit(
        [this](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, kinds::Lp<Scalar>>) {
            validate_exponent(k.p);
            exponent_ = k.p;
            set_box_polygon(k.p, Scalar(1), Scalar(1));
          } else if constexpr (std::is_same_v<K, kinds::WeightedLp<Scalar>>) {
            validate_exponent(k.p);
            if (!(k.w1 > 0) || !(k.w2 > 0) || !std::isfinite(static_cast<double>(k.w1)) ||
                !std::isfinite(static_cast<double>(k.w2))) {
              throw RepresentationError("weighted-lp weights must be positive and finite");
            }
            exponent_ = k.p;
            set_box_polygon(k.p, k.w1, k.w2);
          } else if constexpr (std::is_same_v<K, kinds::Polygon<Scalar>>) {
            set_polygon(k.vertices);
          }
        },
        kind_);
  }

  void set_box_polygon(Scalar p, Scalar w1, Scalar w2) {
    const Scalar a = Scalar(1) / w1;
    const Scalar b = Scalar(1) / w2;
    if (is_inf(p)) {
      set_polygon({Vector(a, b), Vector(-a, b), Vector(-a, -b), Vector(a, -b)});
    } else if (p == Scalar(1)) {
      set_polygon({Vector(a, 0), Vector(0, b), Vector(-a, 0), Vector(0, -b)});
    }
  }

  void set_polygon(const std::vector<Vector>& vs) {
    using std::abs;
    const std::size_t n = vs.size();
    if (n < 4 || n % 2 != 0) {
      throw RepresentationError("polygon needs an even number (>= 4) of vertices");
    }
    Scalar scale = 0;
    for (const Vector& v : vs) {
      if (!v.allFinite()) throw RepresentationError("polygon vertex is not finite");
      scale = std::max(scale, v.cwiseAbs().maxCoeff());
    }
    const Scalar tol = Scalar(1e-12) * scale;
    for (std::size_t k = 0; k < n / 2; ++k) {
      if ((vs[k] + vs[k + n / 2]).cwiseAbs().maxCoeff() > tol) {
        throw RepresentationError("polygon is not origin-symmetric");
      }
    }
    Scalar winding = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const Vector& a = vs[k];
      const Vector& b = vs[(k + 1) % n];
      const Vector& c = vs[(k + 2) % n];
      if (!(cross(a, b) > 0)) {
        throw RepresentationError("origin is not strictly interior or vertices are not counterclockwise");
      }
      if (!(cross(Vector(b - a), Vector(c - b)) > tol * scale)) {
        throw RepresentationError("polygon is not strictly convex at a vertex");
      }
      winding += std::atan2(cross(a, b), a.dot(b));
    }
    if (abs(winding - Scalar(2) * std::numbers::pi_v<Scalar>) > Scalar(1e-6)) {
      throw RepresentationError("polygon boundary winds more than once around the origin");
    }
    vertices_ = vs;
    normals_.clear();
    normals_.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const Vector& a = vs[k];
      const Vector& b = vs[(k + 1) % n];
      normals_.emplace_back((b(1) - a(1)) / cross(a, b), -(b(0) - a(0)) / cross(a, b));
    }
  }

  SupportSet<Scalar> polygon_support(const Vector& u) const {
    const std::size_t n = normals_.size();
    std::size_t best = 0;
    Scalar best_value = pairing(normals_[0], u);
    for (std::size_t k = 1; k < n; ++k) {
      const Scalar v = pairing(normals_[k], u);
      if (v > best_value) {
        best_value = v;
        best = k;
      }
    }
    const Scalar tol = Scalar(1e-12) * std::max(Scalar(1), best_value);
    const std::size_t prev = (best + n - 1) % n;
    const std::size_t next = (best + 1) % n;
    // Vertex k is shared by edges k-1 and k.
    if (best_value - pairing(normals_[prev], u) <= tol) return {normals_[prev], normals_[best]};
    if (best_value - pairing(normals_[next], u) <= tol) return {normals_[best], normals_[next]};
    return {normals_[best], normals_[best]};
  }

  Kind kind_;
  Scalar exponent_ = 2;
  std::vector<Vector> vertices_;
  std::vector<Dual> normals_;
};

using Norm = BasicNorm<double>;

}  // namespace moduli
