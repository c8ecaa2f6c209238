#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "moduli/errors.hpp"

namespace moduli {

enum class Mode { inf, sup };

/// Axis-aligned parameter box. Periodic axes are sampled on [lower, upper)
/// and refined points wrap around; other axes include both ends and clamp.
struct ParameterBox {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> periodic;

  std::size_t dimension() const { return lower.size(); }

  static ParameterBox circle(double period) { return {{0.0}, {period}, {true}}; }
  static ParameterBox unit_square() { return {{0.0, 0.0}, {1.0, 1.0}, {false, false}}; }
};

struct ExtremizeOptions {
  int grid_n = 1024;
  int refine_rounds = 6;
  int keep = 8;
  int subdivision = 4;
  /// Extra points evaluated alongside the coarse grid (e.g. polygon vertices).
  std::vector<std::vector<double>> seeds;
};

template <typename Witness>
struct Evaluation {
  double value;
  Witness witness;
};

template <typename Witness>
struct Extremum {
  double value;
  std::vector<double> point;
  Witness witness;
  double tol_estimate;
};

namespace detail {

template <typename Witness>
struct Candidate {
  std::vector<double> point;
  double value;
  Witness witness;
};

template <typename Witness>
class BestK {
 public:
  BestK(std::size_t k, Mode mode) : k_(k), mode_(mode) {}

  void offer(Candidate<Witness> c) {
    for (const auto& e : items_) {
      if (e.point == c.point) return;
    }
    auto pos = std::find_if(items_.begin(), items_.end(),
                            [&](const Candidate<Witness>& e) { return better(c.value, e.value); });
    if (static_cast<std::size_t>(pos - items_.begin()) >= k_) return;
    items_.insert(pos, std::move(c));
    if (items_.size() > k_) items_.pop_back();
  }

  bool better(double a, double b) const { return mode_ == Mode::inf ? a < b : a > b; }

  const std::vector<Candidate<Witness>>& items() const { return items_; }
  bool empty() const { return items_.empty(); }

 private:
  std::size_t k_;
  Mode mode_;
  std::vector<Candidate<Witness>> items_;
};

inline double normalize_axis(double v, double lo, double hi, bool periodic, bool& inside) {
  inside = true;
  if (periodic) {
    const double period = hi - lo;
    double r = std::fmod(v - lo, period);
    if (r < 0) r += period;
    return lo + r;
  }
  if (v < lo || v > hi) inside = false;
  return v;
}

}  // namespace detail

/// Grid search with recursive local refinement.
///
/// Scans a uniform grid_n^D lattice of the box (plus seeds), keeps the best
/// `keep` points, then for each round shrinks the spacing by `subdivision`
/// and evaluates the ±subdivision lattice neighbourhood of every retained
/// point. tol_estimate is the final cell diameter times a local Lipschitz
/// estimate taken from slopes between the neighbours of the optimum (not
/// through it, so a jump at the optimum does not inflate the estimate).
///
/// `objective(std::span<const double>)` returns
/// std::optional<Evaluation<W>>; std::nullopt marks an infeasible point.
/// Throws InfeasibleError if no coarse point is feasible.
template <typename Objective>
auto extremize(Objective&& objective, const ParameterBox& box, Mode mode,
               const ExtremizeOptions& options) {
  using Result = std::invoke_result_t<Objective&, std::span<const double>>;
  using EvalT = typename Result::value_type;
  using Witness = decltype(std::declval<EvalT>().witness);
  using detail::Candidate;

  const std::size_t dim = box.dimension();
  if (dim == 0 || box.upper.size() != dim || box.periodic.size() != dim) {
    throw InputError("extremize: malformed parameter box");
  }
  if (options.grid_n < 2 || options.keep < 1 || options.subdivision < 2 || options.refine_rounds < 0) {
    throw InputError("extremize: invalid resolution options");
  }
  const std::size_t n = static_cast<std::size_t>(options.grid_n);
  std::vector<double> spacing(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const double len = box.upper[d] - box.lower[d];
    if (!(len > 0)) throw InputError("extremize: empty parameter box");
    spacing[d] = box.periodic[d] ? len / static_cast<double>(n) : len / static_cast<double>(n - 1);
  }

  detail::BestK<Witness> best(static_cast<std::size_t>(options.keep), mode);
  auto evaluate = [&](const std::vector<double>& point) -> std::optional<EvalT> {
    return objective(std::span<const double>(point));
  };

  std::vector<std::size_t> index(dim, 0);
  std::vector<double> point(dim);
  for (;;) {
    for (std::size_t d = 0; d < dim; ++d) {
      point[d] = box.lower[d] + static_cast<double>(index[d]) * spacing[d];
    }
    for (std::size_t d = 0; d < dim; ++d) {
      if (!box.periodic[d] && index[d] == n - 1) point[d] = box.upper[d];
    }
    if (auto e = evaluate(point)) best.offer({point, e->value, std::move(e->witness)});
    std::size_t d = 0;
    while (d < dim && ++index[d] == n) index[d++] = 0;
    if (d == dim) break;
  }
  for (const auto& seed : options.seeds) {
    if (seed.size() != dim) throw InputError("extremize: seed dimension mismatch");
    std::vector<double> s(dim);
    bool inside_all = true;
    for (std::size_t d = 0; d < dim; ++d) {
      bool inside = true;
      s[d] = detail::normalize_axis(seed[d], box.lower[d], box.upper[d], box.periodic[d], inside);
      inside_all = inside_all && inside;
    }
    if (!inside_all) continue;
    if (auto e = evaluate(s)) best.offer({s, e->value, std::move(e->witness)});
  }
  if (best.empty()) throw InfeasibleError("extremize: no feasible configuration");

  // Lattice offsets in [-sub, sub]^dim, origin excluded.
  const int sub = options.subdivision;
  std::vector<std::vector<int>> offsets;
  {
    std::vector<int> j(dim, -sub);
    for (;;) {
      if (std::any_of(j.begin(), j.end(), [](int v) { return v != 0; })) offsets.push_back(j);
      std::size_t d = 0;
      while (d < dim && ++j[d] > sub) j[d++] = -sub;
      if (d == dim) break;
    }
  }

  auto neighbour = [&](const std::vector<double>& c, const std::vector<double>& step,
                       const std::vector<int>& off) -> std::optional<std::vector<double>> {
    std::vector<double> p(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      bool inside = true;
      p[d] = detail::normalize_axis(c[d] + off[d] * step[d], box.lower[d], box.upper[d],
                                    box.periodic[d], inside);
      if (!inside) return std::nullopt;
    }
    return p;
  };

  std::vector<double> step = spacing;
  for (int round = 0; round < options.refine_rounds; ++round) {
    for (auto& s : step) s /= sub;
    detail::BestK<Witness> next(static_cast<std::size_t>(options.keep), mode);
    for (const auto& c : best.items()) next.offer(c);
    for (const auto& c : best.items()) {
      for (const auto& off : offsets) {
        auto p = neighbour(c.point, step, off);
        if (!p) continue;
        if (auto e = evaluate(*p)) next.offer({std::move(*p), e->value, std::move(e->witness)});
      }
    }
    best = std::move(next);
  }

  // Per direction, the smaller of the slopes over steps (1,2) and (2,3):
  // an isolated jump (e.g. where a support set switches) inflates one only.
  const auto& top = best.items().front();
  double lipschitz = 0;
  for (std::size_t d = 0; d < dim; ++d) {
    for (int dir : {-1, 1}) {
      std::optional<double> f[3];
      for (int k = 0; k < 3; ++k) {
        std::vector<int> o(dim, 0);
        o[d] = (k + 1) * dir;
        if (auto p = neighbour(top.point, step, o)) {
          if (auto e = evaluate(*p)) f[k] = e->value;
        }
      }
      std::optional<double> slope;
      for (int k = 0; k < 2; ++k) {
        if (!f[k] || !f[k + 1]) continue;
        const double sl = std::abs(*f[k + 1] - *f[k]) / step[d];
        slope = slope ? std::min(*slope, sl) : sl;
      }
      if (slope) lipschitz = std::max(lipschitz, *slope);
    }
  }
  double diameter2 = 0;
  for (double s : step) diameter2 += s * s;
  return Extremum<Witness>{top.value, top.point, top.witness, std::sqrt(diameter2) * lipschitz};
}

}  // namespace moduli
