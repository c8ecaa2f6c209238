#include "moduli/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <tuple>
#include <variant>

#include "moduli/norm_io.hpp"
#include "moduli/parallel.hpp"
#include "moduli/triangle.hpp"
#include "random.hpp"

namespace moduli {

using json = nlohmann::json;

std::string to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::inequality:
      return "inequality";
    case CheckKind::monotonicity:
      return "monotonicity";
    case CheckKind::coincidence:
      return "coincidence";
    case CheckKind::figure:
      return "figure";
    case CheckKind::area_additivity:
      return "area-additivity";
    case CheckKind::conjecture_probe:
      return "conjecture-probe";
  }
  return "?";
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::report_only:
      return "report-only";
    case CheckStatus::skipped:
      return "skipped";
  }
  return "?";
}

namespace {

constexpr double kPi = std::numbers::pi;

using detail::make_rng;
using detail::uniform01;

std::vector<double> check_grid(const CheckSpec& spec) {
  if (!spec.eps_grid.empty()) return spec.eps_grid;
  const double a = spec.domain.lower + 1e-6;
  const double b = spec.domain.upper - 1e-6;
  if (spec.grid_points <= 1) return {a};
  std::vector<double> grid;
  for (int i = 0; i < spec.grid_points; ++i) {
    grid.push_back(i == spec.grid_points - 1 ? b : a + (b - a) * i / (spec.grid_points - 1));
  }
  return grid;
}

/// Memoized modulus values of one norm, shared by every check of a run.
class Evaluator {
 public:
  struct Result {
    std::optional<CurveSample> sample;
    std::string error;
  };

  Evaluator(Norm norm, const ModulusOptions& options) : norm_(std::move(norm)), options_(options) {}

  const Norm& norm() const { return norm_; }

  void prefetch(const std::vector<std::pair<ModulusKind, double>>& requests) {
    std::vector<std::pair<ModulusKind, double>> missing;
    for (const auto& [kind, arg] : requests) {
      const Key k = key(kind, arg);
      if (cache_.contains(k)) continue;
      if (std::any_of(missing.begin(), missing.end(),
                      [&](const auto& m) { return key(m.first, m.second) == k; })) {
        continue;
      }
      missing.emplace_back(kind, arg);
    }
    auto results = parallel_map(missing.size(), [&](std::size_t i) {
      Result r;
      try {
        r.sample = modulus(norm_, missing[i].first, missing[i].second, options_);
      } catch (const Error& e) {
        r.error = e.what();
      }
      return r;
    });
    for (std::size_t i = 0; i < missing.size(); ++i) {
      cache_.emplace(key(missing[i].first, missing[i].second), std::move(results[i]));
    }
  }

  const Result& get(const ModulusKind& kind, double arg) {
    const Key k = key(kind, arg);
    auto it = cache_.find(k);
    if (it == cache_.end()) {
      prefetch({{kind, arg}});
      it = cache_.find(k);
    }
    return it->second;
  }

 private:
  using Key = std::tuple<int, double, double>;
  static Key key(const ModulusKind& kind, double arg) {
    return {static_cast<int>(kind.family()), kind.t(), arg};
  }

  Norm norm_;
  const ModulusOptions& options_;
  std::map<Key, Result> cache_;
};

struct TermValue {
  double value = 0;
  double tol = 0;
  json witness;
};

std::variant<TermValue, std::string> evaluate_term(const Term& term, double eps, Evaluator& ev) {
  if (!term.kind) {
    const double v = term.closed(ev.norm(), eps);
    return TermValue{v, 0, json{{"label", term.label}, {"value", v}}};
  }
  const double arg = term.arg(eps);
  if (!term.kind->domain().contains(arg)) {
    return term.label + ": argument " + std::to_string(arg) + " outside " + term.kind->domain().describe();
  }
  const auto& r = ev.get(*term.kind, arg);
  if (!r.sample) return term.label + " at eps " + std::to_string(eps) + ": " + r.error;
  const double v = term.coef * r.sample->value + term.offset;
  return TermValue{v, std::abs(term.coef) * r.sample->refine_tol,
                   json{{"label", term.label},
                        {"modulus", term.kind->name()},
                        {"arg", arg},
                        {"coef", term.coef},
                        {"offset", term.offset},
                        {"value", v},
                        {"refine_tol", r.sample->refine_tol},
                        {"configuration", configuration_to_json(r.sample->witness)}}};
}

/// Running minimum of score = margin + allowance over a norm's instances.
struct Tracker {
  NormOutcome outcome;
  std::optional<double> best_score;
  bool failed = false;

  void offer(double margin, double allowance, const std::function<json()>& witness) {
    ++outcome.instances;
    const double score = margin + allowance;
    if (score < 0) failed = true;
    if (!best_score || score < *best_score) {
      best_score = score;
      outcome.worst_margin = margin;
      outcome.witness = witness();
    }
  }

  void skip(std::string reason) { outcome.skipped.push_back(std::move(reason)); }

  NormOutcome finish() {
    if (failed) {
      outcome.status = CheckStatus::fail;
    } else if (outcome.instances > 0) {
      outcome.status = CheckStatus::pass;
    } else {
      outcome.status = CheckStatus::skipped;
    }
    return std::move(outcome);
  }
};

void run_chains(const CheckSpec& spec, Evaluator& ev, Tracker& tr) {
  const auto grid = check_grid(spec);
  std::vector<std::pair<ModulusKind, double>> requests;
  for (double eps : grid) {
    for (const auto& chain : spec.chains) {
      for (const auto& t : chain) {
        if (t.kind && t.kind->domain().contains(t.arg(eps))) requests.emplace_back(*t.kind, t.arg(eps));
      }
    }
  }
  ev.prefetch(requests);
  const json norm_json = norm_to_json(ev.norm());
  for (double eps : grid) {
    for (const auto& chain : spec.chains) {
      std::vector<TermValue> values;
      std::string error;
      for (const auto& t : chain) {
        auto v = evaluate_term(t, eps, ev);
        if (auto* e = std::get_if<std::string>(&v)) {
          error = *e;
          break;
        }
        values.push_back(std::get<TermValue>(std::move(v)));
      }
      if (!error.empty()) {
        tr.skip(error);
        continue;
      }
      double sigma = 0;
      for (const auto& v : values) sigma += v.tol;
      for (std::size_t i = 1; i < values.size(); ++i) {
        const TermValue& lhs = spec.kind == CheckKind::coincidence ? values[0] : values[i - 1];
        const TermValue& rhs = values[i];
        const double margin = spec.kind == CheckKind::coincidence ? -std::abs(rhs.value - lhs.value)
                                                                 : rhs.value - lhs.value;
        tr.offer(margin, spec.slack + sigma, [&] {
          return json{{"norm", norm_json}, {"eps", eps}, {"sigma", sigma},
                      {"lhs", lhs.witness}, {"rhs", rhs.witness}};
        });
      }
    }
  }
}

void run_monotonicity(const CheckSpec& spec, Evaluator& ev, Tracker& tr) {
  const auto grid = check_grid(spec);
  std::vector<std::pair<ModulusKind, double>> requests;
  for (const auto& kind : spec.monotone) {
    for (double eps : grid) {
      if (kind.domain().contains(eps)) requests.emplace_back(kind, eps);
    }
  }
  ev.prefetch(requests);
  const json norm_json = norm_to_json(ev.norm());
  for (const auto& kind : spec.monotone) {
    Term term;
    term.label = kind.name();
    term.kind = kind;
    std::optional<std::pair<double, TermValue>> prev;
    for (double eps : grid) {
      if (!kind.domain().contains(eps)) continue;
      auto v = evaluate_term(term, eps, ev);
      if (auto* e = std::get_if<std::string>(&v)) {
        tr.skip(*e);
        prev.reset();
        continue;
      }
      auto cur = std::get<TermValue>(std::move(v));
      if (prev) {
        const double margin = cur.value - prev->second.value;
        const double sigma = cur.tol + prev->second.tol;
        tr.offer(margin, spec.slack + sigma, [&] {
          json l = prev->second.witness;
          json r = cur.witness;
          return json{{"norm", norm_json}, {"eps", prev->first}, {"eps_next", eps}, {"sigma", sigma},
                      {"lhs", l}, {"rhs", r}};
        });
      }
      prev.emplace(eps, std::move(cur));
    }
  }
}

json vec_json(const Vector2d& v) { return json::array({v(0), v(1)}); }

void run_figures(const CheckSpec& spec, std::size_t norm_index, const Norm& norm, std::uint64_t seed,
                 Tracker& tr) {
  auto gen = make_rng(seed, spec.id, norm_index);
  const json norm_json = norm_to_json(norm);
  std::size_t errors = 0;
  std::string first_error;
  for (int i = 0; i < spec.samples; ++i) {
    const double theta = 2 * kPi * uniform01(gen);
    const double u = uniform01(gen);
    const int sign = uniform01(gen) < 0.5 ? 1 : -1;
    const double eps = 1 - uniform01(gen);
    const double e1 = uniform01(gen);
    const double e2 = uniform01(gen);
    const double t = uniform01(gen);
    try {
      const Vector2d x = norm.sphere_point(theta);
      const QuasiNormalCone cone = quasi_normals(norm, x);
      const double alpha = cone.begin + u * cone.width;
      const Vector2d y = sign * norm.sphere_point(alpha);
      auto base = [&] {
        return json{{"norm", norm_json}, {"theta_x", theta}, {"y", vec_json(y)}, {"eps", eps}};
      };
      switch (spec.figure) {
        case FigureProperty::projection_bound: {
          const TriangleFigure fig = build_figure(norm, x, y, eps);
          const double m = check_projection_bound(norm, fig);
          tr.offer(m, spec.tolerance, [&] { return json{{"figure", figure_to_json(fig)}, {"case", base()}}; });
          break;
        }
        case FigureProperty::identity: {
          const TriangleFigure fig = build_figure(norm, x, y, eps);
          const double lhs = norm(Vector2d(fig.y1 - fig.z));
          const double rhs = pairing(fig.p, Vector2d(fig.x - fig.z));
          tr.offer(-std::abs(lhs - rhs), spec.tolerance, [&] {
            return json{{"figure", figure_to_json(fig)}, {"case", base()}, {"zy1", lhs}, {"p_x_minus_z", rhs}};
          });
          break;
        }
        case FigureProperty::lambda_range: {
          const double l = lambda_point(norm, x, y, eps);
          tr.offer(std::min(l, eps - l), spec.tolerance, [&] {
            json w = base();
            w["lambda"] = l;
            return w;
          });
          break;
        }
        case FigureProperty::lambda_convexity: {
          const double a = std::min(e1, e2);
          const double b = std::max(e1, e2);
          const double mid = t * a + (1 - t) * b;
          const double la = lambda_point(norm, x, y, a);
          const double lb = lambda_point(norm, x, y, b);
          const double lm = lambda_point(norm, x, y, mid);
          tr.offer(t * la + (1 - t) * lb - lm, spec.tolerance, [&] {
            json w = base();
            w.erase("eps");
            w["eps1"] = a;
            w["eps2"] = b;
            w["t"] = t;
            w["lambda1"] = la;
            w["lambda2"] = lb;
            w["lambda_mid"] = lm;
            return w;
          });
          break;
        }
      }
    } catch (const Error& e) {
      if (errors++ == 0) first_error = e.what();
    }
  }
  if (errors > 0) tr.skip(std::to_string(errors) + " samples rejected; first: " + first_error);
}

void run_area(const CheckSpec& spec, const Norm& norm, Tracker& tr) {
  if (!norm.is_smooth()) {
    tr.skip("area additivity is implemented for smooth norms only");
    return;
  }
  const json norm_json = norm_to_json(norm);
  for (double eps : check_grid(spec)) {
    const AreaAdditivity r = area_additivity_check(norm, eps, spec.samples);
    auto witness = [&] {
      return json{{"norm", norm_json}, {"eps", eps}, {"a1", r.a1}, {"a2", r.a2}, {"a3", r.a3}, {"defect", r.defect}};
    };
    tr.offer(spec.tolerance * r.a1 - std::abs(r.defect), 0, witness);
    if (norm.is_euclidean()) {
      const double expected = (1 + eps * eps) * kPi;
      tr.offer(spec.tolerance * expected - std::abs(r.a3 - expected), 0, witness);
    }
  }
}

std::string norm_key(const Norm& norm) { return norm_to_json(norm).dump(); }

json margin_json(const std::optional<double>& m) {
  if (!m || !std::isfinite(*m)) return nullptr;
  return *m;
}

}  // namespace

std::vector<Norm> default_norms() {
  return {Norm::euclidean(),
          Norm::lp(1),
          Norm::lp(1.5),
          Norm::lp(3),
          Norm::lp(std::numeric_limits<double>::infinity()),
          Norm::regular_polygon(6),
          Norm::regular_polygon(8)};
}

namespace {

Term mod(ModulusKind kind, std::string label, std::function<double(double)> arg = {}, double coef = 1,
         double offset = 0) {
  Term t;
  t.label = std::move(label);
  t.kind = kind;
  if (arg) t.arg = std::move(arg);
  t.coef = coef;
  t.offset = offset;
  return t;
}

Term closed(std::string label, std::function<double(const Norm&, double)> f) {
  Term t;
  t.label = std::move(label);
  t.closed = std::move(f);
  return t;
}

Term hilbert(const ModulusKind& kind) {
  return closed("hilbert " + kind.name() + "(eps)", [kind](const Norm&, double e) { return hilbert_reference(kind, e); });
}

/// sup ⟨p, x − z⟩ over p ∈ J(x) and sphere pairs with ‖x − z‖ ≤ ε, on a
/// coarse angle grid. Every grid pair is feasible, so this bounds φ⁺ from below.
double phi_plus_le_form(const Norm& norm, double eps) {
  constexpr int n = 256;
  std::vector<Vector2d> pts;
  for (int i = 0; i < n; ++i) pts.push_back(norm.sphere_point(2 * kPi * i / n));
  double best = 0;
  for (const auto& x : pts) {
    const auto j = norm.support_set_unchecked(x);
    for (const auto& z : pts) {
      const Vector2d d = x - z;
      if (norm.eval_unchecked(d) > eps) continue;
      best = std::max({best, pairing(j.minus, d), pairing(j.plus, d)});
    }
  }
  return best;
}

}  // namespace

std::vector<CheckSpec> default_suite(const std::vector<Norm>& norms, double slack) {
  using F = ModulusFamily;
  const auto half = [](double e) { return e / 2; };
  const auto twice = [](double e) { return 2 * e; };
  const auto quarter = [](double e) { return e / 4; };
  const auto four = [](double e) { return 4 * e; };
  const auto shrink = [](double e) { return e / (1 + e); };
  const Term zero = closed("0", [](const Norm&, double) { return 0.0; });
  const Term one = closed("1", [](const Norm&, double) { return 1.0; });
  const Term eps = closed("eps", [](const Norm&, double e) { return e; });

  std::vector<CheckSpec> out;
  auto add = [&](std::string id, CheckKind kind, std::string description, Domain domain) -> CheckSpec& {
    CheckSpec s;
    s.id = std::move(id);
    s.kind = kind;
    s.description = std::move(description);
    s.norms = norms;
    s.domain = domain;
    s.slack = slack;
    out.push_back(std::move(s));
    return out.back();
  };
  const auto ineq = CheckKind::inequality;

  add("eq5-lambda-le-eps", ineq, "0 <= lambda-(eps) <= lambda+(eps) <= eps", {0, 1})
      .chains = {{zero, mod(F::lambda_minus, "lambda-minus(eps)"), mod(F::lambda_plus, "lambda-plus(eps)"), eps}};
  add("eq3-rho-lambda-plus", ineq, "rho(eps/2) <= lambda+(eps) <= rho(2eps)", {0, 0.5})
      .chains = {{mod(F::rho, "rho(eps/2)", half), mod(F::lambda_plus, "lambda-plus(eps)"),
                  mod(F::rho, "rho(2eps)", twice)}};
  add("eq4-delta-lambda-minus", ineq, "delta(eps) <= lambda-(eps) <= delta(2eps)", {0, 1})
      .chains = {{mod(F::delta, "delta(eps)"), mod(F::lambda_minus, "lambda-minus(eps)"),
                  mod(F::delta, "delta(2eps)", twice)}};
  add("phi-minus-lambda-sandwich", ineq, "lambda-(eps/2) <= phi-(eps) <= lambda-(2eps)", {0, 0.5})
      .chains = {{mod(F::lambda_minus, "lambda-minus(eps/2)", half), mod(F::phi_minus, "phi-minus(eps)"),
                  mod(F::lambda_minus, "lambda-minus(2eps)", twice)}};
  add("phi-plus-lambda-sandwich", ineq, "lambda+(eps/2) <= phi+(eps) <= lambda+(2eps)", {0, 0.5})
      .chains = {{mod(F::lambda_plus, "lambda-plus(eps/2)", half), mod(F::phi_plus, "phi-plus(eps)"),
                  mod(F::lambda_plus, "lambda-plus(2eps)", twice)}};
  add("phi-plus-rho-sandwich", ineq, "rho(eps/4) <= phi+(eps) <= rho(4eps)", {0, 0.5})
      .chains = {{mod(F::rho, "rho(eps/4)", quarter), mod(F::phi_plus, "phi-plus(eps)"),
                  mod(F::rho, "rho(4eps)", four)}};
  add("phi-minus-delta-sandwich", ineq, "delta(eps) <= phi-(eps) <= delta(4eps)", {0, 0.5})
      .chains = {{mod(F::delta, "delta(eps)"), mod(F::phi_minus, "phi-minus(eps)"),
                  mod(F::delta, "delta(4eps)", four)}};
  {
    auto& s = add("delta-t-day-nordlander", ineq,
                  "delta(eps,t) <= 1 - sqrt(1 - t(1-t)eps^2) <= beta(eps,t), t in {0.25, 0.5, 0.75}", {0, 2});
    for (double t : {0.25, 0.5, 0.75}) {
      const auto dt = ModulusKind::delta_t(t);
      const auto bt = ModulusKind::beta_t(t);
      s.chains.push_back({mod(dt, dt.name()), hilbert(dt), mod(bt, bt.name())});
    }
  }
  add("phi-day-nordlander", ineq, "phi-(eps) <= eps^2/2 <= phi+(eps)", {0, 2})
      .chains = {{mod(F::phi_minus, "phi-minus(eps)"), hilbert(F::phi_minus), mod(F::phi_plus, "phi-plus(eps)")}};
  add("zeta-minus-lambda-sandwich", ineq, "lambda-(eps/(1+eps)) <= zeta-(eps) - 1 <= lambda-(eps)", {0, 1})
      .chains = {{mod(F::lambda_minus, "lambda-minus(eps/(1+eps))", shrink),
                  mod(F::zeta_minus, "zeta-minus(eps) - 1", {}, 1, -1), mod(F::lambda_minus, "lambda-minus(eps)")}};
  add("zeta-plus-lambda-sandwich", ineq, "lambda+(eps/(1+eps)) <= zeta+(eps) - 1 <= lambda+(eps)", {0, 1})
      .chains = {{mod(F::lambda_plus, "lambda-plus(eps/(1+eps))", shrink),
                  mod(F::zeta_plus, "zeta-plus(eps) - 1", {}, 1, -1), mod(F::lambda_plus, "lambda-plus(eps)")}};
  add("zeta-day-nordlander", ineq, "zeta-(eps) <= sqrt(1+eps^2) <= zeta+(eps)", {0, 1})
      .chains = {{mod(F::zeta_minus, "zeta-minus(eps)"), hilbert(F::zeta_minus), mod(F::zeta_plus, "zeta-plus(eps)")}};
  add("gamma-monotone", CheckKind::monotonicity, "gamma- and gamma+ nondecreasing on [0, 2]", {0, 2})
      .monotone = {F::gamma_minus, F::gamma_plus};
  add("gamma-plus-phi-plus-sandwich", ineq, "phi+(eps) <= gamma+(eps) <= 2 phi+(eps)", {0, 2})
      .chains = {{mod(F::phi_plus, "phi-plus(eps)"), mod(F::gamma_plus, "gamma-plus(eps)"),
                  mod(F::phi_plus, "2 phi-plus(eps)", {}, 2)}};
  add("gamma-minus-phi-minus-sandwich", ineq, "2 phi-(eps/4) <= gamma-(eps/4) <= phi-(eps)", {0, 1})
      .chains = {{mod(F::phi_minus, "2 phi-minus(eps/4)", quarter, 2), mod(F::gamma_minus, "gamma-minus(eps/4)", quarter),
                  mod(F::phi_minus, "phi-minus(eps)")}};
  add("zeta-triangle-envelope", ineq, "1 <= zeta-(eps) and zeta+(eps) <= 1 + eps", {0, 1})
      .chains = {{one, mod(F::zeta_minus, "zeta-minus(eps)")},
                 {mod(F::zeta_plus, "zeta-plus(eps)"), closed("1 + eps", [](const Norm&, double e) { return 1 + e; })}};
  add("gamma-plus-envelope", ineq, "gamma+(eps) <= 2 eps", {0, 2})
      .chains = {{mod(F::gamma_plus, "gamma-plus(eps)"), closed("2 eps", [](const Norm&, double e) { return 2 * e; })}};
  add("d-plus-envelope", ineq, "d+(eps) <= 2", {0, 2})
      .chains = {{mod(F::d_plus, "d-plus(eps)"), closed("2", [](const Norm&, double) { return 2.0; })}};
  add("monotone-moduli", CheckKind::monotonicity, "delta, banas, lambda+-, phi+-, zeta+- nondecreasing", {0, 2})
      .monotone = {F::delta, F::banas, F::lambda_minus, F::lambda_plus, F::phi_minus, F::phi_plus,
                   F::zeta_minus, F::zeta_plus};
  {
    auto& s = add("phi-plus-le-form", ineq, "phi+ over chords of length <= eps (coarse grid) <= phi+(eps)", {0, 2});
    s.grid_points = 9;
    s.chains = {{closed("phi-plus <=-form(eps)", phi_plus_le_form), mod(F::phi_plus, "phi-plus(eps)")}};
  }
  {
    auto& s = add("euclidean-coincidence", CheckKind::coincidence,
                  "Euclidean plane: minus/plus moduli coincide with the closed forms", {0, 1});
    s.euclidean_only = true;
    auto group = [&](std::vector<ModulusKind> kinds) {
      std::vector<Term> chain{hilbert(kinds.front())};
      for (const auto& k : kinds) chain.push_back(mod(k, k.name()));
      s.chains.push_back(std::move(chain));
    };
    group({F::delta, F::banas});
    group({F::rho});
    group({F::lambda_minus, F::lambda_plus});
    group({F::phi_minus, F::phi_plus});
    group({F::zeta_minus, F::zeta_plus});
    group({F::gamma_minus, F::gamma_plus});
    group({F::d_minus, F::d_plus});
    group({F::milman_minus, F::milman_plus});
    group({ModulusKind::delta_t(0.5), ModulusKind::beta_t(0.5)});
  }
  auto figure = [&](std::string id, std::string description, FigureProperty p, int samples, double tol) {
    auto& s = add(std::move(id), CheckKind::figure, std::move(description), {0, 1});
    s.figure = p;
    s.samples = samples;
    s.tolerance = tol;
  };
  figure("projection-bound", "2||y1 - x|| >= ||x - z|| on random figures", FigureProperty::projection_bound, 10000,
         1e-9);
  figure("figure-identity", "||y1 - z|| = <p, x - z> on random figures", FigureProperty::identity, 10000, 1e-8);
  figure("lambda-point-range", "0 <= lambda(x, y, eps) <= eps on random figures", FigureProperty::lambda_range, 10000,
         1e-9);
  figure("lambda-convexity", "lambda(x, y, .) convex on [0, 1]", FigureProperty::lambda_convexity, 1000, 1e-8);
  {
    auto& s = add("area-additivity", CheckKind::area_additivity,
                  "area(f1 + f2) = area(f1) + area(f2) within 0.5% of the unit-ball area", {0, 1});
    s.eps_grid = {0.25, 0.5, 1.0};
    s.samples = 4096;
    s.tolerance = 0.005;
  }
  return out;
}

std::vector<CheckSpec> select_checks(const std::vector<CheckSpec>& all, const std::vector<std::string>& tokens) {
  std::vector<CheckSpec> out;
  std::vector<std::string> unknown;
  for (const auto& tok : tokens) {
    bool any = false;
    for (const auto& s : all) {
      if (s.id == tok || s.id.starts_with(tok + "-")) {
        any = true;
        if (std::none_of(out.begin(), out.end(), [&](const CheckSpec& o) { return o.id == s.id; })) out.push_back(s);
      }
    }
    if (!any) unknown.push_back(tok);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown check id";
    for (const auto& u : unknown) msg += " '" + u + "'";
    msg += "; valid ids:";
    for (const auto& s : all) msg += " " + s.id;
    throw InputError(msg);
  }
  return out;
}

VerificationReport run_suite(const std::vector<CheckSpec>& specs, const SuiteOptions& options) {
  VerificationReport report;
  std::vector<std::string> labels;
  std::map<std::string, Evaluator> evaluators;
  for (const auto& spec : specs) {
    if (spec.slack < 0) throw InputError("check '" + spec.id + "': slack must be >= 0");
    for (const auto& n : spec.norms) {
      const std::string label = norm_label(n);
      if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
    }
  }
  report.suite = {{"seed", options.seed},
                  {"grid_n", options.modulus.grid_n},
                  {"refine_rounds", options.modulus.refine_rounds},
                  {"keep", options.modulus.keep},
                  {"cone_samples", options.modulus.cone_samples},
                  {"slack", options.slack},
                  {"norms", labels},
                  {"tool_version", kToolVersion}};

  for (const auto& spec : specs) {
    const auto start = std::chrono::steady_clock::now();
    CheckRecord rec;
    rec.id = spec.id;
    rec.kind = spec.kind;
    rec.description = spec.description;
    std::optional<double> best_score;
    bool failed = false;
    bool passed = false;
    for (std::size_t ni = 0; ni < spec.norms.size(); ++ni) {
      const Norm& norm = spec.norms[ni];
      Tracker tr;
      tr.outcome.norm = norm_label(norm);
      if (spec.euclidean_only && !norm.is_euclidean()) {
        tr.skip("applies to the Euclidean plane only");
      } else {
        switch (spec.kind) {
          case CheckKind::inequality:
          case CheckKind::coincidence:
          case CheckKind::monotonicity: {
            const std::string key = norm_key(norm);
            auto it = evaluators.find(key);
            if (it == evaluators.end()) it = evaluators.try_emplace(key, norm, options.modulus).first;
            if (spec.kind == CheckKind::monotonicity) {
              run_monotonicity(spec, it->second, tr);
            } else {
              run_chains(spec, it->second, tr);
            }
            break;
          }
          case CheckKind::figure:
            run_figures(spec, ni, norm, options.seed, tr);
            break;
          case CheckKind::area_additivity:
            run_area(spec, norm, tr);
            break;
          case CheckKind::conjecture_probe:
            throw InputError("conjecture probes run through probe_conjectures");
        }
      }
      const std::optional<double> score = tr.best_score;
      NormOutcome o = tr.finish();
      failed = failed || o.status == CheckStatus::fail;
      passed = passed || o.status == CheckStatus::pass;
      if (score && (!best_score || *score < *best_score)) {
        best_score = score;
        rec.worst_margin = o.worst_margin;
        rec.witness = o.witness;
      }
      rec.norms.push_back(std::move(o));
    }
    rec.status = failed ? CheckStatus::fail : (passed ? CheckStatus::pass : CheckStatus::skipped);
    if (options.timings) {
      rec.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                           .count();
    }
    report.checks.push_back(std::move(rec));
  }
  std::stable_sort(report.checks.begin(), report.checks.end(),
                   [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
  return report;
}

bool has_failure(const VerificationReport& report) {
  return std::any_of(report.checks.begin(), report.checks.end(),
                     [](const CheckRecord& c) { return c.status == CheckStatus::fail; });
}

json report_to_json(const VerificationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    json norms = json::array();
    for (const auto& n : c.norms) {
      json j = {{"norm", n.norm},
                {"status", to_string(n.status)},
                {"worst_margin", margin_json(n.worst_margin)},
                {"instances", n.instances}};
      if (!n.witness.is_null()) j["witness"] = n.witness;
      if (!n.skipped.empty()) j["skipped"] = n.skipped;
      norms.push_back(std::move(j));
    }
    json j = {{"id", c.id},
              {"kind", to_string(c.kind)},
              {"description", c.description},
              {"status", to_string(c.status)},
              {"worst_margin", margin_json(c.worst_margin)},
              {"witness", c.witness},
              {"runtime_ms", c.runtime_ms},
              {"norms", norms}};
    if (!c.extra.is_null()) j["details"] = c.extra;
    checks.push_back(std::move(j));
  }
  return {{"suite", report.suite}, {"checks", checks}};
}

double gamma_monotonicity_check(const Norm& norm, const std::vector<double>& eps_grid, const ModulusOptions& options) {
  if (!std::is_sorted(eps_grid.begin(), eps_grid.end())) throw InputError("gamma_monotonicity_check: grid not sorted");
  double worst = std::numeric_limits<double>::infinity();
  if (eps_grid.size() < 2) return worst;
  for (ModulusKind kind : {ModulusKind(ModulusFamily::gamma_minus), ModulusKind(ModulusFamily::gamma_plus)}) {
    const auto curve = parallel_map(eps_grid.size(), [&](std::size_t i) {
      return modulus(norm, kind, eps_grid[i], options).value;
    });
    for (std::size_t i = 1; i < curve.size(); ++i) worst = std::min(worst, curve[i] - curve[i - 1]);
  }
  return worst;
}

double replay_witness_term(const json& witness, const std::string& side, const ModulusOptions& options) {
  try {
    const Norm norm = norm_from_json(witness.at("norm"));
    const json& t = witness.at(side);
    if (!t.contains("modulus")) return t.at("value").get<double>();
    const auto kind = ModulusKind::parse(t.at("modulus").get<std::string>());
    const double v = evaluate_configuration(norm, kind, t.at("arg").get<double>(),
                                            configuration_from_json(t.at("configuration")), options);
    return t.at("coef").get<double>() * v + t.at("offset").get<double>();
  } catch (const json::exception& e) {
    throw InputError(std::string("witness JSON: ") + e.what());
  }
}

}  // namespace moduli
