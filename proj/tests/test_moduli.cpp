#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "moduli/moduli.hpp"
#include "oracles.hpp"

using namespace moduli;
using MF = ModulusFamily;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double value(const Norm& n, const ModulusKind& k, double eps, const ModulusOptions& o = {}) {
  return modulus(n, k, eps, o).value;
}

double lp_dual(double p, const DualVector2d& g) {
  const double q = p / (p - 1);
  return std::pow(std::pow(std::abs(g(0)), q) + std::pow(std::abs(g(1)), q), 1 / q);
}

struct ChordExtremes {
  double delta = kInf;
  double banas = -kInf;
  double phi_minus = kInf;
  double phi_plus = -kInf;
  double gamma_minus = kInf;
  double gamma_plus = -kInf;
  double d_minus = kInf;
  double d_plus = -kInf;
};

/// Brute-force extremes of the chord moduli of lp(p), p > 1, at one ε.
ChordExtremes lp_chord_scan(double p, double eps) {
  const Norm n = Norm::lp(p);
  ChordExtremes e;
  oracle::chord_pairs(n, eps, 1500, 1500, [&](const Vector2d& x, const Vector2d& z) {
    const DualVector2d px = oracle::lp_gradient(p, x);
    const DualVector2d pz = oracle::lp_gradient(p, z);
    const double conv = 1 - n(Vector2d(x + z)) / 2;
    const double phi = pairing(px, Vector2d(x - z));
    const double gamma = pairing(DualVector2d(px - pz), Vector2d(x - z));
    const double d = lp_dual(p, DualVector2d(px - pz));
    e.delta = std::min(e.delta, conv);
    e.banas = std::max(e.banas, conv);
    e.phi_minus = std::min(e.phi_minus, phi);
    e.phi_plus = std::max(e.phi_plus, phi);
    e.gamma_minus = std::min(e.gamma_minus, gamma);
    e.gamma_plus = std::max(e.gamma_plus, gamma);
    e.d_minus = std::min(e.d_minus, d);
    e.d_plus = std::max(e.d_plus, d);
  });
  return e;
}

/// inf / sup over (x, y) sphere pairs: a uniform angle grid, then three
/// rounds of dense local rescans around the best cell.
double pair_grid(const Norm& n, int grid, bool sup, const std::function<double(const Vector2d&, const Vector2d&)>& f) {
  auto at = [&](double a, double b) { return f(oracle::on_sphere(n, a), oracle::on_sphere(n, b)); };
  auto improves = [&](double v, double best) { return sup ? v > best : v < best; };
  double best = sup ? -kInf : kInf;
  double ba = 0;
  double bb = 0;
  double h = 2 * oracle::kPi / grid;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double v = at(i * h, j * h);
      if (improves(v, best)) {
        best = v;
        ba = i * h;
        bb = j * h;
      }
    }
  }
  for (int round = 0; round < 3; ++round) {
    const double ca = ba;
    const double cb = bb;
    const double w = 2 * h;
    h = w / 50;
    for (int i = -100; i <= 100; ++i) {
      for (int j = -100; j <= 100; ++j) {
        const double v = at(ca + i * h, cb + j * h);
        if (improves(v, best)) {
          best = v;
          ba = ca + i * h;
          bb = cb + j * h;
        }
      }
    }
  }
  return best;
}

/// Extremes of λ and ζ for a smooth lp norm, with y taken from the kernel of
/// the hand-computed gradient.
struct ConeExtremes {
  double lambda_minus = kInf;
  double lambda_plus = -kInf;
  double zeta_minus = kInf;
  double zeta_plus = -kInf;
};

ConeExtremes lp_cone_scan(double p, double eps) {
  const Norm n = Norm::lp(p);
  ConeExtremes e;
  for (int i = 0; i < 2000; ++i) {
    const Vector2d x = oracle::on_sphere(n, 2 * oracle::kPi * i / 2000);
    const DualVector2d g = oracle::lp_gradient(p, x);
    Vector2d y(-g(1), g(0));
    y /= n(y);
    for (double s : {1.0, -1.0}) {
      const double l = oracle::lambda_scan(n, x, Vector2d(s * y), eps);
      const double z = n(Vector2d(x + s * eps * y));
      e.lambda_minus = std::min(e.lambda_minus, l);
      e.lambda_plus = std::max(e.lambda_plus, l);
      e.zeta_minus = std::min(e.zeta_minus, z);
      e.zeta_plus = std::max(e.zeta_plus, z);
    }
  }
  return e;
}

std::vector<ModulusKind> all_kinds() {
  return {MF::delta,       MF::rho,        MF::banas,       MF::lambda_minus,   MF::lambda_plus,
          MF::phi_minus,   MF::phi_plus,   MF::zeta_minus,  MF::zeta_plus,      MF::gamma_minus,
          MF::gamma_plus,  MF::d_minus,    MF::d_plus,      MF::milman_minus,   MF::milman_plus,
          ModulusKind::delta_t(0.25),      ModulusKind::beta_t(0.3)};
}

ModulusOptions fast() {
  ModulusOptions o;
  o.grid_n = 128;
  o.inner_grid_n = 64;
  return o;
}

}  // namespace

TEST_CASE("Euclidean examples") {
  const Norm e = Norm::euclidean();
  CHECK(value(e, MF::phi_minus, 0.5) == doctest::Approx(0.125).epsilon(1e-6));
  CHECK(value(e, MF::zeta_plus, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(value(e, MF::lambda_minus, 0.6) == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(value(e, MF::gamma_minus, 0.5) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(value(e, MF::d_minus, 0.3) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(value(e, ModulusKind::delta_t(0.25), 1) == doctest::Approx(1 - std::sqrt(1 - 0.1875)).epsilon(1e-6));
  CHECK(value(e, MF::banas, 1) == doctest::Approx(1 - std::sqrt(3.0) / 2).epsilon(1e-6));
}

TEST_CASE("every kind matches its Euclidean closed form") {
  const Norm e = Norm::euclidean();
  for (const auto& k : all_kinds()) {
    for (double eps : {0.3, 0.8}) {
      const auto s = modulus(e, k, eps, fast());
      CHECK_MESSAGE(std::abs(s.value - hilbert_reference(k, eps)) <= 1e-6 + s.refine_tol, k.name(), " at ", eps);
    }
  }
}

TEST_CASE("lp(inf) exact values") {
  const Norm box = Norm::lp(kInf);
  CHECK(value(box, MF::zeta_minus, 0.7) == doctest::Approx(1).epsilon(1e-12));
  CHECK(std::abs(value(box, MF::phi_minus, 0.8)) < 1e-12);
  for (double eps : {0.25, 0.5, 1.0}) {
    CHECK(std::abs(value(box, MF::lambda_minus, eps)) < 1e-12);
    CHECK(value(box, MF::lambda_plus, eps) == doctest::Approx(eps).epsilon(1e-6));
    CHECK(value(box, MF::zeta_plus, eps) == doctest::Approx(1 + eps).epsilon(1e-6));
    CHECK(std::abs(value(box, MF::delta, eps)) < 1e-12);
    CHECK(value(box, MF::banas, eps) == doctest::Approx(eps / 2).epsilon(1e-6));
    CHECK(value(box, MF::rho, eps, fast()) == doctest::Approx(eps).epsilon(1e-6));
    CHECK(std::abs(value(box, MF::gamma_minus, eps)) < 1e-12);
    CHECK(std::abs(value(box, MF::d_minus, eps)) < 1e-12);
  }
}

TEST_CASE("regular hexagon exact values") {
  const Norm hex = Norm::regular_polygon(6);
  // every edge has length 1 in its own norm and lies in a quasi-normal cone
  for (double eps : {0.3, 0.7, 1.0}) {
    CHECK(std::abs(value(hex, MF::lambda_minus, eps)) < 1e-12);
    CHECK(value(hex, MF::zeta_minus, eps) == doctest::Approx(1).epsilon(1e-12));
    CHECK(std::abs(value(hex, MF::phi_minus, eps)) < 1e-12);
  }
}

TEST_CASE("hexagon Milman lower modulus is positive where zeta-minus is 1") {
  const Norm hex = Norm::regular_polygon(6);
  const double brute = pair_grid(hex, 360, false, [&](const Vector2d& x, const Vector2d& y) {
    return std::max(hex(Vector2d(x + y)), hex(Vector2d(x - y))) - 1;
  });
  CHECK(brute > 0.1);
  const auto s = modulus(hex, MF::milman_minus, 1);
  CHECK(s.value <= brute + s.refine_tol + 1e-9);
  CHECK(s.value >= brute - 1e-6);
  CHECK(value(hex, MF::zeta_minus, 1) - 1 < s.value - 0.1);
}

TEST_CASE("chord moduli of lp(3) against the brute-force scan") {
  const double p = 3;
  const Norm n = Norm::lp(p);
  for (double eps : {0.5, 1.0, 1.5}) {
    const ChordExtremes o = lp_chord_scan(p, eps);
    auto agree = [&](const ModulusKind& k, double expected) {
      const auto s = modulus(n, k, eps);
      CHECK_MESSAGE(std::abs(s.value - expected) <= 5e-5, k.name(), " eps=", eps, " engine=", s.value,
                    " oracle=", expected);
      // the engine should be at least as extreme as the coarse scan, up to its interpolation error
      const double gap = k.mode() == Mode::inf ? s.value - expected : expected - s.value;
      CHECK_MESSAGE(gap <= 1e-6, k.name(), " eps=", eps);
    };
    agree(MF::delta, o.delta);
    agree(MF::banas, o.banas);
    agree(MF::phi_minus, o.phi_minus);
    agree(MF::phi_plus, o.phi_plus);
    agree(MF::gamma_minus, o.gamma_minus);
    agree(MF::gamma_plus, o.gamma_plus);
    agree(MF::d_minus, o.d_minus);
    agree(MF::d_plus, o.d_plus);
  }
}

TEST_CASE("cone moduli of lp(3) against tangent scans") {
  const double p = 3;
  const Norm n = Norm::lp(p);
  for (double eps : {0.3, 0.7, 1.0}) {
    const ConeExtremes o = lp_cone_scan(p, eps);
    // the scan sees 2000 directions, so the engine may only be more extreme
    auto inf_ok = [](double engine, double scan) { return engine <= scan + 1e-9 && engine >= scan - 2e-5; };
    auto sup_ok = [](double engine, double scan) { return engine >= scan - 1e-9 && engine <= scan + 2e-5; };
    CHECK(inf_ok(value(n, MF::lambda_minus, eps), o.lambda_minus));
    CHECK(sup_ok(value(n, MF::lambda_plus, eps), o.lambda_plus));
    CHECK(inf_ok(value(n, MF::zeta_minus, eps), o.zeta_minus));
    CHECK(sup_ok(value(n, MF::zeta_plus, eps), o.zeta_plus));
  }
  const double z = value(n, MF::zeta_minus, 0.5);
  CHECK(z >= 1);
  CHECK(z <= 1.5);
}

TEST_CASE("nested moduli against a pair grid") {
  for (const Norm& n : {Norm::lp(3), Norm::regular_polygon(6)}) {
    for (double eps : {0.5, 1.5}) {
      const double rho = pair_grid(n, 240, true, [&](const Vector2d& x, const Vector2d& y) {
        return (n(Vector2d(x + eps * y)) + n(Vector2d(x - eps * y))) / 2 - 1;
      });
      const double bm = pair_grid(n, 240, false, [&](const Vector2d& x, const Vector2d& y) {
        return std::max(n(Vector2d(x + eps * y)), n(Vector2d(x - eps * y))) - 1;
      });
      const double bp = pair_grid(n, 240, true, [&](const Vector2d& x, const Vector2d& y) {
        return std::min(n(Vector2d(x + eps * y)), n(Vector2d(x - eps * y))) - 1;
      });
      const double r = value(n, MF::rho, eps);
      CHECK(r >= rho - 1e-9);
      CHECK(r <= rho + 1e-6);
      const double m = value(n, MF::milman_minus, eps);
      CHECK(m <= bm + 1e-9);
      CHECK(m >= bm - 1e-6);
      const double q = value(n, MF::milman_plus, eps);
      CHECK(q >= bp - 1e-9);
      CHECK(q <= bp + 1e-6);
    }
  }
}

TEST_CASE("witness replay") {
  for (const Norm& n : {Norm::lp(3), Norm::regular_polygon(6), Norm::lp(1)}) {
    for (const auto& k : all_kinds()) {
      const double eps = k.domain().upper >= 2 ? 1.3 : 0.7;
      const auto s = modulus(n, k, eps, fast());
      const auto back = configuration_from_json(configuration_to_json(s.witness));
      CHECK_MESSAGE(std::abs(evaluate_configuration(n, k, eps, back, fast()) - s.value) <= 1e-9, k.name());
    }
  }
}

TEST_CASE("eps zero") {
  for (const auto& k : all_kinds()) {
    const auto s = modulus(Norm::lp(3), k, 0);
    CHECK(s.value == k.value_at_zero());
    CHECK(s.refine_tol == 0);
  }
}

TEST_CASE("domains") {
  CHECK_THROWS_AS(modulus(Norm::euclidean(), MF::lambda_minus, 1.5), DomainError);
  CHECK_THROWS_AS(modulus(Norm::euclidean(), MF::phi_plus, 2.5), DomainError);
  CHECK_THROWS_AS(modulus(Norm::euclidean(), MF::delta, -0.1), DomainError);
  CHECK_THROWS_AS(modulus(Norm::euclidean(), MF::zeta_plus, kInf), DomainError);
  CHECK_NOTHROW(modulus(Norm::euclidean(), MF::zeta_plus, 3, fast()));
  CHECK_NOTHROW(modulus(Norm::euclidean(), MF::rho, 5, fast()));
  ModulusOptions coarse;
  coarse.grid_n = 16;
  CHECK_THROWS_AS(modulus(Norm::euclidean(), MF::delta, 1, coarse), InputError);
  try {
    modulus(Norm::euclidean(), MF::lambda_plus, 2);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("[0, 1]") != std::string::npos);
  }
  CHECK(ModulusKind(MF::rho).domain().describe() == "[0, inf)");
  CHECK_THROWS_AS(ModulusKind::delta_t(1), DomainError);
}

TEST_CASE("curves") {
  const std::vector<double> grid{0.2, 0.4, 0.6};
  const auto c = modulus_curve(Norm::euclidean(), MF::lambda_plus, grid);
  REQUIRE(c.samples.size() == 3);
  CHECK(c.samples[0].value == doctest::Approx(1 - std::sqrt(0.96)).epsilon(1e-6));
  CHECK(c.samples[1].value == doctest::Approx(1 - std::sqrt(0.84)).epsilon(1e-6));
  CHECK(c.samples[2].value == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(modulus_curve(Norm::lp(3), MF::delta, std::vector<double>{}).samples.empty());
  const std::vector<double> bad{0.4, 0.2};
  CHECK_THROWS_AS(modulus_curve(Norm::euclidean(), MF::delta, bad), InputError);
  const std::vector<double> out_of_domain{0.5, 1.5};
  CHECK_THROWS_AS(modulus_curve(Norm::euclidean(), MF::lambda_plus, out_of_domain), DomainError);
}

TEST_CASE("parallel curve equals sequential evaluation") {
  const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3};
  const Norm n = Norm::regular_polygon(8);
  setenv("MODULI_THREADS", "4", 1);
  const auto par = modulus_curve(n, MF::gamma_plus, grid, fast());
  setenv("MODULI_THREADS", "1", 1);
  const auto seq = modulus_curve(n, MF::gamma_plus, grid, fast());
  unsetenv("MODULI_THREADS");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(par.samples[i].value == seq.samples[i].value);
    CHECK(par.samples[i].refine_tol == seq.samples[i].refine_tol);
    CHECK(par.samples[i].value == modulus(n, MF::gamma_plus, grid[i], fast()).value);
  }
}

TEST_CASE("kind names") {
  for (const auto& k : all_kinds()) CHECK(ModulusKind::parse(k.name()) == k);
  CHECK(ModulusKind::parse("delta-t:0.25") == ModulusKind::delta_t(0.25));
  CHECK(ModulusKind::parse("delta-t(0.5)").t() == 0.5);
  CHECK_THROWS_AS(ModulusKind::parse("bogus"), InputError);
  CHECK_THROWS_AS(ModulusKind::parse("delta-t(x)"), InputError);
  CHECK_THROWS_AS(ModulusKind::parse("delta-t(1.5)"), DomainError);
}

TEST_CASE("Euclidean closed forms") {
  CHECK(hilbert_reference(MF::lambda_minus, 0.6) == doctest::Approx(0.2));
  CHECK(hilbert_reference(MF::phi_plus, 1) == doctest::Approx(0.5));
  CHECK(hilbert_reference(ModulusKind::delta_t(0.5), 1) == doctest::Approx(1 - std::sqrt(0.75)));
  CHECK_THROWS_AS(hilbert_reference(MF::lambda_minus, 2), DomainError);
}

TEST_CASE("chord partner") {
  for (const Norm& n : {Norm::lp(3), Norm::regular_polygon(6), Norm::lp(kInf)}) {
    for (int i = 0; i < 50; ++i) {
      const double theta = 0.1257 * i;
      const Vector2d x = n.sphere_point(theta);
      for (double eps : {0.2, 1.0, 1.9}) {
        for (int side : {1, -1}) {
          for (int root : {0, 1}) {
            const auto t2 = chord_partner(n, theta, eps, side, root);
            REQUIRE(t2);
            CHECK(std::abs(n(Vector2d(x - n.sphere_point(*t2))) - eps) < 1e-9);
          }
          CHECK(*chord_partner(n, theta, eps, side, 0) * side <= *chord_partner(n, theta, eps, side, 1) * side + 1e-12);
        }
      }
    }
  }
  // the sphere has diameter 2 in its own norm
  CHECK_FALSE(chord_partner(Norm::lp(3), 0.3, 2.5, 1, 0));
  CHECK(*chord_partner(Norm::lp(3), 0.3, 0, 1, 0) == 0.3);
}

TEST_CASE("area additivity") {
  const auto e = area_additivity_check(Norm::euclidean(), 0.5, 4096);
  CHECK(e.a1 == doctest::Approx(oracle::kPi).epsilon(1e-5));
  CHECK(e.a2 == doctest::Approx(oracle::kPi / 4).epsilon(1e-5));
  CHECK(e.a3 == doctest::Approx(1.25 * oracle::kPi).epsilon(1e-5));
  CHECK(std::abs(e.defect) <= 0.005 * e.a1);

  const auto l = area_additivity_check(Norm::lp(3), 0.5, 4096);
  CHECK(std::abs(l.defect) <= 0.005 * l.a1);

  const auto z = area_additivity_check(Norm::lp(3), 0, 4096);
  CHECK(z.a2 == 0);
  CHECK(z.defect == 0);

  CHECK_THROWS_AS(area_additivity_check(Norm::lp(kInf), 0.5, 4096), UnsupportedError);
  CHECK_THROWS_AS(area_additivity_check(Norm::lp(3), 0.5, 100), InputError);
  CHECK(unit_ball_area(Norm::lp(kInf), 4096) == doctest::Approx(4).epsilon(1e-12));
}
