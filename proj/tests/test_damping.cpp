#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "tlskick/damping.hpp"

using namespace tlskick;
using std::numbers::pi;

namespace {

constexpr double kTau = 2.0 * pi;
const double kDe = oracle::kReferenceDeltaEpsilon;

std::vector<double> grid(double t_end, std::size_t n) {
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = t_end * static_cast<double>(i) / static_cast<double>(n);
  return t;
}

// T2 that puts beta = factor * delta_epsilon.
double t2_for_beta(double de, double factor) { return 1.0 / (2.0 * factor * de); }

}  // namespace

TEST_CASE("t2_from_sigma: reference kick strengths") {
  CHECK(t2_from_sigma(0.20, kTau) / kTau == doctest::Approx(50.0).epsilon(1e-14));
  CHECK(t2_from_sigma(2.5, kTau) / kTau == doctest::Approx(0.32).epsilon(1e-14));
  CHECK(t2_from_sigma(1.41, kTau) / kTau == doctest::Approx(2.0 / (1.41 * 1.41)).epsilon(1e-14));
  CHECK(std::isinf(t2_from_sigma(0.0, kTau)));
  CHECK_THROWS_AS(t2_from_sigma(-0.1, kTau), std::invalid_argument);
}

TEST_CASE("critical_sigma sets beta equal to the splitting") {
  const double sc = critical_sigma(kDe, kTau);
  CHECK(sc == doctest::Approx(std::sqrt(4.0 * kTau * kDe)).epsilon(1e-14));
  const double t2 = t2_from_sigma(sc, kTau);
  CHECK(1.0 / (2.0 * t2) == doctest::Approx(kDe).epsilon(1e-14));
  CHECK(classify_regime(kDe, t2) == DampingRegime::critical);
}

TEST_CASE("classify_regime: reference kick strengths") {
  CHECK(classify_regime(kDe, t2_from_sigma(0.20, kTau)) == DampingRegime::underdamped);
  CHECK(classify_regime(kDe, t2_from_sigma(0.68, kTau)) == DampingRegime::underdamped);
  CHECK(classify_regime(kDe, t2_from_sigma(1.41, kTau)) == DampingRegime::overdamped);
  CHECK(classify_regime(kDe, t2_from_sigma(2.5, kTau)) == DampingRegime::overdamped);
  CHECK(classify_regime(kDe, std::numeric_limits<double>::infinity()) == DampingRegime::underdamped);
  CHECK(classify_regime(0.0, std::numeric_limits<double>::infinity()) == DampingRegime::critical);
}

TEST_CASE("phase_diffusion_valid") {
  CHECK(phase_diffusion_valid(t2_from_sigma(0.2, kTau), kTau));
  CHECK_FALSE(phase_diffusion_valid(t2_from_sigma(2.5, kTau), kTau));
  CHECK(phase_diffusion_valid(kTau, kTau));
}

TEST_CASE("DampingParams::make validation") {
  CHECK_THROWS_AS(DampingParams::make(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(DampingParams::make(0.1, 0.0), std::invalid_argument);
  CHECK_NOTHROW(DampingParams::make(0.1, std::numeric_limits<double>::infinity()));
}

TEST_CASE("pl_from_sz") {
  CHECK(pl_from_sz(1.0) == 1.0);
  CHECK(pl_from_sz(0.0) == 0.5);
  CHECK(pl_from_sz(-1.0) == 0.0);
  CHECK(pl_from_sz(1.0 + 1e-9) == 1.0);
  CHECK(pl_from_sz(-1.0 - 1e-9) == 0.0);
  CHECK_THROWS_AS(pl_from_sz(1.01), std::invalid_argument);
  CHECK_THROWS_AS(pl_from_sz(-1.01), std::invalid_argument);
}

TEST_CASE("closed form: beta = 0 reduces to cos") {
  const DampingParams p = DampingParams::make(kDe, std::numeric_limits<double>::infinity());
  for (double t = 0.0; t < 2000.0; t += 3.7) CHECK(std::abs(sz_closed_form(t, p) - std::cos(kDe * t)) < 1e-12);
}

TEST_CASE("closed form: critical branch value at beta t = 1") {
  const DampingParams p = DampingParams::make(kDe, t2_for_beta(kDe, 1.0));
  REQUIRE(p.regime == DampingRegime::critical);
  CHECK(sz_closed_form(1.0 / kDe, p) == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-14));
  CHECK(sz_closed_form(0.0, p) == 1.0);
}

TEST_CASE("closed form agrees with the textbook phase-offset form away from critical") {
  for (double factor : {0.0, 0.1, 0.5, 0.9, 1.2, 3.0, 10.0}) {
    const double t2 = factor == 0.0 ? std::numeric_limits<double>::infinity() : t2_for_beta(kDe, factor);
    const DampingParams p = DampingParams::make(kDe, t2);
    for (double t = 0.0; t <= 600.0; t += 1.3) {
      CHECK(std::abs(sz_closed_form(t, p) - oracle::sz_textbook(t, kDe, t2)) < 1e-10);
    }
  }
}

TEST_CASE("property: branch continuity across the critical point") {
  const DampingParams crit = DampingParams::make(kDe, t2_for_beta(kDe, 1.0));
  for (double eps : {-1e-8, 1e-8}) {
    const double beta = kDe * (1.0 + eps);
    const DampingParams p = DampingParams::make(kDe, 1.0 / (2.0 * beta));
    CHECK(p.regime == (eps < 0 ? DampingRegime::underdamped : DampingRegime::overdamped));
    double worst = 0.0;
    for (double t = 0.0; t <= 10.0 / beta; t += 0.01 / beta) {
      worst = std::max(worst, std::abs(sz_closed_form(t, p) - sz_closed_form(t, crit)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("ODE: trivial cases") {
  const std::vector<double> t = grid(50.0, 10);
  const BlochVector s0{0.6, 0.0, 0.8};
  const auto still = bloch_ode_integrate(Vec3{}, std::numeric_limits<double>::infinity(), s0, t);
  for (const auto& s : still) CHECK((s - s0).norm() < 1e-14);

  const double t2 = 17.0;
  const auto decay = bloch_ode_integrate(Vec3{kDe, 0.0, 0.0}, t2, kUnitX, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(decay[i].x - std::exp(-t[i] / t2)) < 1e-10);
    CHECK(std::abs(decay[i].y) < 1e-14);
    CHECK(std::abs(decay[i].z) < 1e-14);
  }
}

TEST_CASE("ODE: argument errors") {
  const std::vector<double> bad{0.0, 2.0, 1.0};
  CHECK_THROWS_AS(bloch_ode_integrate(kUnitX, 1.0, kUnitZ, bad), std::invalid_argument);
  const std::vector<double> ok{0.0, 1.0};
  CHECK_THROWS_AS(bloch_ode_integrate(kUnitX, 0.0, kUnitZ, ok), std::invalid_argument);
  CHECK_THROWS_AS(bloch_ode_integrate(kUnitX, -1.0, kUnitZ, ok), std::invalid_argument);
}

TEST_CASE("property: ODE matches the closed form in all three regimes") {
  const std::vector<double> t = grid(100.0 * kTau, 400);
  for (double factor : {0.0, 1.0 / (2.0 * 50.0 * kTau * kDe), 0.5, 1.0, 2.0, 8.0}) {
    const double t2 = factor == 0.0 ? std::numeric_limits<double>::infinity() : t2_for_beta(kDe, factor);
    const DampingParams p = DampingParams::make(kDe, t2);
    const auto s = bloch_ode_integrate(Vec3{kDe, 0.0, 0.0}, t2, kUnitZ, t);
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(s[i].z - sz_closed_form(t[i], p)));
    CAPTURE(factor);
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("ODE with an in-plane field off the x axis gives the same s_z") {
  const double phi = 1.9;
  const Vec3 b{kDe * std::cos(phi), kDe * std::sin(phi), 0.0};
  const double t2 = t2_for_beta(kDe, 0.3);
  const DampingParams p = DampingParams::make(kDe, t2);
  const std::vector<double> t = grid(300.0, 60);
  const auto s = bloch_ode_integrate(b, t2, kUnitZ, t);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(s[i].z - sz_closed_form(t[i], p)) < 1e-8);
}

TEST_CASE("property: overdamped slow rate") {
  for (double factor : {5.0, 10.0, 40.0}) {
    const double beta = factor * kDe;
    const DampingParams p = DampingParams::make(kDe, 1.0 / (2.0 * beta));
    const double expected = beta - std::sqrt(beta * beta - kDe * kDe);
    // Fit over late times, after the fast transient has died out.
    const double t1 = 20.0 / beta;
    const double t2 = t1 + 3.0 / expected;
    const double fitted = -std::log(sz_closed_form(t2, p) / sz_closed_form(t1, p)) / (t2 - t1);
    CHECK(std::abs(fitted - expected) < 0.01 * expected);
    // Tends to delta_epsilon^2 T2 for strong dephasing.
    CHECK(std::abs(expected - kDe * kDe * p.t2) < 0.02 * expected);
  }
}

TEST_CASE("property: overdamped s_z is strictly decreasing in (0, 1]") {
  const DampingParams p = DampingParams::make(kDe, t2_for_beta(kDe, 3.0));
  REQUIRE(p.regime == DampingRegime::overdamped);
  double prev = sz_closed_form(0.0, p);
  CHECK(prev == 1.0);
  for (double t = 0.5; t <= 3000.0; t += 0.5) {
    const double v = sz_closed_form(t, p);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
}
