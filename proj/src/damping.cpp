#include "tlskick/damping.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace tlskick {

namespace {

constexpr double kCriticalRelTolerance = 1e-12;
constexpr double kSzSlack = 1e-6;

}  // namespace

std::string_view to_string(DampingRegime regime) {
  switch (regime) {
    case DampingRegime::underdamped: return "underdamped";
    case DampingRegime::critical: return "critical";
    case DampingRegime::overdamped: return "overdamped";
  }
  return "unknown";
}

double t2_from_sigma(double sigma, double tau_d) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("t2_from_sigma: sigma must be >= 0");
  if (!(tau_d > 0.0)) throw std::invalid_argument("t2_from_sigma: tau_d must be > 0");
  if (sigma == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * tau_d / (sigma * sigma);
}

double critical_sigma(double delta_epsilon, double tau_d) { return std::sqrt(4.0 * tau_d * delta_epsilon); }

DampingRegime classify_regime(double delta_epsilon, double t2) {
  const double beta = std::isinf(t2) ? 0.0 : 0.5 / t2;
  const double de2 = delta_epsilon * delta_epsilon;
  const double b2 = beta * beta;
  const double gap = de2 - b2;
  if (std::abs(gap) <= kCriticalRelTolerance * std::max(de2, b2)) return DampingRegime::critical;
  return gap > 0.0 ? DampingRegime::underdamped : DampingRegime::overdamped;
}

DampingParams DampingParams::make(double delta_epsilon, double t2) {
  if (!(delta_epsilon >= 0.0) || !std::isfinite(delta_epsilon)) {
    throw std::invalid_argument("DampingParams: delta_epsilon must be finite and >= 0");
  }
  if (!(t2 > 0.0)) throw std::invalid_argument("DampingParams: T2 must be > 0");
  return {delta_epsilon, t2, std::isinf(t2) ? 0.0 : 0.5 / t2, classify_regime(delta_epsilon, t2)};
}

double sz_closed_form(double t, const DampingParams& p) {
  if (t == 0.0) return 1.0;
  const double beta = p.beta;
  const double de = p.delta_epsilon;
  switch (p.regime) {
    case DampingRegime::critical: return std::exp(-beta * t) * (1.0 + beta * t);
    case DampingRegime::underdamped: {
      const double w = std::sqrt((de - beta) * (de + beta));
      return std::exp(-beta * t) * (std::cos(w * t) + beta * std::sin(w * t) / w);
    }
    case DampingRegime::overdamped: {
      const double k = std::sqrt((beta - de) * (beta + de));
      if (k * t < 1.0) return std::exp(-beta * t) * (std::cosh(k * t) + beta * std::sinh(k * t) / k);
      // Split into the slow and fast exponentials; beta - k = de^2 / (beta + k).
      const double slow = de * de / (beta + k);
      return 0.5 * (1.0 + beta / k) * std::exp(-slow * t) + 0.5 * (1.0 - beta / k) * std::exp(-(beta + k) * t);
    }
  }
  return 0.0;
}

double pl_from_sz(double sz) {
  if (!(std::abs(sz) <= 1.0 + kSzSlack)) {
    throw std::invalid_argument("pl_from_sz: |s_z| exceeds 1 (" + std::to_string(sz) + ")");
  }
  return std::clamp(0.5 * (1.0 + sz), 0.0, 1.0);
}

std::vector<BlochVector> bloch_ode_integrate(const Vec3& field, double t2, const BlochVector& s0,
                                             std::span<const double> t_grid, const OdeTolerance& tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 3>;

  if (!(t2 > 0.0)) throw std::invalid_argument("bloch_ode_integrate: T2 must be > 0");
  if (t_grid.empty()) return {};
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("bloch_ode_integrate: t_grid must be increasing");
  }

  const double rate = std::isinf(t2) ? 0.0 : 1.0 / t2;
  auto rhs = [&field, rate](const State& s, State& ds, double /*t*/) {
    ds[0] = (field.y * s[2] - field.z * s[1]) - rate * s[0];
    ds[1] = (-field.x * s[2] + field.z * s[0]) - rate * s[1];
    ds[2] = field.x * s[1] - field.y * s[0];
  };

  std::vector<BlochVector> out;
  out.reserve(t_grid.size());
  State state{s0.x, s0.y, s0.z};
  if (t_grid.size() == 1) return {s0};

  auto stepper = odeint::make_controlled(tol.absolute, tol.relative, odeint::runge_kutta_dopri5<State>{});
  const double first_dt = std::min(1e-3, 0.01 * (t_grid[1] - t_grid[0]));
  try {
    odeint::integrate_times(
        stepper, rhs, state, t_grid.begin(), t_grid.end(), first_dt,
        [&out](const State& s, double /*t*/) { out.push_back({s[0], s[1], s[2]}); },
        odeint::max_step_checker(1'000'000));
  } catch (const odeint::odeint_error& e) {
    throw IntegrationError(std::string("bloch_ode_integrate: step size control failed: ") + e.what());
  }
  if (out.size() != t_grid.size()) {
    throw IntegrationError("bloch_ode_integrate: integrator stopped after " + std::to_string(out.size()) + " of " +
                           std::to_string(t_grid.size()) + " output times");
  }
  return out;
}

}  // namespace tlskick
