#pragma once

#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tlskick/su2.hpp"

namespace tlskick {

enum class DampingRegime { underdamped, critical, overdamped };

std::string_view to_string(DampingRegime regime);

/// Dephasing time for one z-kick of root variance sigma per drive period:
/// T2 = 2 tau_d / sigma^2. sigma = 0 returns +infinity (no dephasing).
double t2_from_sigma(double sigma, double tau_d);

/// Kick strength at which beta = 1 / (2 T2) equals delta_epsilon.
double critical_sigma(double delta_epsilon, double tau_d);

/// The phase-diffusion description is only meaningful at stroboscopic times
/// when the dephasing time exceeds one drive period.
inline bool phase_diffusion_valid(double t2, double tau_d) { return t2 >= tau_d; }

/// Regime from the sign of delta_epsilon^2 - beta^2. The critical branch is
/// selected when |delta_epsilon^2 - beta^2| < 1e-12 max(delta_epsilon^2, beta^2).
DampingRegime classify_regime(double delta_epsilon, double t2);

struct DampingParams {
  double delta_epsilon{0.0};
  double t2{0.0};
  double beta{0.0};  // 1 / (2 T2)
  DampingRegime regime{DampingRegime::underdamped};

  /// Throws std::invalid_argument unless delta_epsilon >= 0 and T2 > 0 (T2 may be +inf).
  static DampingParams make(double delta_epsilon, double t2);
};

/// s_z(t) of the damped oscillator s_z'' + s_z'/T2 + delta_epsilon^2 s_z = 0
/// with s_z(0) = 1 and s_z'(0) = 0, evaluated on the branch given by
/// params.regime. The underdamped and overdamped branches are written as
/// e^{-beta t}(cos wt + beta sin(wt)/w) and e^{-beta t}(cosh kt + beta sinh(kt)/k),
/// which stay accurate next to the critical point.
double sz_closed_form(double t, const DampingParams& params);

/// P_L = (1 + s_z) / 2 clamped to [0, 1]. Throws std::invalid_argument when |s_z| > 1 + 1e-6.
double pl_from_sz(double sz);

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OdeTolerance {
  double absolute{1e-13};
  double relative{1e-13};
};

/// Integrates ds/dt = B x s - (s_x, s_y, 0) / T2 with an adaptive
/// Dormand-Prince 5(4) stepper and returns s at every entry of t_grid
/// (t_grid[0] is the start time, must be increasing). T2 may be +inf.
/// Throws std::invalid_argument for a bad grid or T2 <= 0, IntegrationError
/// if the step size controller fails.
std::vector<BlochVector> bloch_ode_integrate(const Vec3& field, double t2, const BlochVector& s0,
                                             std::span<const double> t_grid, const OdeTolerance& tol = {});

}  // namespace tlskick
