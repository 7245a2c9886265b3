#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "tlskick/su2.hpp"

namespace tlskick {

enum class DriveShape { square, cosine, none };

std::string_view to_string(DriveShape shape);
std::optional<DriveShape> parse_drive_shape(std::string_view text);

/// H(t) = (A_x/2) sigma_x + (A_z/2) f(omega_d t) sigma_z with f the drive shape
/// (+1/-1 square wave, cos, or 0 for `none`). hbar = 1.
struct DriveSpec {
  DriveShape shape{DriveShape::square};
  double a_x{0.1};
  double a_z{1.1};
  double omega_d{1.0};

  [[nodiscard]] double period() const;
  /// Drive profile f at time t (square wave is +1 on the first half period).
  [[nodiscard]] double profile(double t) const;
  /// Throws std::invalid_argument unless omega_d > 0 and A_x, A_z >= 0 (all finite).
  void validate() const;
};

/// Product of the two half-period exponentials exp(-i H_- tau/2) exp(-i H_+ tau/2).
Unitary2 propagator_square_exact(const DriveSpec& drive);

/// Time-ordered propagator over [t_begin, t_end] built from `slices` equal
/// steps of the fourth-order commutator-free Magnus product (two exact SU(2)
/// exponentials per step). Square drives are sliced so that every step lies
/// inside one half period, which makes the result exact for slices >= 2.
Unitary2 propagator_sliced(const DriveSpec& drive, double t_begin, double t_end, std::size_t slices);

/// Single-period propagator U(tau_d, 0) with `slices` steps.
Unitary2 propagator_sliced(const DriveSpec& drive, std::size_t slices);

struct ConvergedPropagator {
  Unitary2 propagator;
  std::size_t slices{0};
  double last_change{0.0};
};

inline constexpr double kDefaultSliceTolerance = 1e-12;

/// Doubles the slice count from `initial_slices` until two successive
/// propagators differ by less than `tolerance`. Throws std::runtime_error if
/// `max_slices` is reached first.
ConvergedPropagator propagator_converged(const DriveSpec& drive, double tolerance = kDefaultSliceTolerance,
                                         std::size_t initial_slices = 64, std::size_t max_slices = std::size_t{1} << 22);

/// Ground-truth single-period propagator for any drive shape: the exact
/// two-factor product for square, the undriven exponential for none, the
/// converged sliced product for cosine.
Unitary2 period_propagator(const DriveSpec& drive);

struct FloquetDecomposition {
  double delta_epsilon{0.0};  // quasienergy splitting, >= 0
  Vec3 axis{kUnitZ};          // effective field direction e_F
  bool degenerate{false};
  double rotation_angle_per_period{0.0};  // delta_epsilon * tau_d, in [0, 2 pi]
};

/// Splitting and effective-field axis of a single-period propagator.
///
/// The propagator is projected onto SU(2) (principal sqrt of the determinant,
/// which is the identity map for traceless Hamiltonians), and the rotation
/// angle is taken in [0, 2 pi] from the principal arccos of the half trace.
/// Degenerate when the angle is within 1e-10 of 0 or 2 pi.
FloquetDecomposition floquet_decompose(const Unitary2& u, double tau_d);

inline FloquetDecomposition floquet_decompose(const DriveSpec& drive) {
  return floquet_decompose(period_propagator(drive), drive.period());
}

/// Alternative closed-form splitting in the as-printed coefficient convention:
/// (2/tau) acos(1 - 2 sin^2(phi/2) sin^2(theta)) with
/// phi = sqrt(A_x^2 + A_z^2) tau and tan(theta) = A_z / A_x.
///
/// Kept only as a documented cross-check. It disagrees with the product of
/// exponentials (e.g. it gives 0 for the undriven system instead of A_x), which
/// is what every other routine uses. theta is undefined at A_x = 0, where the
/// function returns 0 (the exact splitting there). Throws
/// std::invalid_argument for non-square drives.
double quasienergy_closed_form_as_printed(const DriveSpec& drive);

struct ScanPoint {
  double a_z_over_omega{0.0};
  double omega_ratio{0.0};  // sqrt(A_x^2 + A_z^2) / omega_d
  double delta_epsilon{0.0};
  /// Splitting continued through axis reversals between neighbouring grid
  /// points: changes sign where the principal value touches zero.
  double continuous_delta_epsilon{0.0};
  bool degenerate{false};
};

struct ScanMinimum {
  double a_z_over_omega{0.0};
  double omega_ratio{0.0};
  double delta_epsilon{0.0};
  bool is_zero{false};  // delta_epsilon < kScanZeroThreshold
};

inline constexpr double kScanZeroThreshold = 1e-8;

struct SuppressionScan {
  std::vector<ScanPoint> points;
  std::vector<ScanMinimum> minima;  // refined local minima of delta_epsilon, ordered by ratio
};

/// Sweeps A_z / omega_d over [ratio_min, ratio_max] on `samples` uniform points
/// using `drive_template` for shape, A_x and omega_d. Every interior local
/// minimum of the splitting is refined by golden-section search. Grid points
/// may be evaluated by up to `workers` threads; output order and values do not
/// depend on it. Throws std::invalid_argument for an empty or non-positive
/// range or samples < 2.
SuppressionScan suppression_scan(const DriveSpec& drive_template, double ratio_min, double ratio_max,
                                 std::size_t samples, unsigned workers = 1);

}  // namespace tlskick
