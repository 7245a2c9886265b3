#include "tlskick/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace tlskick {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegenerateAngle = 1e-10;

// Gauss nodes and weights of the fourth-order commutator-free Magnus step.
const double kSqrt3 = std::sqrt(3.0);
const double kNode1 = 0.5 - kSqrt3 / 6.0;
const double kNode2 = 0.5 + kSqrt3 / 6.0;
const double kWeightA = 0.25 + kSqrt3 / 6.0;
const double kWeightB = 0.25 - kSqrt3 / 6.0;

// exp(-i dt (field . sigma) / 2)
Unitary2 field_exponential(const Vec3& field, double dt) {
  const double magnitude = field.norm();
  if (magnitude == 0.0) return Unitary2::identity();
  return from_axis_angle((1.0 / magnitude) * field, magnitude * dt);
}

Vec3 field_at(const DriveSpec& drive, double t) { return {drive.a_x, 0.0, drive.a_z * drive.profile(t)}; }

// Uniform CF4 steps on [t0, t1]; returns the product with later steps on the left.
Unitary2 magnus_segment(const DriveSpec& drive, double t0, double t1, std::size_t steps) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  Unitary2 u;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const Vec3 f1 = field_at(drive, t + kNode1 * h);
    const Vec3 f2 = field_at(drive, t + kNode2 * h);
    const Unitary2 first = field_exponential(kWeightA * f1 + kWeightB * f2, h);
    const Unitary2 second = field_exponential(kWeightB * f1 + kWeightA * f2, h);
    u = second * first * u;
  }
  return u;
}

void require_square(const DriveSpec& drive, const char* who) {
  if (drive.shape != DriveShape::square) {
    throw std::invalid_argument(std::string(who) + ": drive shape must be square, got " +
                                std::string(to_string(drive.shape)));
  }
}

}  // namespace

std::string_view to_string(DriveShape shape) {
  switch (shape) {
    case DriveShape::square: return "square";
    case DriveShape::cosine: return "cosine";
    case DriveShape::none: return "none";
  }
  return "unknown";
}

std::optional<DriveShape> parse_drive_shape(std::string_view text) {
  if (text == "square") return DriveShape::square;
  if (text == "cosine") return DriveShape::cosine;
  if (text == "none") return DriveShape::none;
  return std::nullopt;
}

double DriveSpec::period() const { return kTwoPi / omega_d; }

double DriveSpec::profile(double t) const {
  switch (shape) {
    case DriveShape::square: {
      const double tau = period();
      const double phase = t - tau * std::floor(t / tau);
      return phase < 0.5 * tau ? 1.0 : -1.0;
    }
    case DriveShape::cosine: return std::cos(omega_d * t);
    case DriveShape::none: return 0.0;
  }
  return 0.0;
}

void DriveSpec::validate() const {
  if (!(std::isfinite(omega_d) && omega_d > 0.0)) {
    throw std::invalid_argument("drive: omega_d must be finite and > 0");
  }
  if (!(std::isfinite(a_x) && a_x >= 0.0)) throw std::invalid_argument("drive: A_x must be finite and >= 0");
  if (!(std::isfinite(a_z) && a_z >= 0.0)) throw std::invalid_argument("drive: A_z must be finite and >= 0");
}

Unitary2 propagator_square_exact(const DriveSpec& drive) {
  require_square(drive, "propagator_square_exact");
  drive.validate();
  const double half = 0.5 * drive.period();
  const Unitary2 plus = field_exponential({drive.a_x, 0.0, drive.a_z}, half);
  const Unitary2 minus = field_exponential({drive.a_x, 0.0, -drive.a_z}, half);
  return compose(minus, plus);
}

Unitary2 propagator_sliced(const DriveSpec& drive, double t_begin, double t_end, std::size_t slices) {
  if (slices == 0) throw std::invalid_argument("propagator_sliced: slices must be >= 1");
  if (!(t_end >= t_begin)) throw std::invalid_argument("propagator_sliced: t_end must be >= t_begin");
  drive.validate();
  if (drive.shape != DriveShape::square) return magnus_segment(drive, t_begin, t_end, slices);

  // Split at the sign changes of the square wave; each piece is constant.
  const double half = 0.5 * drive.period();
  const double total = t_end - t_begin;
  if (total == 0.0) return Unitary2::identity();
  Unitary2 u;
  double t = t_begin;
  while (t < t_end) {
    double next = half * (std::floor(t / half) + 1.0);
    if (next - t <= 1e-15 * half) next += half;  // t sits on a boundary up to roundoff
    next = std::min(next, t_end);
    const auto share = static_cast<std::size_t>(std::llround(static_cast<double>(slices) * (next - t) / total));
    // Evaluate the profile at the piece midpoint so boundary roundoff cannot pick the wrong sign.
    const double sign = drive.profile(0.5 * (t + next));
    const Vec3 field{drive.a_x, 0.0, drive.a_z * sign};
    const std::size_t steps = std::max<std::size_t>(1, share);
    const double h = (next - t) / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) u = field_exponential(field, h) * u;
    t = next;
  }
  return u;
}

Unitary2 propagator_sliced(const DriveSpec& drive, std::size_t slices) {
  return propagator_sliced(drive, 0.0, drive.period(), slices);
}

ConvergedPropagator propagator_converged(const DriveSpec& drive, double tolerance, std::size_t initial_slices,
                                         std::size_t max_slices) {
  std::size_t slices = std::max<std::size_t>(1, initial_slices);
  Unitary2 previous = propagator_sliced(drive, slices);
  while (slices < max_slices) {
    slices *= 2;
    const Unitary2 current = propagator_sliced(drive, slices);
    const double change = distance(current, previous);
    if (change < tolerance) return {current, slices, change};
    previous = current;
  }
  throw std::runtime_error("propagator_converged: no convergence to " + std::to_string(tolerance) + " within " +
                           std::to_string(max_slices) + " slices");
}

Unitary2 period_propagator(const DriveSpec& drive) {
  drive.validate();
  switch (drive.shape) {
    case DriveShape::square: return propagator_square_exact(drive);
    case DriveShape::none: return field_exponential({drive.a_x, 0.0, 0.0}, drive.period());
    case DriveShape::cosine: return propagator_converged(drive).propagator;
  }
  return Unitary2::identity();
}

FloquetDecomposition floquet_decompose(const Unitary2& u, double tau_d) {
  const double defect = u.unitarity_defect();
  if (!(defect <= kUnitaryInputTolerance)) {
    throw std::invalid_argument("floquet_decompose: input is not unitary (defect " + std::to_string(defect) + ")");
  }
  if (!(tau_d > 0.0)) throw std::invalid_argument("floquet_decompose: tau_d must be > 0");
  const auto [c, v] = su2_coefficients(u);
  const double sin_half = v.norm();
  const double angle = 2.0 * std::atan2(sin_half, c);

  FloquetDecomposition out;
  out.rotation_angle_per_period = angle;
  out.delta_epsilon = angle / tau_d;
  out.degenerate = angle < kDegenerateAngle || kTwoPi - angle < kDegenerateAngle;
  out.axis = sin_half > 0.0 ? (1.0 / sin_half) * v : kUnitZ;
  return out;
}

double quasienergy_closed_form_as_printed(const DriveSpec& drive) {
  require_square(drive, "quasienergy_closed_form_as_printed");
  drive.validate();
  if (drive.a_x == 0.0) return 0.0;
  const double tau = drive.period();
  const double phi = std::hypot(drive.a_x, drive.a_z) * tau;
  const double theta = std::atan(drive.a_z / drive.a_x);
  const double s = std::sin(0.5 * phi) * std::sin(theta);
  const double argument = std::clamp(1.0 - 2.0 * s * s, -1.0, 1.0);
  return 2.0 / tau * std::acos(argument);
}

namespace {

DriveSpec with_ratio(const DriveSpec& drive, double ratio) {
  DriveSpec d = drive;
  d.a_z = ratio * drive.omega_d;
  return d;
}

double splitting_at(const DriveSpec& drive, double ratio) {
  return floquet_decompose(with_ratio(drive, ratio)).delta_epsilon;
}

// Golden-section minimisation of the splitting over [lo, hi].
ScanMinimum refine_minimum(const DriveSpec& drive, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = splitting_at(drive, x1);
  double f2 = splitting_at(drive, x2);
  for (int iter = 0; iter < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(a)); ++iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = splitting_at(drive, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = splitting_at(drive, x2);
    }
  }
  const double ratio = f1 <= f2 ? x1 : x2;
  const double value = std::min(f1, f2);
  return {ratio, std::hypot(drive.a_x, ratio * drive.omega_d) / drive.omega_d, value, value < kScanZeroThreshold};
}

}  // namespace

SuppressionScan suppression_scan(const DriveSpec& drive_template, double ratio_min, double ratio_max,
                                 std::size_t samples, unsigned workers) {
  if (!(std::isfinite(ratio_min) && std::isfinite(ratio_max) && ratio_min >= 0.0 && ratio_max > ratio_min)) {
    throw std::invalid_argument("suppression_scan: need 0 <= ratio_min < ratio_max");
  }
  if (samples < 2) throw std::invalid_argument("suppression_scan: samples must be >= 2");
  drive_template.validate();

  SuppressionScan scan;
  scan.points.resize(samples);
  std::vector<FloquetDecomposition> decompositions(samples);
  const double step = (ratio_max - ratio_min) / static_cast<double>(samples - 1);
  detail::parallel_for(samples, workers, [&](std::size_t i) {
    const double ratio = i + 1 == samples ? ratio_max : ratio_min + static_cast<double>(i) * step;
    const DriveSpec d = with_ratio(drive_template, ratio);
    decompositions[i] = floquet_decompose(d);
    ScanPoint& p = scan.points[i];
    p.a_z_over_omega = ratio;
    p.omega_ratio = std::hypot(d.a_x, d.a_z) / d.omega_d;
    p.delta_epsilon = decompositions[i].delta_epsilon;
    p.degenerate = decompositions[i].degenerate;
  });

  // Branch continuity: follow the axis orientation from point to point.
  double sign = 1.0;
  std::optional<Vec3> last_axis;
  for (std::size_t i = 0; i < samples; ++i) {
    const FloquetDecomposition& fd = decompositions[i];
    if (!fd.degenerate) {
      if (last_axis && fd.axis.dot(*last_axis) < 0.0) sign = -sign;
      last_axis = fd.axis;
    }
    scan.points[i].continuous_delta_epsilon = sign * fd.delta_epsilon;
  }

  for (std::size_t i = 1; i + 1 < samples; ++i) {
    const double here = scan.points[i].delta_epsilon;
    if (here <= scan.points[i - 1].delta_epsilon && here < scan.points[i + 1].delta_epsilon) {
      scan.minima.push_back(
          refine_minimum(drive_template, scan.points[i - 1].a_z_over_omega, scan.points[i + 1].a_z_over_omega));
    }
  }
  return scan;
}

}  // namespace tlskick
