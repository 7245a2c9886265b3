#pragma once

#include <array>
#include <complex>

namespace tlskick {

using Complex = std::complex<double>;

/// Real 3-vector. Used for rotation axes, effective fields and Bloch vectors.
struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  [[nodiscard]] double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  [[nodiscard]] double norm() const;
  [[nodiscard]] Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend Vec3 operator*(double k, const Vec3& a) { return {k * a.x, k * a.y, k * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// (s_x, s_y, s_z) = (<sigma_x>, <sigma_y>, <sigma_z>). +z is the left well, -z the right well.
using BlochVector = Vec3;

inline constexpr Vec3 kUnitX{1.0, 0.0, 0.0};
inline constexpr Vec3 kUnitY{0.0, 1.0, 0.0};
inline constexpr Vec3 kUnitZ{0.0, 0.0, 1.0};

/// Tolerance of the unitarity invariant (max abs entry of U^dagger U - 1).
inline constexpr double kUnitaryTolerance = 1e-12;

/// 2x2 complex matrix, row-major. Carries propagators and kick rotations.
///
/// The type does not enforce unitarity on construction; products of many
/// unitaries drift at roundoff level. Operations that need a unitary input
/// validate it explicitly.
class Unitary2 {
 public:
  constexpr Unitary2() : m_{Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{1.0}} {}
  constexpr Unitary2(Complex a, Complex b, Complex c, Complex d) : m_{a, b, c, d} {}

  static constexpr Unitary2 identity() { return {}; }

  [[nodiscard]] constexpr const Complex& operator()(int row, int col) const { return m_[2 * row + col]; }

  [[nodiscard]] Unitary2 adjoint() const;
  [[nodiscard]] Complex trace() const { return m_[0] + m_[3]; }
  [[nodiscard]] Complex determinant() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

  /// max |(U^dagger U - 1)_ij|
  [[nodiscard]] double unitarity_defect() const;
  [[nodiscard]] bool is_unitary(double tol = kUnitaryTolerance) const { return unitarity_defect() <= tol; }

  friend Unitary2 operator*(const Unitary2& a, const Unitary2& b);

 private:
  std::array<Complex, 4> m_;
};

/// Max absolute entry difference.
double distance(const Unitary2& a, const Unitary2& b);

/// Max absolute entry difference after removing the best-fit global phase.
double distance_up_to_phase(const Unitary2& a, const Unitary2& b);

struct AxisAngle {
  Vec3 axis{kUnitZ};
  double angle{0.0};  // radians, [0, pi]
  bool degenerate{false};
};

/// exp(-i (sigma . axis) angle / 2). Throws std::invalid_argument unless |axis| = 1 within 1e-9.
Unitary2 from_axis_angle(const Vec3& axis, double angle);
inline Unitary2 from_axis_angle(const AxisAngle& aa) { return from_axis_angle(aa.axis, aa.angle); }

/// Rotation of the Bloch sphere about z by xi; the stochastic kick.
Unitary2 rotation_z(double xi);

/// Matrix product a*b: b acts first.
Unitary2 compose(const Unitary2& a, const Unitary2& b);

/// SO(3) action s -> R(u) s, i.e. u (s . sigma) u^dagger.
BlochVector apply_to_bloch(const Unitary2& u, const BlochVector& s);

/// Axis-angle form of u up to a global phase, with angle folded into [0, pi].
///
/// The global phase is removed by projecting onto SU(2) with the sign chosen
/// so that the identity component is non-negative. When the off-identity part
/// has Frobenius mass below 1e-12 the result is flagged degenerate with angle 0
/// and axis +z. Throws std::invalid_argument for a non-unitary input.
AxisAngle decompose(const Unitary2& u);

/// Coefficients of u = e^{i chi} (c 1 - i v . sigma) with (c, v) real and c^2 + |v|^2 = 1.
/// The sign of (c, v) follows sqrt(det u) on the principal branch, so for
/// u in SU(2) the representative is u itself.
struct Su2Coefficients {
  double c{1.0};
  Vec3 v{};
};
Su2Coefficients su2_coefficients(const Unitary2& u);

/// Tolerance used by decompose() and floquet_decompose() to reject non-unitary input.
/// Looser than kUnitaryTolerance so long sliced products (2^20 factors) still qualify.
inline constexpr double kUnitaryInputTolerance = 1e-10;

}  // namespace tlskick
