#include "tlskick/su2.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tlskick {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kDegenerateMass = 1e-12;
constexpr double kAxisNormTolerance = 1e-9;

}  // namespace

double Vec3::norm() const { return std::sqrt(dot(*this)); }

Unitary2 Unitary2::adjoint() const {
  return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
}

double Unitary2::unitarity_defect() const {
  const Unitary2 p = adjoint() * *this;
  return std::max({std::abs(p(0, 0) - 1.0), std::abs(p(0, 1)), std::abs(p(1, 0)), std::abs(p(1, 1) - 1.0)});
}

Unitary2 operator*(const Unitary2& a, const Unitary2& b) {
  return {a.m_[0] * b.m_[0] + a.m_[1] * b.m_[2], a.m_[0] * b.m_[1] + a.m_[1] * b.m_[3],
          a.m_[2] * b.m_[0] + a.m_[3] * b.m_[2], a.m_[2] * b.m_[1] + a.m_[3] * b.m_[3]};
}

double distance(const Unitary2& a, const Unitary2& b) {
  double d = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) d = std::max(d, std::abs(a(r, c) - b(r, c)));
  }
  return d;
}

double distance_up_to_phase(const Unitary2& a, const Unitary2& b) {
  // e^{i chi} with chi = arg tr(b^dagger a) minimises the Frobenius distance.
  const Complex overlap = (b.adjoint() * a).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0};
  const Unitary2 rephased{phase * b(0, 0), phase * b(0, 1), phase * b(1, 0), phase * b(1, 1)};
  return distance(a, rephased);
}

Unitary2 from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(std::abs(n - 1.0) <= kAxisNormTolerance)) {
    throw std::invalid_argument("from_axis_angle: axis is not a unit vector (norm " + std::to_string(n) + ")");
  }
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  // c 1 - i s (n . sigma)
  return {Complex{c, -s * axis.z}, Complex{-s * axis.y, -s * axis.x}, Complex{s * axis.y, -s * axis.x},
          Complex{c, s * axis.z}};
}

Unitary2 rotation_z(double xi) {
  const Complex half = std::exp(-0.5 * kI * xi);
  return {half, Complex{0.0}, Complex{0.0}, std::conj(half)};
}

Unitary2 compose(const Unitary2& a, const Unitary2& b) { return a * b; }

BlochVector apply_to_bloch(const Unitary2& u, const BlochVector& s) {
  const Unitary2 spin{Complex{s.z}, Complex{s.x, -s.y}, Complex{s.x, s.y}, Complex{-s.z}};
  const Unitary2 m = u * spin * u.adjoint();
  return {m(1, 0).real(), m(1, 0).imag(), m(0, 0).real()};
}

Su2Coefficients su2_coefficients(const Unitary2& u) {
  const Complex g = std::sqrt(u.determinant());
  const Complex inv = g != Complex{0.0} ? 1.0 / g : Complex{1.0};
  const Complex v00 = u(0, 0) * inv;
  const Complex v01 = u(0, 1) * inv;
  const Complex v10 = u(1, 0) * inv;
  const Complex v11 = u(1, 1) * inv;
  Su2Coefficients out;
  out.c = 0.5 * (v00 + v11).real();
  out.v.x = -0.5 * (v01 + v10).imag();
  out.v.y = 0.5 * (v10 - v01).real();
  out.v.z = 0.5 * (v11 - v00).imag();
  return out;
}

AxisAngle decompose(const Unitary2& u) {
  const double defect = u.unitarity_defect();
  if (!(defect <= kUnitaryInputTolerance)) {
    throw std::invalid_argument("decompose: input is not unitary (defect " + std::to_string(defect) + ")");
  }
  auto [c, v] = su2_coefficients(u);
  if (c < 0.0) {
    c = -c;
    v = -v;
  }
  const double sin_half = v.norm();
  if (std::sqrt(2.0) * sin_half < kDegenerateMass) {
    return {kUnitZ, 0.0, true};
  }
  return {(1.0 / sin_half) * v, 2.0 * std::atan2(sin_half, c), false};
}

}  // namespace tlskick
