#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace groupsim {

// Ground plane is y = 0 with +y up. Headings are yaw angles in degrees,
// measured from +x toward +z, so heading 0 faces +x and heading 90 faces +z.

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
Scalar deg_to_rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
Scalar rad_to_deg(Scalar rad) {
  return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// Maps any angle to [0, 360).
template <typename Scalar>
Scalar wrap_degrees(Scalar deg) {
  Scalar w = std::fmod(deg, Scalar(360));
  if (w < Scalar(0)) w += Scalar(360);
  return w >= Scalar(360) ? Scalar(0) : w;
}

template <typename Scalar>
Vec3<Scalar> heading_to_forward(Scalar heading_deg) {
  const Scalar r = deg_to_rad(heading_deg);
  return Vec3<Scalar>(std::cos(r), Scalar(0), std::sin(r));
}

/// Heading of the ground-plane projection of v; 0 for a vertical or zero vector.
template <typename Derived>
typename Derived::Scalar heading_of(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  if (v.x() == Scalar(0) && v.z() == Scalar(0)) return Scalar(0);
  return wrap_degrees(rad_to_deg(std::atan2(v.z(), v.x())));
}

/// Rotation about +y that takes heading h to heading h + angle_deg.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> yaw_rotation(Scalar angle_deg) {
  const Scalar r = deg_to_rad(angle_deg);
  const Scalar c = std::cos(r), s = std::sin(r);
  Eigen::Matrix<Scalar, 3, 3> m;
  m << c, Scalar(0), -s,
       Scalar(0), Scalar(1), Scalar(0),
       s, Scalar(0), c;
  return m;
}

/// Unsigned angle in degrees between two vectors; 0 if either is zero.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar angle_between_deg(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar na = a.norm(), nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0)) return Scalar(0);
  Scalar c = a.dot(b) / (na * nb);
  c = std::clamp(c, Scalar(-1), Scalar(1));
  return rad_to_deg(std::acos(c));
}

}  // namespace groupsim
