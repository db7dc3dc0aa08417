#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace orchard {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

// Unit quaternion with canonical sign (w >= 0). Normalized after every
// constructor and composition so equality tests are deterministic.
class Rotation {
 public:
  Rotation() : q_(1.0, 0.0, 0.0, 0.0) {}

  Rotation(double w, double x, double y, double z) : q_(w, x, y, z) { canonicalize(); }

  explicit Rotation(const Eigen::Quaterniond& q) : q_(q) { canonicalize(); }

  explicit Rotation(const Mat3& m) : q_(m) { canonicalize(); }

  // Exponential map: rotation vector (axis * angle, radians) to rotation.
  static Rotation exp(const Vec3& rotvec) {
    const double angle = rotvec.norm();
    if (angle < 1e-12) {
      // Second-order expansion keeps exp/log consistent near identity.
      Eigen::Quaterniond q(1.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
      return Rotation(q);
    }
    return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(angle, rotvec / angle)));
  }

  static Rotation from_two_vectors(const Vec3& a, const Vec3& b) {
    return Rotation(Eigen::Quaterniond::FromTwoVectors(a, b));
  }

  static Rotation identity() { return Rotation(); }

  // Logarithm map: rotation vector in [0, pi].
  Vec3 log() const {
    Eigen::AngleAxisd aa(q_);
    return aa.angle() * aa.axis();
  }

  Rotation inverse() const { return Rotation(q_.conjugate()); }

  Rotation operator*(const Rotation& other) const { return Rotation(q_ * other.q_); }

  Vec3 operator*(const Vec3& v) const { return q_ * v; }

  Mat3 matrix() const { return q_.toRotationMatrix(); }

  double w() const { return q_.w(); }
  double x() const { return q_.x(); }
  double y() const { return q_.y(); }
  double z() const { return q_.z(); }
  const Eigen::Quaterniond& quat() const { return q_; }

  double norm() const { return q_.norm(); }

  // Angle of the relative rotation between this and other, radians.
  double angle_to(const Rotation& other) const { return (inverse() * other).log().norm(); }

  // Shortest-path spherical interpolation, u in [0, 1].
  Rotation slerp(double u, const Rotation& other) const {
    return Rotation(q_.slerp(u, other.q_));
  }

 private:
  void canonicalize() {
    const double n = q_.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw std::invalid_argument("Rotation: quaternion norm must be finite and positive");
    }
    q_.coeffs() /= n;
    if (q_.w() < 0.0) q_.coeffs() = -q_.coeffs();
  }

  Eigen::Quaterniond q_;
};

// Rigid transform: applies rotation then translation, p -> R*p + t.
struct PoseSE3 {
  Rotation rotation;
  Vec3 translation{0.0, 0.0, 0.0};

  PoseSE3() = default;
  PoseSE3(const Rotation& r, const Vec3& t) : rotation(r), translation(t) {}

  static PoseSE3 identity() { return PoseSE3(); }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  PoseSE3 inverse() const {
    const Rotation rinv = rotation.inverse();
    return PoseSE3(rinv, -(rinv * translation));
  }
};

// Composition: result applies b first, then a.
inline PoseSE3 pose_compose(const PoseSE3& a, const PoseSE3& b) {
  return PoseSE3(a.rotation * b.rotation, a.rotation * b.translation + a.translation);
}

inline PoseSE3 operator*(const PoseSE3& a, const PoseSE3& b) { return pose_compose(a, b); }

struct TimedPose {
  double t = 0.0;
  PoseSE3 pose;
};

// Linear translation / slerp rotation interpolation between bracketing poses.
// Clamps outside the span; throws on an empty sequence.
PoseSE3 interpolate_pose(const std::vector<TimedPose>& poses, double t);

}  // namespace orchard
