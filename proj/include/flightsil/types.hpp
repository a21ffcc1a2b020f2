#ifndef FLIGHTSIL_TYPES_HPP
#define FLIGHTSIL_TYPES_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flightsil {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec10 = Eigen::Matrix<double, 10, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6x10 = Eigen::Matrix<double, 6, 10>;
using Mat10x6 = Eigen::Matrix<double, 10, 6>;
using Quat = Eigen::Quaterniond;

inline constexpr int kNumControlInputs = 6;
inline constexpr int kNumOutputChannels = 10;

/// Ambient constants shared by the motor model and the simulator.
struct Environment {
  double rho = 1.225;  // air density [kg/m^3]
  double g = 9.80665;  // gravitational acceleration [m/s^2]
};

/// Body force/torque pair. Used both for single-motor contributions and
/// for the aggregate wrench applied to the rigid body.
struct Wrench {
  Vec3 force = Vec3::Zero();   // [N], body frame
  Vec3 torque = Vec3::Zero();  // [N*m], body frame

  Wrench& operator+=(const Wrench& o) {
    force += o.force;
    torque += o.torque;
    return *this;
  }
};

/// Six-axis IMU measurement, body frame.
struct ImuSample {
  Vec3 accel = Vec3::Zero();  // specific force [m/s^2]
  Vec3 gyro = Vec3::Zero();   // angular rate [rad/s]
  double t = 0.0;             // sample time [s]
};

/// Attitude + body rate as produced by an estimator.
///
/// Quaternion convention throughout: q maps inertial-frame coordinates into
/// body-frame coordinates (body<-inertial), i.e. v_body = q * v_inertial.
struct AttitudeEstimate {
  Quat q = Quat::Identity();
  Vec3 rate = Vec3::Zero();  // body [rad/s]
};

inline Vec3 to_body(const Quat& q_bi, const Vec3& v_inertial) { return q_bi * v_inertial; }
inline Vec3 to_inertial(const Quat& q_bi, const Vec3& v_body) { return q_bi.conjugate() * v_body; }

/// body<-inertial quaternion from aerospace ZYX Euler angles.
inline Quat quat_from_euler(double roll, double pitch, double yaw) {
  return Quat(Eigen::AngleAxisd(-roll, Vec3::UnitX()) *
              Eigen::AngleAxisd(-pitch, Vec3::UnitY()) *
              Eigen::AngleAxisd(-yaw, Vec3::UnitZ()));
}

/// (roll, pitch, yaw) from a body<-inertial quaternion.
inline Vec3 euler_from_quat(const Quat& q_bi) {
  const Mat3 r_ib = q_bi.conjugate().toRotationMatrix();  // body->inertial DCM
  const double pitch = std::asin(std::clamp(-r_ib(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r_ib(2, 1), r_ib(2, 2));
  const double yaw = std::atan2(r_ib(1, 0), r_ib(0, 0));
  return {roll, pitch, yaw};
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix handed to the allocator contained non-finite entries.
class InvalidMatrixError : public Error {
 public:
  using Error::Error;
};

/// Config/parameter validation failure carrying the offending names.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> offenders)
      : Error(what), offenders_(std::move(offenders)) {}

  const std::vector<std::string>& offenders() const { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

}  // namespace flightsil

#endif  // FLIGHTSIL_TYPES_HPP
