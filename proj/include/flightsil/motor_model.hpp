#ifndef FLIGHTSIL_MOTOR_MODEL_HPP
#define FLIGHTSIL_MOTOR_MODEL_HPP

#include <cmath>
#include <numbers>

#include "flightsil/types.hpp"

namespace flightsil {

/// Motor placement and spin geometry.
struct MotorGeometry {
  Vec3 r = Vec3::Zero();        // center of mass -> motor axis [m]
  Vec3 e_hat = Vec3(0, 0, -1);  // axis of rotation, unit vector (NED: -z thrusts up)
  double d = 1.0;               // propeller spin direction, +1 or -1
  double theta = 0.0;           // angle from body +x [rad], used by simplified mixers
};

/// Propeller aerodynamic constants.
struct PropellerParams {
  double C_T = 0.1;   // thrust coefficient
  double C_Q = 0.006; // torque coefficient
  double D = 0.25;    // diameter [m]
};

/// Brushless motor electrical constants.
struct MotorParams {
  double R = 0.12;      // winding resistance [ohm]
  double K_Q = 0.0106;  // torque constant [N*m/A]
  double K_V = 0.0106;  // back-EMF constant [V*s/rad]
  double i0 = 0.4;      // no-load current [A]
  double V_max = 16.0;  // supply voltage [V]
};

/// Everything needed to model one powered output channel.
struct MotorDescriptor {
  MotorGeometry geom;
  PropellerParams prop;
  MotorParams motor;
};

inline constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

/// C_T * rho * D^4 / (4 pi^2): thrust per squared angular speed [N*s^2].
inline double thrust_gain(const PropellerParams& prop, double rho) {
  const double d2 = prop.D * prop.D;
  return prop.C_T * rho * d2 * d2 / kFourPiSq;
}

/// C_Q * rho * D^5 / (4 pi^2): drag torque per squared angular speed [N*m*s^2].
inline double torque_gain(const PropellerParams& prop, double rho) {
  const double d2 = prop.D * prop.D;
  return prop.C_Q * rho * d2 * d2 * prop.D / kFourPiSq;
}

/// Thrust and torque produced by one motor spinning at omega [rad/s].
///   F = C_T rho D^4/(4 pi^2) w^2 e_hat
///   Q = r x F + C_Q rho D^5/(4 pi^2) w^2 d (-e_hat)
/// d follows the predefined-mixer convention: for NED up-thrusting motors
/// (e_hat = -z), d = +1 yields a +z (positive-yaw) reaction torque.
inline Wrench thrust_torque(double omega, const MotorGeometry& geom,
                            const PropellerParams& prop, double rho) {
  const double w2 = omega * omega;
  Wrench out;
  out.force = thrust_gain(prop, rho) * w2 * geom.e_hat;
  out.torque = geom.r.cross(out.force) - torque_gain(prop, rho) * w2 * geom.d * geom.e_hat;
  return out;
}

/// Column of the general-form mixing matrix for one motor: stacked
/// [F; Q] contribution per unit omega^2. Valid for any motor orientation.
inline Vec6 general_mixer_column(const MotorGeometry& geom, const PropellerParams& prop,
                                 double rho) {
  Vec6 col;
  col.head<3>() = geom.e_hat;
  col.tail<3>() = geom.r.cross(geom.e_hat) - (prop.C_Q * prop.D * geom.d / prop.C_T) * geom.e_hat;
  return thrust_gain(prop, rho) * col;
}

/// Column of the simplified (parameter-free) multirotor mixing matrix:
/// [0, 0, 1, -sin(theta), cos(theta), d]. The subsumed constants live in the
/// controller gains.
inline Vec6 simplified_mixer_column(double theta, double d) {
  Vec6 col;
  col << 0.0, 0.0, 1.0, -std::sin(theta), std::cos(theta), d;
  return col;
}

/// Steady-state input voltage that spins the motor/propeller at omega:
///   V_in = (R C_Q / K_Q)(rho D^5 / 4 pi^2) w^2 + i0 R + K_V w
inline double omega_to_voltage(double omega, const MotorParams& motor,
                               const PropellerParams& prop, double rho) {
  const double a = motor.R / motor.K_Q * torque_gain(prop, rho);
  return a * omega * omega + motor.i0 * motor.R + motor.K_V * omega;
}

/// Throttle setting delta in [0, 1] with V_in = delta * V_max.
inline double omega_to_throttle(double omega, const MotorParams& motor,
                                const PropellerParams& prop, double rho) {
  return std::clamp(omega_to_voltage(omega, motor, prop, rho) / motor.V_max, 0.0, 1.0);
}

/// Steady-state angular speed reached at throttle setting delta: the positive
/// root of a w^2 + K_V w + (i0 R - delta V_max) = 0, or 0 below the no-load
/// intercept. Written to avoid cancellation for small a.
inline double throttle_to_omega(double delta, const MotorParams& motor,
                                const PropellerParams& prop, double rho) {
  const double c = motor.i0 * motor.R - delta * motor.V_max;
  if (c >= 0.0) return 0.0;
  const double a = motor.R / motor.K_Q * torque_gain(prop, rho);
  return -2.0 * c / (motor.K_V + std::sqrt(motor.K_V * motor.K_V - 4.0 * a * c));
}

}  // namespace flightsil

#endif  // FLIGHTSIL_MOTOR_MODEL_HPP
