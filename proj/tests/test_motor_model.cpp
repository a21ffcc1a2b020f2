#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "flightsil/motor_model.hpp"

using namespace flightsil;
using Catch::Approx;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Fixed constants used by several derived-value checks.
const PropellerParams kProp{0.1, 0.01, 0.2};
const MotorParams kMotor{0.1, 0.01, 0.01, 1.0, 12.0};
constexpr double kRho = 1.225;

}  // namespace

TEST_CASE("thrust_torque: zero speed produces nothing") {
  MotorGeometry geom;
  const Wrench w = thrust_torque(0.0, geom, kProp, kRho);
  REQUIRE(w.force.norm() == 0.0);
  REQUIRE(w.torque.norm() == 0.0);
}

TEST_CASE("thrust_torque: r = 0 leaves only axial terms") {
  MotorGeometry geom;
  geom.r = Vec3::Zero();
  geom.e_hat = Vec3(0, 0, -1);
  geom.d = +1.0;
  const Wrench w = thrust_torque(400.0, geom, kProp, kRho);

  REQUIRE(w.force.x() == 0.0);
  REQUIRE(w.force.y() == 0.0);
  REQUIRE(w.force.z() < 0.0);  // up-thrust in NED
  REQUIRE(w.torque.x() == 0.0);
  REQUIRE(w.torque.y() == 0.0);
  // d = +1 on an up-thrusting motor reacts with positive (nose-right) yaw.
  REQUIRE(w.torque.z() > 0.0);
  REQUIRE(w.torque.norm() / w.force.norm() ==
          Approx(kProp.C_Q * kProp.D / kProp.C_T).epsilon(1e-12));

  geom.d = -1.0;
  const Wrench w2 = thrust_torque(400.0, geom, kProp, kRho);
  REQUIRE(w2.torque.z() < 0.0);
}

TEST_CASE("thrust_torque: direct evaluation of each term") {
  MotorGeometry geom;
  geom.r = Vec3(0.25, 0, 0);
  geom.e_hat = Vec3(0, 0, -1);
  geom.d = +1.0;
  const double omega = 400.0;
  const Wrench w = thrust_torque(omega, geom, kProp, kRho);

  // Independent scalar computation of each term.
  const double f_mag = 0.1 * 1.225 * 0.2 * 0.2 * 0.2 * 0.2 / (4.0 * kPi * kPi) * omega * omega;
  const double q_drag = 0.01 * 1.225 * 0.2 * 0.2 * 0.2 * 0.2 * 0.2 / (4.0 * kPi * kPi) * omega * omega;
  REQUIRE(w.force.z() == Approx(-f_mag).epsilon(1e-14));
  // r x F with r = (0.25, 0, 0), F = (0, 0, -f): (0*(-f) - 0, 0 - 0.25*(-f), 0).
  REQUIRE(w.torque.x() == Approx(0.0).margin(1e-15));
  REQUIRE(w.torque.y() == Approx(0.25 * f_mag).epsilon(1e-14));
  REQUIRE(w.torque.z() == Approx(q_drag).epsilon(1e-14));
}

TEST_CASE("general_mixer_column: r = 0 case") {
  // Constants chosen so C_T rho D^4 / (4 pi^2) = 1.
  PropellerParams prop{1.0, 0.01, 1.0};
  const double rho = 4.0 * kPi * kPi;
  MotorGeometry geom;
  geom.r = Vec3::Zero();
  geom.e_hat = Vec3(0, 0, -1);
  geom.d = +1.0;

  const Vec6 col = general_mixer_column(geom, prop, rho);
  REQUIRE(col[0] == Approx(0.0).margin(1e-15));
  REQUIRE(col[1] == Approx(0.0).margin(1e-15));
  REQUIRE(col[2] == Approx(-1.0).epsilon(1e-14));
  REQUIRE(col[3] == Approx(0.0).margin(1e-15));
  REQUIRE(col[4] == Approx(0.0).margin(1e-15));
  REQUIRE(col[5] == Approx(prop.C_Q * prop.D / prop.C_T).epsilon(1e-14));
}

TEST_CASE("general_mixer_column: inverted motor flips the thrust row") {
  MotorGeometry geom;
  geom.e_hat = Vec3(0, 0, +1);
  const Vec6 col = general_mixer_column(geom, kProp, kRho);
  REQUIRE(col[2] > 0.0);
}

TEST_CASE("general_mixer_column: quad-X brute force against summed thrust_torque") {
  // 4 motors, arm 0.25 m, matching the predefined quad-X geometry.
  std::vector<MotorGeometry> motors;
  const double arm = 0.25;
  const double thetas[] = {45.0, 135.0, 225.0, 315.0};
  const double spins[] = {+1.0, -1.0, +1.0, -1.0};
  for (int i = 0; i < 4; ++i) {
    MotorGeometry g;
    const double th = thetas[i] * kPi / 180.0;
    g.r = Vec3(arm * std::cos(th), arm * std::sin(th), 0.0);
    g.e_hat = Vec3(0, 0, -1);
    g.d = spins[i];
    g.theta = th;
    motors.push_back(g);
  }

  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> speed(0.0, 900.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vec6 via_matrix = Vec6::Zero();
    Wrench summed;
    for (const auto& g : motors) {
      const double omega = speed(rng);
      via_matrix += general_mixer_column(g, kProp, kRho) * omega * omega;
      summed += thrust_torque(omega, g, kProp, kRho);
    }
    Vec6 direct;
    direct << summed.force, summed.torque;
    REQUIRE((via_matrix - direct).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + direct.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("simplified_mixer_column examples") {
  {
    const Vec6 c = simplified_mixer_column(0.0, +1.0);
    REQUIRE(c[0] == 0.0);
    REQUIRE(c[1] == 0.0);
    REQUIRE(c[2] == 1.0);
    REQUIRE(c[3] == Approx(0.0).margin(1e-15));
    REQUIRE(c[4] == 1.0);
    REQUIRE(c[5] == 1.0);
  }
  {
    // Hand trigonometry: sin 45 = cos 45 = sqrt(2)/2.
    const Vec6 c = simplified_mixer_column(45.0 * kPi / 180.0, -1.0);
    REQUIRE(c[3] == Approx(-0.70710678118654752).epsilon(1e-12));
    REQUIRE(c[4] == Approx(0.70710678118654752).epsilon(1e-12));
    REQUIRE(c[5] == -1.0);
  }
  {
    const Vec6 c = simplified_mixer_column(kPi, +1.0);
    REQUIRE(c[3] == Approx(0.0).margin(1e-12));
    REQUIRE(c[4] == Approx(-1.0).epsilon(1e-12));
    REQUIRE(c[5] == 1.0);
  }
}

TEST_CASE("omega_to_voltage: intercept, direct evaluation, monotonicity") {
  REQUIRE(omega_to_voltage(0.0, kMotor, kProp, kRho) ==
          Approx(kMotor.i0 * kMotor.R).epsilon(1e-15));

  // Direct evaluation with the fixed constants at omega = 400.
  const double omega = 400.0;
  const double expected = 0.1 * 0.01 / 0.01 * (1.225 * 0.2 * 0.2 * 0.2 * 0.2 * 0.2 / (4.0 * kPi * kPi)) * omega * omega +
                          1.0 * 0.1 + 0.01 * omega;
  REQUIRE(omega_to_voltage(omega, kMotor, kProp, kRho) == Approx(expected).epsilon(1e-13));

  double prev = -1.0;
  for (double w = 0.0; w <= 1200.0; w += 7.5) {
    const double v = omega_to_voltage(w, kMotor, kProp, kRho);
    REQUIRE(v > prev);
    prev = v;
  }
}

TEST_CASE("omega_to_throttle scales and clamps") {
  REQUIRE(omega_to_throttle(0.0, kMotor, kProp, kRho) ==
          Approx(kMotor.i0 * kMotor.R / kMotor.V_max).epsilon(1e-15));
  const double v400 = omega_to_voltage(400.0, kMotor, kProp, kRho);
  REQUIRE(omega_to_throttle(400.0, kMotor, kProp, kRho) == Approx(v400 / 12.0).epsilon(1e-14));
  // Far beyond V_max: clamped.
  REQUIRE(omega_to_throttle(5000.0, kMotor, kProp, kRho) == 1.0);
}

TEST_CASE("throttle_to_omega: intercept and zero") {
  REQUIRE(throttle_to_omega(kMotor.i0 * kMotor.R / kMotor.V_max, kMotor, kProp, kRho) == 0.0);
  REQUIRE(throttle_to_omega(0.0, kMotor, kProp, kRho) == 0.0);
}

TEST_CASE("throttle round trip is the identity on the unclamped domain") {
  for (double omega = 1.0; omega <= 1000.0; omega += 13.7) {
    const double delta = omega_to_throttle(omega, kMotor, kProp, kRho);
    REQUIRE(delta < 1.0);
    const double back = throttle_to_omega(delta, kMotor, kProp, kRho);
    REQUIRE(back == Approx(omega).epsilon(1e-9));
  }
}

TEST_CASE("steady-state torque balance at the commanded voltage") {
  for (double omega = 0.0; omega <= 1000.0; omega += 50.0) {
    const double v_in = omega_to_voltage(omega, kMotor, kProp, kRho);
    const double motor_torque = kMotor.K_Q * ((v_in - kMotor.K_V * omega) / kMotor.R - kMotor.i0);
    const double prop_torque = kRho * std::pow(kProp.D, 5) * omega * omega * kProp.C_Q / (4.0 * kPi * kPi);
    if (prop_torque == 0.0) {
      REQUIRE(std::abs(motor_torque) < 1e-15);
    } else {
      REQUIRE(motor_torque == Approx(prop_torque).epsilon(1e-9));
    }
  }
}

TEST_CASE("column consistency: thrust_torque equals column * omega^2") {
  MotorGeometry geom;
  geom.r = Vec3(0.2, -0.1, 0.03);
  geom.e_hat = Vec3(0.1, 0.2, -0.97).normalized();
  geom.d = -1.0;
  const Vec6 col = general_mixer_column(geom, kProp, kRho);
  for (double omega : {0.0, 100.0, 400.0, 1000.0}) {
    const Wrench w = thrust_torque(omega, geom, kProp, kRho);
    Vec6 direct;
    direct << w.force, w.torque;
    const Vec6 via = col * omega * omega;
    const double scale = std::max(1e-300, direct.cwiseAbs().maxCoeff());
    REQUIRE((via - direct).cwiseAbs().maxCoeff() / scale <= 1e-12);
  }
}

TEST_CASE("row proportionality: planar multirotor general vs simplified") {
  // Identical motors, e_hat = -z, equal arm length.
  const double arm = 0.25;
  const double thetas[] = {45.0, 135.0, 225.0, 315.0};
  const double spins[] = {+1.0, -1.0, +1.0, -1.0};

  Eigen::Matrix<double, 6, 4> general, simplified;
  for (int i = 0; i < 4; ++i) {
    MotorGeometry g;
    const double th = thetas[i] * kPi / 180.0;
    g.r = Vec3(arm * std::cos(th), arm * std::sin(th), 0.0);
    g.e_hat = Vec3(0, 0, -1);
    g.d = spins[i];
    general.col(i) = general_mixer_column(g, kProp, kRho);
    simplified.col(i) = simplified_mixer_column(th, spins[i]);
  }

  for (int row = 0; row < 6; ++row) {
    const double gnorm = general.row(row).cwiseAbs().maxCoeff();
    const double snorm = simplified.row(row).cwiseAbs().maxCoeff();
    if (snorm == 0.0) {
      REQUIRE(gnorm < 1e-15);
      continue;
    }
    // Scalar from the largest entry, then checked elementwise.
    int jmax = 0;
    simplified.row(row).cwiseAbs().maxCoeff(&jmax);
    const double scalar = general(row, jmax) / simplified(row, jmax);
    if (row == 2) {
      REQUIRE(scalar < 0.0);
    } else {
      REQUIRE(scalar > 0.0);
    }
    for (int j = 0; j < 4; ++j) {
      REQUIRE(general(row, j) == Approx(scalar * simplified(row, j)).epsilon(1e-9).margin(1e-15));
    }
  }
}
