#ifndef FLIGHTSIL_CONTROL_ALLOCATION_HPP
#define FLIGHTSIL_CONTROL_ALLOCATION_HPP

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flightsil/motor_model.hpp"
#include "flightsil/param_store.hpp"
#include "flightsil/types.hpp"

namespace flightsil {

/// Six generic control inputs. Default semantics [Fx, Fy, Fz, Qx, Qy, Qz];
/// the actual meaning is defined by whichever mixer consumes them.
struct ControlInput {
  Vec6 values = Vec6::Zero();

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }

  static ControlInput forces_torques(const Vec3& f, const Vec3& q) {
    ControlInput u;
    u.values.head<3>() = f;
    u.values.tail<3>() = q;
    return u;
  }
};

/// Raw per-channel mixer outputs, before scaling and saturation. Channel
/// semantics depend on the channel type and USE_MOTOR_PARAM (either a motor
/// setpoint delta_t, an omega^2 intermediate, or a servo deflection).
struct ActuatorCommandVector {
  Vec10 values = Vec10::Zero();

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
};

enum class ChannelKind : std::uint8_t { motor = 0, servo = 1, gpio = 2, aux = 3 };

inline const char* to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::motor: return "motor";
    case ChannelKind::servo: return "servo";
    case ChannelKind::gpio: return "gpio";
    case ChannelKind::aux: return "aux";
  }
  return "?";
}

/// Per-output-channel header: type plus PWM update rate.
/// Aux channels never receive mixed values.
struct OutputChannelConfig {
  ChannelKind kind = ChannelKind::aux;
  int rate_hz = 50;

  bool operator==(const OutputChannelConfig&) const = default;
};

using ChannelArray = std::array<OutputChannelConfig, kNumOutputChannels>;

/// Moore-Penrose pseudoinverse via SVD. Singular values at or below
/// sv_tolerance are treated as zero, so rank-deficient input is handled
/// without failure. A negative tolerance selects the default
/// sigma_max * 64 * machine-epsilon.
template <int Rows, int Cols>
Eigen::Matrix<double, Cols, Rows> pseudoinverse(const Eigen::Matrix<double, Rows, Cols>& m,
                                                double sv_tolerance = -1.0) {
  if (!m.allFinite()) throw InvalidMatrixError("pseudoinverse: non-finite matrix entry");
  Eigen::JacobiSVD<Eigen::Matrix<double, Rows, Cols>> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = sv_tolerance >= 0.0
                         ? sv_tolerance
                         : sv(0) * 64.0 * std::numeric_limits<double>::epsilon();
  Eigen::Matrix<double, Cols, Rows> out = Eigen::Matrix<double, Cols, Rows>::Zero();
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol && sv(i) > 0.0)
      out.noalias() += (1.0 / sv(i)) * svd.matrixV().col(i) * svd.matrixU().col(i).transpose();
  }
  return out;
}

enum class MixerStorage : std::uint8_t { forward_M = 0, inverse_Mdagger = 1 };

/// A 6x10 mixing matrix plus the ten output-channel headers.
///
/// The 60 matrix values are stored as a grid indexed (control-input row r,
/// output channel c). Under forward_M storage grid(r, c) = M(r, c) and the
/// applied inverse is computed (and cached) at load time; under
/// inverse_Mdagger storage grid(r, c) = Mdagger(c, r) and is applied as-is.
class MixerConfig {
 public:
  MixerConfig(std::string name, MixerStorage stored_as, const Mat6x10& grid,
              const ChannelArray& channels, double sv_tolerance = -1.0)
      : name_(std::move(name)), stored_as_(stored_as), grid_(grid), channels_(channels) {
    if (!grid_.allFinite())
      throw InvalidMatrixError("mixer '" + name_ + "': non-finite matrix entry");
    for (int c = 0; c < kNumOutputChannels; ++c) {
      if (channels_[c].rate_hz <= 0)
        throw ValidationError("mixer '" + name_ + "': non-positive channel rate",
                              {"channel " + std::to_string(c)});
    }
    if (stored_as_ == MixerStorage::forward_M) {
      inverse_ = pseudoinverse(grid_, sv_tolerance);
    } else {
      inverse_ = grid_.transpose();
    }
  }

  const std::string& name() const { return name_; }
  MixerStorage stored_as() const { return stored_as_; }
  const Mat6x10& grid() const { return grid_; }
  const ChannelArray& channels() const { return channels_; }

  /// Mdagger, applied as tau = Mdagger * u.
  const Mat10x6& inverse() const { return inverse_; }

  /// Forward mixing matrix M. Reconstructed as pinv(Mdagger) when the
  /// definition was given in applied form.
  Mat6x10 forward() const {
    if (stored_as_ == MixerStorage::forward_M) return grid_;
    return pseudoinverse(inverse_);
  }

 private:
  std::string name_;
  MixerStorage stored_as_;
  Mat6x10 grid_;
  ChannelArray channels_;
  Mat10x6 inverse_;
};

/// The mixing equation tau = Mdagger u. No saturation at this stage.
inline ActuatorCommandVector mix(const MixerConfig& mixer, const ControlInput& u) {
  return {mixer.inverse() * u.values};
}

/// Which portions of the command vector the RC pilot currently owns, and
/// whether the companion link is live at all.
struct OverrideState {
  bool attitude_override = false;  // RC owns the Q components (u indices 3..5)
  bool throttle_override = false;  // RC owns the F components (u indices 0..2)
  bool offboard_active = false;    // fresh offboard stream and armed
};

/// Result of blending the primary and secondary mixers for one tick.
struct EffectiveMixer {
  Mat10x6 inverse = Mat10x6::Zero();
  ChannelArray channels{};
};

/// Column-wise blend of the two applied inverses. Columns are indexed by
/// u-component: F columns come from the primary iff throttle override is on,
/// Q columns iff attitude override is on; with no active offboard stream
/// every column comes from the primary. Channel headers always come from
/// the primary mixer. Columns are copied, never arithmetically mixed.
inline EffectiveMixer blend_mixers(const MixerConfig& primary, const MixerConfig& secondary,
                                   const OverrideState& ov) {
  EffectiveMixer eff{primary.inverse(), primary.channels()};
  if (!ov.offboard_active) return eff;
  for (int col = 0; col < kNumControlInputs; ++col) {
    const bool from_primary = (col < 3) ? ov.throttle_override : ov.attitude_override;
    if (!from_primary) eff.inverse.col(col) = secondary.inverse().col(col);
  }
  return eff;
}

inline ActuatorCommandVector mix(const EffectiveMixer& eff, const ControlInput& u) {
  return {eff.inverse * u.values};
}

// ---------------------------------------------------------------------------
// Predefined mixers

inline constexpr std::string_view kPredefinedMixerNames[] = {
    "quadrotor_x", "hexarotor_x", "fixedwing_standard", "fixedwing_vtail", "passthrough"};

/// Parameter enum codes for PRIMARY_MIXER / SECONDARY_MIXER.
enum class MixerId : int {
  quadrotor_x = 0,
  hexarotor_x = 1,
  fixedwing_standard = 2,
  fixedwing_vtail = 3,
  passthrough = 4,
  custom = 5,
  unset = -1,
};

namespace detail {

inline ChannelArray multirotor_channels(int n_motors) {
  ChannelArray ch{};
  for (int c = 0; c < kNumOutputChannels; ++c) {
    if (c < n_motors)
      ch[c] = {ChannelKind::motor, 490};
    else
      ch[c] = {ChannelKind::aux, 50};
  }
  return ch;
}

inline Mat6x10 multirotor_grid(std::initializer_list<std::pair<double, double>> theta_deg_d) {
  Mat6x10 m = Mat6x10::Zero();
  int c = 0;
  for (const auto& [deg, d] : theta_deg_d)
    m.col(c++) = simplified_mixer_column(deg * std::numbers::pi / 180.0, d);
  return m;
}

}  // namespace detail

/// Hard-coded mixers for common airframes. Multirotor definitions carry the
/// simplified forward M (inverted at load); fixed-wing and passthrough
/// definitions carry Mdagger directly.
inline MixerConfig load_predefined(std::string_view name) {
  if (name == "quadrotor_x") {
    return MixerConfig("quadrotor_x", MixerStorage::forward_M,
                       detail::multirotor_grid({{45, +1}, {135, -1}, {225, +1}, {315, -1}}),
                       detail::multirotor_channels(4));
  }
  if (name == "hexarotor_x") {
    return MixerConfig(
        "hexarotor_x", MixerStorage::forward_M,
        detail::multirotor_grid(
            {{30, +1}, {90, -1}, {150, +1}, {210, -1}, {270, +1}, {330, -1}}),
        detail::multirotor_channels(6));
  }
  if (name == "fixedwing_standard") {
    // Direct channel assignment: aileron, elevator, rudder, throttle.
    Mat6x10 grid = Mat6x10::Zero();
    grid(0, 0) = 1.0;
    grid(1, 1) = 1.0;
    grid(2, 2) = 1.0;
    grid(3, 3) = 1.0;
    ChannelArray ch{};
    ch[0] = {ChannelKind::servo, 50};
    ch[1] = {ChannelKind::servo, 50};
    ch[2] = {ChannelKind::servo, 50};
    ch[3] = {ChannelKind::motor, 50};
    for (int c = 4; c < kNumOutputChannels; ++c) ch[c] = {ChannelKind::aux, 50};
    return MixerConfig("fixedwing_standard", MixerStorage::inverse_Mdagger, grid, ch);
  }
  if (name == "fixedwing_vtail") {
    // Channels: aileron, left ruddervator, right ruddervator, throttle.
    // u = [aileron, elevator, rudder, throttle, 0, 0] commands.
    Mat6x10 grid = Mat6x10::Zero();
    grid(0, 0) = 1.0;   // aileron
    grid(1, 1) = -0.5;  // elevator -> left ruddervator
    grid(2, 1) = 0.5;   // rudder   -> left ruddervator
    grid(1, 2) = 0.5;   // elevator -> right ruddervator
    grid(2, 2) = 0.5;   // rudder   -> right ruddervator
    grid(3, 3) = 1.0;   // throttle
    ChannelArray ch{};
    ch[0] = {ChannelKind::servo, 50};
    ch[1] = {ChannelKind::servo, 50};
    ch[2] = {ChannelKind::servo, 50};
    ch[3] = {ChannelKind::motor, 50};
    for (int c = 4; c < kNumOutputChannels; ++c) ch[c] = {ChannelKind::aux, 50};
    return MixerConfig("fixedwing_vtail", MixerStorage::inverse_Mdagger, grid, ch);
  }
  if (name == "passthrough") {
    // tau = [u; 0, 0, 0, 0]; Mdagger = [I6; 0].
    Mat6x10 grid = Mat6x10::Zero();
    for (int i = 0; i < kNumControlInputs; ++i) grid(i, i) = 1.0;
    ChannelArray ch{};
    for (int c = 0; c < kNumOutputChannels; ++c)
      ch[c] = c < kNumControlInputs ? OutputChannelConfig{ChannelKind::motor, 490}
                                    : OutputChannelConfig{ChannelKind::aux, 50};
    return MixerConfig("passthrough", MixerStorage::inverse_Mdagger, grid, ch);
  }
  throw Error("unknown mixer '" + std::string(name) + "'");
}

inline MixerConfig load_predefined(MixerId id) {
  const int i = static_cast<int>(id);
  if (i < 0 || i >= static_cast<int>(std::size(kPredefinedMixerNames)))
    throw Error("unknown mixer id " + std::to_string(i));
  return load_predefined(kPredefinedMixerNames[i]);
}

// ---------------------------------------------------------------------------
// Custom mixers via parameters

enum class MixerSlot : std::uint8_t { primary, secondary };

inline const char* slot_prefix(MixerSlot slot) {
  return slot == MixerSlot::primary ? "MIX_PRI" : "MIX_SEC";
}

inline std::string mixer_matrix_param(MixerSlot slot, int r, int c) {
  return std::string(slot_prefix(slot)) + "_" + std::to_string(r) + "_" + std::to_string(c);
}

inline std::string mixer_out_type_param(MixerSlot slot, int c) {
  return std::string(slot_prefix(slot)) + "_OUT" + std::to_string(c) + "_TYPE";
}

inline std::string mixer_out_rate_param(MixerSlot slot, int c) {
  return std::string(slot_prefix(slot)) + "_OUT" + std::to_string(c) + "_RATE";
}

inline std::string mixer_stored_as_param(MixerSlot slot) {
  return std::string(slot_prefix(slot)) + "_STORED_AS";
}

/// Registers the full custom-mixer parameter set with defaults: matrix 0.0,
/// OUT*_TYPE aux (3), OUT*_RATE 50, STORED_AS forward M (0).
inline void register_mixer_params(ParamStore& params, MixerSlot slot) {
  for (int r = 0; r < kNumControlInputs; ++r)
    for (int c = 0; c < kNumOutputChannels; ++c)
      params.define_real(mixer_matrix_param(slot, r, c), 0.0);
  for (int c = 0; c < kNumOutputChannels; ++c) {
    params.define_int(mixer_out_type_param(slot, c), static_cast<int>(ChannelKind::aux));
    params.define_int(mixer_out_rate_param(slot, c), 50);
  }
  params.define_int(mixer_stored_as_param(slot), static_cast<int>(MixerStorage::forward_M));
}

struct CustomMixerLoad {
  MixerConfig config;
  std::vector<std::string> warnings;  // one entry per missing param that fell back to default
};

/// Builds a MixerConfig from the 60 matrix + 20 header parameters (plus the
/// STORED_AS selector). Missing params fall back to the documented defaults
/// with a warning record; invalid values raise a ValidationError naming every
/// offending parameter.
inline CustomMixerLoad load_custom(const ParamStore& params, MixerSlot slot = MixerSlot::primary) {
  std::vector<std::string> warnings;
  std::vector<std::string> offenders;

  Mat6x10 grid = Mat6x10::Zero();
  for (int r = 0; r < kNumControlInputs; ++r) {
    for (int c = 0; c < kNumOutputChannels; ++c) {
      const std::string name = mixer_matrix_param(slot, r, c);
      if (auto v = params.try_get_real(name)) {
        if (!std::isfinite(*v))
          offenders.push_back(name);
        else
          grid(r, c) = *v;
      } else {
        warnings.push_back(name + " missing, using 0");
      }
    }
  }

  ChannelArray channels{};
  for (int c = 0; c < kNumOutputChannels; ++c) {
    const std::string tname = mixer_out_type_param(slot, c);
    if (auto v = params.try_get_int(tname)) {
      if (*v < 0 || *v > 3)
        offenders.push_back(tname);
      else
        channels[c].kind = static_cast<ChannelKind>(*v);
    } else {
      channels[c].kind = ChannelKind::aux;
      warnings.push_back(tname + " missing, using aux");
    }
    const std::string rname = mixer_out_rate_param(slot, c);
    if (auto v = params.try_get_int(rname)) {
      if (*v <= 0)
        offenders.push_back(rname);
      else
        channels[c].rate_hz = static_cast<int>(*v);
    } else {
      channels[c].rate_hz = 50;
      warnings.push_back(rname + " missing, using 50");
    }
  }

  MixerStorage stored_as = MixerStorage::forward_M;
  const std::string sname = mixer_stored_as_param(slot);
  if (auto v = params.try_get_int(sname)) {
    if (*v != 0 && *v != 1)
      offenders.push_back(sname);
    else
      stored_as = static_cast<MixerStorage>(*v);
  } else {
    warnings.push_back(sname + " missing, using forward M");
  }

  if (!offenders.empty()) {
    std::string what = "custom mixer validation failed:";
    for (const auto& o : offenders) what += " " + o;
    throw ValidationError(what, offenders);
  }

  const char* name = slot == MixerSlot::primary ? "custom_primary" : "custom_secondary";
  return {MixerConfig(name, stored_as, grid, channels), std::move(warnings)};
}

// ---------------------------------------------------------------------------
// Output post-processing

using ChannelMotorMap = std::array<std::optional<MotorDescriptor>, kNumOutputChannels>;

/// Scaling and saturation stage between the raw mixer output and the
/// actuators.
///
/// With use_motor_param the motor entries of tau are desired omega^2:
/// omega = sqrt(max(0, tau_c)) and delta = omega_to_throttle(omega). Without
/// it they are direct setpoints. Motor channels clamp to [0, 1], servos to
/// [-1, 1]; gpio/aux channels carry their externally set values unchanged.
inline Vec10 output_stage(const ActuatorCommandVector& tau, const ChannelArray& channels,
                          const ChannelMotorMap& motors, bool use_motor_param,
                          const Environment& env = {}, const Vec10& external_values = Vec10::Zero()) {
  Vec10 out = Vec10::Zero();
  for (int c = 0; c < kNumOutputChannels; ++c) {
    switch (channels[c].kind) {
      case ChannelKind::motor: {
        double setpoint = tau[c];
        if (use_motor_param) {
          if (!motors[c])
            throw Error("output_stage: motor channel " + std::to_string(c) +
                        " has no motor descriptor");
          const double omega = std::sqrt(std::max(0.0, tau[c]));
          setpoint = omega_to_throttle(omega, motors[c]->motor, motors[c]->prop, env.rho);
        }
        out[c] = std::clamp(setpoint, 0.0, 1.0);
        break;
      }
      case ChannelKind::servo:
        out[c] = std::clamp(tau[c], -1.0, 1.0);
        break;
      case ChannelKind::gpio:
      case ChannelKind::aux:
        out[c] = external_values[c];
        break;
    }
  }
  return out;
}

inline Vec10 output_stage(const ActuatorCommandVector& tau, const MixerConfig& mixer,
                          const ChannelMotorMap& motors, bool use_motor_param,
                          const Environment& env = {}, const Vec10& external_values = Vec10::Zero()) {
  return output_stage(tau, mixer.channels(), motors, use_motor_param, env, external_values);
}

// ---------------------------------------------------------------------------
// Inspection report (CLI `mixer check`)

/// Rank of M at the default singular-value tolerance.
inline int mixer_rank(const Mat6x10& m) {
  Eigen::JacobiSVD<Mat6x10> svd(m);
  const auto& sv = svd.singularValues();
  const double tol = sv(0) * 64.0 * std::numeric_limits<double>::epsilon();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol && sv(i) > 0.0) ++rank;
  return rank;
}

/// Human-readable report: M, Mdagger, rank, Moore-Penrose residuals and the
/// channel headers. Flags rank deficiency.
inline std::string mixer_check_report(const MixerConfig& mixer) {
  std::ostringstream os;
  const Mat6x10 m = mixer.forward();
  const Mat10x6& minv = mixer.inverse();

  os << "mixer: " << mixer.name() << "  (stored as "
     << (mixer.stored_as() == MixerStorage::forward_M ? "M" : "Mdagger") << ")\n\n";

  Eigen::IOFormat fmt(5, 0, "  ", "\n", "  ", "");
  os << "M (6x10):\n" << m.format(fmt) << "\n\n";
  os << "Mdagger (10x6):\n" << minv.format(fmt) << "\n\n";

  const int rank = mixer_rank(m);
  os << "rank: " << rank;
  if (rank < kNumControlInputs) os << "  [rank-deficient: " << (kNumControlInputs - rank)
                                   << " control input(s) unallocated]";
  os << "\n";

  const double r1 = (m * minv * m - m).cwiseAbs().maxCoeff();
  const double r2 = (minv * m * minv - minv).cwiseAbs().maxCoeff();
  const Eigen::Matrix<double, 6, 6> mmd = m * minv;
  const Eigen::Matrix<double, 10, 10> mdm = minv * m;
  const double r3 = (mmd - mmd.transpose()).cwiseAbs().maxCoeff();
  const double r4 = (mdm - mdm.transpose()).cwiseAbs().maxCoeff();
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "Moore-Penrose residuals: |MXM-M|=%.3g |XMX-X|=%.3g |MX-sym|=%.3g |XM-sym|=%.3g\n",
                r1, r2, r3, r4);
  os << buf;

  os << "channels:\n";
  for (int c = 0; c < kNumOutputChannels; ++c) {
    os << "  " << c << ": " << to_string(mixer.channels()[c].kind) << " @ "
       << mixer.channels()[c].rate_hz << " Hz\n";
  }
  return os.str();
}

}  // namespace flightsil

#endif  // FLIGHTSIL_CONTROL_ALLOCATION_HPP
