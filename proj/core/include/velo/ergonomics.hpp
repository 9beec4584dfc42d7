#pragma once

#include <array>
#include <string>

#include "velo/common.hpp"
#include "velo/design_space.hpp"
#include "velo/geometry.hpp"

namespace velo {

/// The six anthropometric lengths, all in mm and strictly positive.
struct RiderProfile {
  double upper_leg = 450.0;
  double lower_leg = 435.0;
  double arm = 580.0;
  double torso = 510.0;
  double neck_head = 240.0;
  double torso_width = 390.0;

  bool valid() const {
    return upper_leg > 0 && lower_leg > 0 && arm > 0 && torso > 0 && neck_head > 0 &&
           torso_width > 0;
  }
};

enum class UseCaseKind { road, mountain, commuting };

std::string to_string(UseCaseKind kind);
UseCaseKind use_case_from_string(const std::string &s);

struct AngleRange {
  double lo = 0.0;
  double hi = 180.0;
};

/// Riding context plus its target joint-angle ranges in degrees.
struct UseCase {
  UseCaseKind kind = UseCaseKind::road;
  AngleRange knee{140.0, 150.0};
  AngleRange hip{45.0, 90.0};
  AngleRange arm{80.0, 100.0};
};

/// Default targets: road uses the reference ranges, mountain and commuting
/// widen each bound by 10 degrees. Editable via the harness config.
UseCase default_use_case(UseCaseKind kind);

/// Rider-bike contact points relative to the bottom bracket, in mm.
/// pedal_far is the pedal at maximum distance from the saddle.
struct InterfacePoints {
  Vec2 saddle;
  Vec2 grip;
  Vec2 pedal_far;
};

struct ErgonomicsConfig {
  double crank_length_mm = 172.5;
  // Stem and handlebar grip offsets from the head tube top, by category
  // index, {forward, up} in mm.
  std::array<Vec2, 3> stem_offsets{{{60.0, 20.0}, {70.0, 35.0}, {50.0, 60.0}}};
  std::array<Vec2, 3> bar_offsets{{{60.0, -10.0}, {10.0, 20.0}, {70.0, 0.0}}};
  double incompatibility_penalty_deg = 100.0;
  double penalty_deg_per_mm = 0.1;
};

struct JointAngles {
  double knee = 0.0; // full-extension knee angle, degrees
  double hip = 0.0;
  double arm = 0.0;
  bool incompatible = false;   // a linkage cannot close
  double reach_deficit_mm = 0; // total closure deficit across linkages
  double torso_angle_deg = 0;  // torso inclination over horizontal (drag input)
};

struct ErgonomicErrors {
  double knee = 0.0;
  double hip = 0.0;
  double arm = 0.0;
};

/// Caches schema indices; all methods are pure.
class ErgonomicsSolver {
public:
  ErgonomicsSolver(const DesignSchema &schema, ErgonomicsConfig cfg = {},
                   GeometryConfig geo = {});

  /// Saddle from saddle height and seat angle, grip from the solved frame
  /// front end plus stem/bar offsets, pedal_far on the saddle-BB line
  /// extended by the crank. Throws EvalError on degenerate geometry.
  InterfacePoints interface_points(const Design &design) const;

  const ErgonomicsConfig &config() const { return cfg_; }

private:
  BikeParams params_;
  ErgonomicsConfig cfg_;
  GeometryConfig geo_;
};

/// Planar two-link solves for the leg (saddle-pedal) and torso-arm
/// (saddle-grip) chains. Angles in [0, 180] degrees; unreachable contact
/// points set the incompatibility flag and deficit instead of failing.
JointAngles joint_angles(const InterfacePoints &points, const RiderProfile &rider);

/// Per-joint distance to the target range; zero inside. Incompatible fits
/// additionally receive the fixed penalty plus the mm deficit converted at
/// penalty_deg_per_mm.
ErgonomicErrors ergonomic_errors(const JointAngles &angles, const UseCase &use_case,
                                 const ErgonomicsConfig &cfg = {});

} // namespace velo
