#include "velo/ergonomics.hpp"

#include <cmath>

namespace velo {

std::string to_string(UseCaseKind kind) {
  switch (kind) {
  case UseCaseKind::road: return "road";
  case UseCaseKind::mountain: return "mountain";
  case UseCaseKind::commuting: return "commuting";
  }
  return "unknown";
}

UseCaseKind use_case_from_string(const std::string &s) {
  if (s == "road") return UseCaseKind::road;
  if (s == "mountain") return UseCaseKind::mountain;
  if (s == "commuting") return UseCaseKind::commuting;
  throw IoError("unknown use case '" + s + "'");
}

UseCase default_use_case(UseCaseKind kind) {
  UseCase uc;
  uc.kind = kind;
  if (kind != UseCaseKind::road) {
    uc.knee = {uc.knee.lo - 10.0, uc.knee.hi + 10.0};
    uc.hip = {uc.hip.lo - 10.0, uc.hip.hi + 10.0};
    uc.arm = {uc.arm.lo - 10.0, uc.arm.hi + 10.0};
  }
  return uc;
}

ErgonomicsSolver::ErgonomicsSolver(const DesignSchema &schema, ErgonomicsConfig cfg,
                                   GeometryConfig geo)
    : params_(BikeParams::resolve(schema)), cfg_(cfg), geo_(geo) {}

InterfacePoints ErgonomicsSolver::interface_points(const Design &d) const {
  const double saddle_h = d.real(params_.saddle_height);
  const double sa_deg = d.real(params_.seat_angle);
  const double sa = sa_deg * kDegToRad;
  const double tan_sa = std::tan(sa);
  if (!std::isfinite(saddle_h) || !std::isfinite(sa_deg) || std::fabs(std::sin(sa)) < 1e-9 ||
      std::fabs(tan_sa) < 1e-9)
    throw EvalError("degenerate seat angle " + std::to_string(sa_deg) + " deg");

  InterfacePoints pts;
  pts.saddle = {-saddle_h / tan_sa, saddle_h};

  const FrameLayout frame = solve_frame(d, params_, geo_);
  if (!frame.finite_inputs || !frame.front_end_ok)
    throw EvalError("front end unplaceable: down tube cannot reach the head tube");
  const std::size_t stem = d.category(params_.stem_kind);
  const std::size_t bar = d.category(params_.handlebar_style);
  const Vec2 stem_off = cfg_.stem_offsets[stem % cfg_.stem_offsets.size()];
  const Vec2 bar_off = cfg_.bar_offsets[bar % cfg_.bar_offsets.size()];
  pts.grip = frame.head_tube_top + stem_off + bar_off;

  // Pedal at maximum extension: BB->pedal continues the saddle->BB line.
  const double saddle_dist = pts.saddle.norm();
  if (saddle_dist < 1e-9) throw EvalError("saddle coincides with the bottom bracket");
  const Vec2 away = pts.saddle * (-1.0 / saddle_dist);
  pts.pedal_far = away * cfg_.crank_length_mm;
  return pts;
}

namespace {

/// Intersects circles (c0, r0) and (c1, r1); returns the solution with the
/// larger y. Caller guarantees a solution exists.
Vec2 circle_intersection_high(Vec2 c0, double r0, Vec2 c1, double r1) {
  const Vec2 delta = c1 - c0;
  const double d = delta.norm();
  const double a = (r0 * r0 - r1 * r1 + d * d) / (2.0 * d);
  const double h_sq = r0 * r0 - a * a;
  const double h = h_sq > 0.0 ? std::sqrt(h_sq) : 0.0;
  const Vec2 u = delta * (1.0 / d);
  const Vec2 n{-u.y, u.x};
  const Vec2 p1 = c0 + u * a + n * h;
  const Vec2 p2 = c0 + u * a - n * h;
  return p1.y >= p2.y ? p1 : p2;
}

} // namespace

JointAngles joint_angles(const InterfacePoints &pts, const RiderProfile &rider) {
  JointAngles out;
  if (!rider.valid()) {
    out.incompatible = true;
    out.knee = out.hip = out.arm = 180.0;
    return out;
  }

  const double ul = rider.upper_leg, ll = rider.lower_leg;
  const double leg_span = distance(pts.saddle, pts.pedal_far);
  const double leg_reach = ul + ll;

  // Knee: law of cosines across the saddle-pedal span.
  Vec2 knee_pt;
  const Vec2 leg_dir = (pts.pedal_far - pts.saddle) * (1.0 / std::max(leg_span, 1e-9));
  if (leg_span >= leg_reach) {
    out.knee = 180.0;
    out.incompatible = true;
    out.reach_deficit_mm += leg_span - leg_reach;
    knee_pt = pts.saddle + leg_dir * ul;
  } else {
    const double cos_knee =
        std::clamp((ul * ul + ll * ll - leg_span * leg_span) / (2.0 * ul * ll), -1.0, 1.0);
    out.knee = std::acos(cos_knee) / kDegToRad;
    // Knee point: forward-of-line solution of the two-link leg chain.
    const double a = (ul * ul - ll * ll + leg_span * leg_span) / (2.0 * leg_span);
    const double h_sq = ul * ul - a * a;
    const double h = h_sq > 0.0 ? std::sqrt(h_sq) : 0.0;
    const Vec2 n{-leg_dir.y, leg_dir.x};
    const Vec2 k1 = pts.saddle + leg_dir * a + n * h;
    const Vec2 k2 = pts.saddle + leg_dir * a - n * h;
    knee_pt = k1.x >= k2.x ? k1 : k2;
  }

  // Shoulder: torso from the saddle, arm to the grip.
  const double torso = rider.torso, arm = rider.arm;
  const double grip_span = distance(pts.saddle, pts.grip);
  Vec2 shoulder;
  if (grip_span >= torso + arm) {
    out.incompatible = true;
    out.reach_deficit_mm += grip_span - (torso + arm);
    shoulder = pts.saddle + (pts.grip - pts.saddle) * (torso / std::max(grip_span, 1e-9));
  } else if (grip_span <= std::fabs(torso - arm)) {
    out.incompatible = true;
    out.reach_deficit_mm += std::fabs(torso - arm) - grip_span;
    shoulder = pts.saddle + (pts.grip - pts.saddle) * (torso / std::max(grip_span, 1e-9));
  } else {
    shoulder = circle_intersection_high(pts.saddle, torso, pts.grip, arm);
  }

  const Vec2 torso_vec = shoulder - pts.saddle;
  out.hip = angle_between_deg(torso_vec, knee_pt - pts.saddle);
  out.arm = angle_between_deg(pts.saddle - shoulder, pts.grip - shoulder);
  out.torso_angle_deg = std::fabs(std::atan2(torso_vec.y, torso_vec.x)) / kDegToRad;
  if (out.torso_angle_deg > 90.0) out.torso_angle_deg = 180.0 - out.torso_angle_deg;

  out.knee = std::clamp(out.knee, 0.0, 180.0);
  out.hip = std::clamp(out.hip, 0.0, 180.0);
  out.arm = std::clamp(out.arm, 0.0, 180.0);
  return out;
}

namespace {

double range_error(double angle, const AngleRange &range) {
  if (angle < range.lo) return range.lo - angle;
  if (angle > range.hi) return angle - range.hi;
  return 0.0;
}

} // namespace

ErgonomicErrors ergonomic_errors(const JointAngles &angles, const UseCase &use_case,
                                 const ErgonomicsConfig &cfg) {
  ErgonomicErrors err;
  err.knee = range_error(angles.knee, use_case.knee);
  err.hip = range_error(angles.hip, use_case.hip);
  err.arm = range_error(angles.arm, use_case.arm);
  if (angles.incompatible) {
    const double penalty =
        cfg.incompatibility_penalty_deg + cfg.penalty_deg_per_mm * angles.reach_deficit_mm;
    err.knee += penalty;
    err.hip += penalty;
    err.arm += penalty;
  }
  return err;
}

} // namespace velo
