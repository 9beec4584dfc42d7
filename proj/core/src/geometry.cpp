#include "velo/geometry.hpp"

#include <cmath>
#include <limits>

namespace velo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sanitize(double margin) { return std::isnan(margin) ? kInf : margin; }

} // namespace

BikeParams BikeParams::resolve(const DesignSchema &schema) {
  BikeParams p{};
  p.cs = schema.index_of("CS textfield");
  p.bb_drop = schema.index_of("BB textfield");
  p.stack = schema.index_of("Stack");
  p.head_angle = schema.index_of("Head angle");
  p.head_tube_length = schema.index_of("Head tube length textfield");
  p.seat_stay_junction = schema.index_of("Seat stay junction0");
  p.seat_tube_length = schema.index_of("Seat tube length");
  p.seat_angle = schema.index_of("Seat angle");
  p.dt_length = schema.index_of("DT Length");
  p.fork_offset = schema.index_of("FORK0R");
  p.ttd = schema.index_of("ttd");
  p.csd = schema.index_of("csd");
  p.ssd = schema.index_of("ssd");
  p.dtd = schema.index_of("dtd");
  p.head_tube_upper_ext = schema.index_of("Head tube upper extension2");
  p.seat_tube_ext = schema.index_of("Seat tube extension2");
  p.head_tube_lower_ext = schema.index_of("Head tube lower extension2");
  p.wall_tt = schema.index_of("Wall thickness Top tube");
  p.wall_ht = schema.index_of("Wall thickness Head tube");
  p.wall_dt = schema.index_of("Wall thickness Down tube");
  p.wall_cs = schema.index_of("Wall thickness Chain stay");
  p.wall_ss = schema.index_of("Wall thickness Seat stay");
  p.wall_st = schema.index_of("Wall thickness Seat tube");
  p.wheel_diameter_front = schema.index_of("Wheel diameter front");
  p.wheel_diameter_rear = schema.index_of("Wheel diameter rear");
  p.head_tube_diameter = schema.index_of("Head tube diameter");
  p.seat_tube_diameter = schema.index_of("Seat tube diameter");
  p.saddle_height = schema.index_of("Saddle height");
  p.seatpost_length = schema.index_of("Seatpost LENGTH");
  p.color_r = schema.index_of("FIRST color R_RGB");
  p.color_g = schema.index_of("FIRST color G_RGB");
  p.color_b = schema.index_of("FIRST color B_RGB");
  p.material = schema.index_of("MATERIAL");
  p.handlebar_style = schema.index_of("Handlebar style");
  p.stem_kind = schema.index_of("Stem kind");
  p.front_fender = schema.index_of("Front Fender include");
  p.rear_fender = schema.index_of("Rear Fender include");
  p.rack = schema.index_of("Display RACK");
  p.aerobars = schema.index_of("Display AEROBARS");
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (schema.param(i).strictly_positive) p.strictly_positive.push_back(i);
  return p;
}

FrameLayout solve_frame(const Design &d, const BikeParams &p, const GeometryConfig &cfg) {
  FrameLayout f;
  const double cs = d.real(p.cs);
  const double bb = d.real(p.bb_drop);
  const double stack = d.real(p.stack);
  const double ha = d.real(p.head_angle) * kDegToRad;
  const double htl = d.real(p.head_tube_length);
  const double ssj0 = d.real(p.seat_stay_junction);
  const double stl = d.real(p.seat_tube_length);
  const double sa = d.real(p.seat_angle) * kDegToRad;
  const double dtl = d.real(p.dt_length);
  const double fork = d.real(p.fork_offset);
  const double htux = d.real(p.head_tube_upper_ext);
  const double stx = d.real(p.seat_tube_ext);
  const double htlx = d.real(p.head_tube_lower_ext);
  const double r_rear = d.real(p.wheel_diameter_rear) / 2.0;
  const double r_front = d.real(p.wheel_diameter_front) / 2.0;

  f.finite_inputs = std::isfinite(cs) && std::isfinite(bb) && std::isfinite(stack) &&
                    std::isfinite(ha) && std::isfinite(htl) && std::isfinite(ssj0) &&
                    std::isfinite(stl) && std::isfinite(sa) && std::isfinite(dtl) &&
                    std::isfinite(fork) && std::isfinite(htux) && std::isfinite(stx) &&
                    std::isfinite(htlx) && std::isfinite(r_rear) && std::isfinite(r_front);
  if (!f.finite_inputs) return f;

  // Rear triangle. The rear axle sits behind the bottom bracket, raised by
  // the BB drop; the chain stay is the hypotenuse.
  const double cs_horiz_sq = cs * cs - bb * bb;
  f.rear_ok = cs_horiz_sq > 0.0;
  f.rear_axle = {f.rear_ok ? -std::sqrt(cs_horiz_sq) : 0.0, bb};
  f.ground_y = bb - r_rear;

  // Seat tube runs up and back from the BB at the seat angle.
  const Vec2 seat_dir{-std::cos(sa), std::sin(sa)};
  f.seat_tube_top = seat_dir * stl;
  f.seat_stay_junction = seat_dir * (stl - ssj0);
  f.top_tube_seat_junction = seat_dir * (stl - stx);
  f.seat_stay_length = distance(f.seat_stay_junction, f.rear_axle);

  // Head tube axis points down-forward. Its top is located so that the
  // down tube (length dtl from the BB) meets it at the lower-extension
  // junction; that fixes the frame's horizontal extent.
  const Vec2 head_down{std::cos(ha), -std::sin(ha)};
  const double junction_y = stack - (htl - htlx) * std::sin(ha);
  const double reach_sq = dtl * dtl - junction_y * junction_y;
  f.front_end_ok = reach_sq > 0.0 && std::sin(ha) > 1e-9;
  const double junction_x = f.front_end_ok ? std::sqrt(reach_sq) : 0.0;
  f.down_tube_junction = {junction_x, junction_y};
  const double head_top_x = junction_x - (htl - htlx) * std::cos(ha);
  f.head_tube_top = {head_top_x, stack};
  f.head_tube_bottom = f.head_tube_top + head_down * htl;
  f.top_tube_head_junction = f.head_tube_top + head_down * htux;
  f.top_tube_length = distance(f.top_tube_seat_junction, f.top_tube_head_junction);

  // Front axle: offset from the steering axis by the fork rake, at wheel
  // radius above the ground line set by the rear wheel.
  if (f.front_end_ok) {
    const Vec2 rake_dir{std::sin(ha), std::cos(ha)};
    const double axle_y = f.ground_y + r_front;
    const double t = (stack + fork * std::cos(ha) - axle_y) / std::sin(ha);
    f.front_axle = {head_top_x + t * std::cos(ha) + fork * std::sin(ha), axle_y};
  }
  return f;
}

const std::array<std::string, kGeometricCheckCount> &geometric_check_names() {
  static const std::array<std::string, kGeometricCheckCount> names = {
      "saddle_height_too_small",
      "seat_post_too_short",
      "head_tube_lower_extension",
      "head_tube_length",
      "parameter_positivity",
      "chain_stay_vs_wheel",
      "chain_stay_vs_bb_drop",
      "seat_stay_vs_wheel",
      "down_tube_reach",
      "pedal_front_wheel_clearance",
      "crank_ground_clearance",
      "rgb_bound",
  };
  return names;
}

std::vector<ConstraintValue> geometric_checks(const Design &d, const DesignSchema &schema,
                                              const GeometryConfig &cfg) {
  return geometric_checks(d, BikeParams::resolve(schema), cfg);
}

std::vector<ConstraintValue> geometric_checks(const Design &d, const BikeParams &p,
                                              const GeometryConfig &cfg) {
  const auto &names = geometric_check_names();
  std::vector<ConstraintValue> out;
  out.reserve(kGeometricCheckCount);

  const double sa = d.real(p.seat_angle) * kDegToRad;
  const double stl = d.real(p.seat_tube_length);
  const double saddle_h = d.real(p.saddle_height);
  const double htl = d.real(p.head_tube_length);
  const double htux = d.real(p.head_tube_upper_ext);
  const double htlx = d.real(p.head_tube_lower_ext);
  const double cs = d.real(p.cs);
  const double bb = d.real(p.bb_drop);
  const double r_rear = d.real(p.wheel_diameter_rear) / 2.0;
  const double r_front = d.real(p.wheel_diameter_front) / 2.0;

  // 1. Saddle must clear the top of the seat tube.
  out.push_back({names[0], sanitize(stl * std::sin(sa) - saddle_h)});

  // 2. Seat post must bridge from the saddle down to the seat tube.
  const double sin_sa = std::sin(sa);
  const double exposed = sin_sa > 1e-9 ? saddle_h / sin_sa - stl : kInf;
  out.push_back({names[1], sanitize(exposed - d.real(p.seatpost_length))});

  // 3. Down-tube junction must lie on the head tube.
  out.push_back({names[2], sanitize(htlx - htl)});

  // 4. Top-tube and down-tube junctions must not cross on the head tube.
  out.push_back({names[3], sanitize(htux + htlx - htl)});

  // 5. Strictly-positive parameter set: worst negativity.
  double positivity = -kInf;
  for (std::size_t idx : p.strictly_positive)
    positivity = std::max(positivity, sanitize(-d.real(idx)));
  out.push_back({names[4], p.strictly_positive.empty() ? 0.0 : positivity});

  // 6. Chain stay must out-reach the rear wheel radius.
  out.push_back({names[5], sanitize(r_rear - cs)});

  // 7. Chain stay must out-reach the BB drop.
  out.push_back({names[6], sanitize(std::fabs(bb) - cs)});

  const FrameLayout frame = solve_frame(d, p, cfg);

  // 8. Seat stay must out-reach the rear wheel radius.
  const double ss_len = frame.finite_inputs ? frame.seat_stay_length : kInf;
  out.push_back({names[7], sanitize(std::isfinite(ss_len) ? r_rear - ss_len : kInf)});

  // 9. Down tube must reach the head tube junction height.
  if (frame.finite_inputs) {
    const double junction_y = d.real(p.stack) - (htl - htlx) * std::sin(d.real(p.head_angle) * kDegToRad);
    out.push_back({names[8], sanitize(std::fabs(junction_y) - d.real(p.dt_length))});
  } else {
    out.push_back({names[8], kInf});
  }

  // 10. Front wheel must clear the pedal in its forward position. With an
  // unplaceable front end the clearance is unknowable; the margin falls
  // back to the full wheel radius (violated, finite, length-scaled).
  if (frame.front_end_ok) {
    const Vec2 pedal{cfg.crank_length_mm, 0.0};
    out.push_back({names[9], sanitize(r_front - distance(frame.front_axle, pedal))});
  } else {
    out.push_back({names[9], sanitize(r_front)});
  }

  // 11. Crank must clear the ground at the bottom of its rotation.
  out.push_back({names[10], sanitize(cfg.crank_length_mm + bb - r_rear)});

  // 12. Paint channels must stay within the 8-bit range.
  const double rgb_max =
      std::max({d.real(p.color_r), d.real(p.color_g), d.real(p.color_b)});
  out.push_back({names[11], sanitize(rgb_max - 255.0)});

  return out;
}

ClosureFrameValidity::ClosureFrameValidity(const DesignSchema &schema, GeometryConfig cfg)
    : params_(BikeParams::resolve(schema)), cfg_(cfg) {}

double ClosureFrameValidity::classify(const Design &d) const {
  const FrameLayout f = solve_frame(d, params_, cfg_);
  if (!f.finite_inputs) return kInf;
  const double tau = cfg_.min_segment_mm;
  const BikeParams &p = params_;

  double worst = -kInf;
  auto require_at_least = [&](double length) { worst = std::max(worst, tau - length); };

  // Core tubes must have usable length.
  require_at_least(d.real(p.cs));
  require_at_least(d.real(p.seat_tube_length));
  require_at_least(d.real(p.head_tube_length));
  require_at_least(d.real(p.dt_length));
  // The junction segments that anchor the top and down tubes must exist.
  require_at_least(d.real(p.seat_tube_length) - d.real(p.seat_tube_ext));
  require_at_least(d.real(p.head_tube_length) - d.real(p.head_tube_upper_ext) -
                   d.real(p.head_tube_lower_ext));
  // The rear axle and head tube must be placeable; the margins stay finite
  // so descent methods keep a slope toward constructibility.
  if (!f.rear_ok)
    worst = std::max(worst, std::fabs(d.real(p.bb_drop)) - d.real(p.cs) + tau);
  if (!f.front_end_ok) {
    worst = std::max(worst, std::fabs(f.down_tube_junction.y) - d.real(p.dt_length) + tau);
  } else {
    // The top tube must run forward with usable length.
    require_at_least(f.top_tube_head_junction.x - f.top_tube_seat_junction.x);
    require_at_least(f.top_tube_length);
  }
  // Tube angles must leave the frame planar-solvable.
  const double sa = d.real(p.seat_angle) * kDegToRad;
  const double ha = d.real(p.head_angle) * kDegToRad;
  worst = std::max(worst, (0.05 - std::sin(sa)) * 1000.0);
  worst = std::max(worst, (0.05 - std::sin(ha)) * 1000.0);

  return sanitize(worst);
}

ConstraintValue frame_validity(const Design &design, const FrameValidityClassifier &classifier) {
  try {
    return {"frame_validity", sanitize(classifier.classify(design)), ""};
  } catch (const std::exception &e) {
    return {"frame_validity", kInf, e.what()};
  }
}

} // namespace velo
