#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "velo/common.hpp"
#include "velo/design_space.hpp"

namespace velo {

/// Signed constraint margin: satisfied exactly when value <= 0. Units are
/// those of the underlying quantity (mm for clearances, intensity for the
/// RGB bound).
struct ConstraintValue {
  std::string name;
  double value = 0.0;
  std::string note; // diagnostic, set on evaluator failure
  bool satisfied() const { return value <= 0.0; }
};

struct GeometryConfig {
  double crank_length_mm = 172.5; // crank length is not a design parameter
  double min_segment_mm = 1.0;    // shortest admissible derived tube segment
};

/// Cached indices of the design parameters the geometric evaluators use.
struct BikeParams {
  std::size_t cs, bb_drop, stack, head_angle, head_tube_length, seat_stay_junction,
      seat_tube_length, seat_angle, dt_length, fork_offset, ttd, csd, ssd, dtd,
      head_tube_upper_ext, seat_tube_ext, head_tube_lower_ext, wall_tt, wall_ht, wall_dt,
      wall_cs, wall_ss, wall_st, wheel_diameter_front, wheel_diameter_rear, head_tube_diameter,
      seat_tube_diameter, saddle_height, seatpost_length, color_r, color_g, color_b, material,
      handlebar_style, stem_kind, front_fender, rear_fender, rack, aerobars;
  std::vector<std::size_t> strictly_positive; // schema-flagged parameter set

  static BikeParams resolve(const DesignSchema &schema);
};

/// Planar frame layout solved from a design, bottom bracket at the origin,
/// x forward, y up. `front_end_ok` is false when the head tube cannot be
/// placed (down tube too short to reach its junction height); positions
/// depending on it are then meaningless.
struct FrameLayout {
  Vec2 rear_axle;
  Vec2 head_tube_top;
  Vec2 head_tube_bottom;
  Vec2 down_tube_junction;  // on the head tube
  Vec2 top_tube_head_junction;
  Vec2 top_tube_seat_junction;
  Vec2 seat_tube_top;
  Vec2 seat_stay_junction;  // on the seat tube
  Vec2 front_axle;
  double seat_stay_length = 0.0;
  double top_tube_length = 0.0;
  double ground_y = 0.0;
  bool rear_ok = false;     // rear axle placeable (CS reaches past BB drop)
  bool front_end_ok = false;
  bool finite_inputs = false;
};

FrameLayout solve_frame(const Design &design, const BikeParams &p,
                        const GeometryConfig &cfg = {});

inline constexpr std::size_t kGeometricCheckCount = 12;

/// Stable identifiers of the 12 closed-form checks, in report order.
const std::array<std::string, kGeometricCheckCount> &geometric_check_names();

/// Evaluates the 12 closed-form geometric feasibility checks. Margins are
/// signed (<= 0 satisfied); non-finite inputs make the affected checks
/// +infinity (violated). Never throws.
std::vector<ConstraintValue> geometric_checks(const Design &design, const DesignSchema &schema,
                                              const GeometryConfig &cfg = {});
std::vector<ConstraintValue> geometric_checks(const Design &design, const BikeParams &p,
                                              const GeometryConfig &cfg);

/// Pluggable frame-validity predictor. Implementations must be
/// deterministic and safe for concurrent read-only use.
class FrameValidityClassifier {
public:
  virtual ~FrameValidityClassifier() = default;
  /// Signed margin, <= 0 when the frame is sound.
  virtual double classify(const Design &design) const = 0;
  virtual std::string name() const = 0;
  virtual bool is_proxy() const { return true; }
};

/// Default predictor: frame-closure proxy. The seat-tube / top-tube /
/// head-tube / down-tube quadrilateral must close with every derived
/// segment at least min_segment_mm long and the top tube running forward.
/// Returns the worst violation margin.
class ClosureFrameValidity : public FrameValidityClassifier {
public:
  ClosureFrameValidity(const DesignSchema &schema, GeometryConfig cfg = {});
  double classify(const Design &design) const override;
  std::string name() const override { return "frame-closure-proxy"; }

private:
  BikeParams params_;
  GeometryConfig cfg_;
};

/// Runs the supplied classifier; classifier failures surface as a violated
/// constraint carrying the diagnostic.
ConstraintValue frame_validity(const Design &design, const FrameValidityClassifier &classifier);

} // namespace velo
