#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "velo/ergonomics.hpp"

using namespace velo;
using velo::testing::bike_schema;
using velo::testing::reference_design;

TEST_CASE("saddle position follows saddle height and seat angle") {
  const DesignSchema &s = bike_schema();
  const ErgonomicsSolver solver(s);
  Design d = reference_design();
  d.set_raw(s.index_of("Saddle height"), 700.0);

  SUBCASE("vertical seat tube") {
    d.set_raw(s.index_of("Seat angle"), 90.0);
    const InterfacePoints pts = solver.interface_points(d);
    CHECK(pts.saddle.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(pts.saddle.y == doctest::Approx(700.0));
  }
  SUBCASE("73 degree seat tube") {
    d.set_raw(s.index_of("Seat angle"), 73.0);
    const InterfacePoints pts = solver.interface_points(d);
    CHECK(std::fabs(pts.saddle.x - (-214.0)) < 0.5);
    CHECK(pts.saddle.y == doctest::Approx(700.0));
  }
  SUBCASE("degenerate seat angles error out") {
    d.set_raw(s.index_of("Seat angle"), 0.0);
    CHECK_THROWS_AS(solver.interface_points(d), EvalError);
    d.set_raw(s.index_of("Seat angle"), 180.0);
    CHECK_THROWS_AS(solver.interface_points(d), EvalError);
  }
}

TEST_CASE("pedal at full extension sits one crank past the bottom bracket") {
  const ErgonomicsSolver solver(bike_schema());
  const InterfacePoints pts = solver.interface_points(reference_design());
  const double saddle_to_pedal = distance(pts.saddle, pts.pedal_far);
  CHECK(saddle_to_pedal == doctest::Approx(pts.saddle.norm() + 172.5));
}

TEST_CASE("knee angle follows the law of cosines") {
  RiderProfile rider;
  rider.upper_leg = 450.0;
  rider.lower_leg = 450.0;

  InterfacePoints pts;
  pts.saddle = {0.0, 700.0};
  pts.grip = {500.0, 700.0};

  SUBCASE("collinear limb at exactly the leg sum") {
    pts.pedal_far = {0.0, 700.0 - 900.0};
    const JointAngles a = joint_angles(pts, rider);
    CHECK(a.knee == 180.0);
    CHECK(a.incompatible);
    CHECK(a.reach_deficit_mm == doctest::Approx(0.0));
  }
  SUBCASE("right angle at 450*sqrt(2)") {
    pts.pedal_far = {0.0, 700.0 - 450.0 * std::numbers::sqrt2};
    const JointAngles a = joint_angles(pts, rider);
    CHECK(std::fabs(a.knee - 90.0) < 0.01);
    CHECK_FALSE(a.incompatible);
  }
  SUBCASE("past the leg sum sets the flag and deficit") {
    pts.pedal_far = {0.0, 700.0 - 950.0};
    const JointAngles a = joint_angles(pts, rider);
    CHECK(a.knee == 180.0);
    CHECK(a.incompatible);
    CHECK(a.reach_deficit_mm == doctest::Approx(50.0));
  }
}

TEST_CASE("angles stay within [0, 180]") {
  RiderProfile rider;
  InterfacePoints pts;
  pts.saddle = {-200.0, 650.0};
  for (double gx = -100.0; gx <= 900.0; gx += 100.0) {
    pts.grip = {gx, 550.0};
    pts.pedal_far = {50.0, -150.0};
    const JointAngles a = joint_angles(pts, rider);
    CHECK(a.knee >= 0.0);
    CHECK(a.knee <= 180.0);
    CHECK(a.hip >= 0.0);
    CHECK(a.hip <= 180.0);
    CHECK(a.arm >= 0.0);
    CHECK(a.arm <= 180.0);
  }
}

TEST_CASE("ergonomic errors measure distance to the target range") {
  const UseCase road = default_use_case(UseCaseKind::road); // knee [140, 150]
  JointAngles angles;
  angles.hip = 60.0;
  angles.arm = 90.0;

  angles.knee = 145.0;
  CHECK(ergonomic_errors(angles, road).knee == doctest::Approx(0.0));
  angles.knee = 135.0;
  CHECK(ergonomic_errors(angles, road).knee == doctest::Approx(5.0));
  angles.knee = 156.0;
  CHECK(ergonomic_errors(angles, road).knee == doctest::Approx(6.0));
}

TEST_CASE("incompatible riders receive at least the fixed penalty on every joint") {
  const UseCase road = default_use_case(UseCaseKind::road);
  const ErgonomicsConfig cfg;
  JointAngles angles;
  angles.knee = 145.0;
  angles.hip = 60.0;
  angles.arm = 90.0;
  angles.incompatible = true;
  angles.reach_deficit_mm = 80.0;
  const ErgonomicErrors err = ergonomic_errors(angles, road, cfg);
  const double penalty = cfg.incompatibility_penalty_deg + cfg.penalty_deg_per_mm * 80.0;
  CHECK(err.knee >= cfg.incompatibility_penalty_deg);
  CHECK(err.hip >= cfg.incompatibility_penalty_deg);
  CHECK(err.arm >= cfg.incompatibility_penalty_deg);
  CHECK(err.knee == doctest::Approx(penalty));
}

TEST_CASE("mountain and commuting targets widen the road ranges") {
  const UseCase road = default_use_case(UseCaseKind::road);
  const UseCase mtb = default_use_case(UseCaseKind::mountain);
  CHECK(mtb.knee.lo == road.knee.lo - 10.0);
  CHECK(mtb.knee.hi == road.knee.hi + 10.0);
}

TEST_CASE("arm error grows monotonically once the grip is past the far bound") {
  RiderProfile rider;
  const UseCase road = default_use_case(UseCaseKind::road);
  InterfacePoints pts;
  pts.saddle = {0.0, 700.0};
  pts.pedal_far = {40.0, -168.0};

  double prev_err = -1.0;
  bool outside = false;
  for (double step = 0.0; step <= 600.0; step += 25.0) {
    pts.grip = Vec2{420.0 + step, 560.0 - 0.1 * step};
    const JointAngles a = joint_angles(pts, rider);
    const double err = ergonomic_errors(a, road).arm;
    if (outside) CHECK(err >= prev_err - 1e-9);
    if (a.arm > road.arm.hi) outside = true;
    prev_err = err;
  }
  CHECK(outside); // the sweep did cross the far bound
}
