#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "velo/scoring.hpp"

using namespace velo;

TEST_CASE("penalty function hits its anchor values") {
  const PenaltyParams p; // alpha = beta = 10
  CHECK(penalty_g(0.0, p) == doctest::Approx(1.0));
  CHECK(penalty_g(0.5, p) == doctest::Approx(6.0));
  CHECK(penalty_g(-0.1, p) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("penalty function is C1 at the constraint boundary") {
  const PenaltyParams p;
  for (double eps : {1e-3, 1e-6}) {
    CHECK(std::fabs(penalty_g(eps, p) - penalty_g(-eps, p)) <= 2.0 * p.alpha * eps + 1e-9);
    const double right = (penalty_g(eps, p) - penalty_g(0.0, p)) / eps;
    const double left = (penalty_g(0.0, p) - penalty_g(-eps, p)) / eps;
    CHECK(right == doctest::Approx(p.alpha).epsilon(1e-2));
    CHECK(left == doctest::Approx(p.alpha).epsilon(1e-2));
  }
}

TEST_CASE("penalty function is positive, strictly increasing and decays to zero") {
  const PenaltyParams p;
  double prev = penalty_g(-5.0, p);
  CHECK(prev > 0.0);
  for (double x = -4.9; x <= 5.0; x += 0.1) {
    const double v = penalty_g(x, p);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(penalty_g(-10.0, p) < 1e-40);
}

TEST_CASE("weight calibration averages absolute criterion values") {
  // Three rows: objective column constant 3: weight 3. Constraint column
  // alternating -1/+1: weight 1.
  std::vector<std::vector<double>> objs = {{3.0}, {3.0}, {3.0}, {3.0}};
  std::vector<std::vector<double>> cons = {{-1.0}, {1.0}, {-1.0}, {1.0}};
  const Weights w = calibrate_weights(objs, cons);
  CHECK(w.objectives[0] == doctest::Approx(3.0));
  CHECK(w.constraints[0] == doctest::Approx(1.0));
}

TEST_CASE("all-zero criterion columns are floored, not divided by") {
  std::vector<std::vector<double>> objs = {{0.0}, {0.0}};
  std::vector<std::vector<double>> cons = {{0.0}, {0.0}};
  const Weights w = calibrate_weights(objs, cons);
  CHECK(w.objectives[0] > 0.0);
  CHECK(w.constraints[0] > 0.0);
  CHECK(std::isfinite(1.0 / w.objectives[0]));
  CHECK_THROWS_AS(calibrate_weights({}, {}), EvalError);
}

TEST_CASE("aggregate quality matches the hand-computed example") {
  // Unit weights, all objectives zero, one constraint at +1, the other 14
  // at the boundary: s = g(1) + 14 * g(0) = 11 + 14.
  const Weights w = Weights::unit();
  std::vector<double> objectives(kObjectiveCount, 0.0);
  std::vector<double> constraints(kConstraintCount, 0.0);
  constraints[0] = 1.0;
  CHECK(aggregate_quality(objectives, constraints, w) == doctest::Approx(25.0));
}

TEST_CASE("deeply satisfied constraints contribute almost nothing") {
  const Weights w = Weights::unit();
  std::vector<double> objectives(kObjectiveCount, 0.0);
  const double shallow =
      aggregate_quality(objectives, std::vector<double>(kConstraintCount, -1.0), w);
  const double deep =
      aggregate_quality(objectives, std::vector<double>(kConstraintCount, -2.0), w);
  CHECK(deep > 0.0);
  CHECK(deep < 1e-6);
  CHECK(deep < shallow); // the reward for margin keeps shrinking toward 0+
}

TEST_CASE("aggregate is invariant to matched objective/weight rescaling") {
  Weights w = Weights::unit();
  std::vector<double> objectives(kObjectiveCount, 2.0);
  std::vector<double> constraints(kConstraintCount, -0.5);
  const double base = aggregate_quality(objectives, constraints, w);
  objectives[3] *= 7.5;
  w.objectives[3] *= 7.5;
  CHECK(aggregate_quality(objectives, constraints, w) == doctest::Approx(base));
}

TEST_CASE("aggregate is monotone in every criterion") {
  const Weights w = Weights::unit();
  std::vector<double> objectives(kObjectiveCount, 1.0);
  std::vector<double> constraints(kConstraintCount, -0.2);
  const double base = aggregate_quality(objectives, constraints, w);
  for (std::size_t i = 0; i < kObjectiveCount; ++i) {
    auto bumped = objectives;
    bumped[i] += 0.3;
    CHECK(aggregate_quality(bumped, constraints, w) > base);
  }
  for (std::size_t i = 0; i < kConstraintCount; ++i) {
    auto bumped = constraints;
    bumped[i] += 0.3;
    CHECK(aggregate_quality(objectives, bumped, w) > base);
  }
}

TEST_CASE("non-finite inputs flag the aggregate") {
  const Weights w = Weights::unit();
  std::vector<double> objectives(kObjectiveCount, 0.0);
  std::vector<double> constraints(kConstraintCount, 0.0);
  objectives[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK(std::isnan(aggregate_quality(objectives, constraints, w)));
}

TEST_CASE("weights persist with their pairing seed") {
  Weights w = Weights::unit();
  w.objectives[2] = 17.25;
  w.constraints[9] = 0.125;
  const std::string path =
      (std::filesystem::temp_directory_path() / "velo_weights_test.json").string();
  save_weights(path, w, 1234);
  std::uint64_t seed = 0;
  const Weights back = load_weights(path, &seed);
  CHECK(seed == 1234);
  CHECK(back.objectives == w.objectives);
  CHECK(back.constraints == w.constraints);
  std::filesystem::remove(path);
}
