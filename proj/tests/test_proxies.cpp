#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "velo/proxies.hpp"

using namespace velo;
using velo::testing::bike_schema;
using velo::testing::reference_design;

TEST_CASE("tube shell mass matches the area formula") {
  // pi/4 * (30^2 - 28^2) * 500 mm^3 of steel.
  CHECK(std::fabs(tube_shell_mass_kg(30.0, 1.0, 500.0, 7850.0) - 0.358) < 0.001);

  // Independent algebraic route: pi * t * (d - t) * L.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dia(10.0, 80.0), wall(0.5, 4.0), len(100.0, 900.0);
  for (int i = 0; i < 20; ++i) {
    const double d = dia(rng), t = wall(rng), L = len(rng);
    const double expected = kPi * t * (d - t) * L * 1e-9 * 7850.0;
    CHECK(tube_shell_mass_kg(d, t, L, 7850.0) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("degenerate tubes are rejected") {
  CHECK_THROWS_AS(tube_shell_mass_kg(30.0, 15.0, 500.0, 7850.0), EvalError);
  CHECK_THROWS_AS(tube_shell_mass_kg(30.0, 16.0, 500.0, 7850.0), EvalError);
  CHECK_THROWS_AS(tube_shell_mass_kg(30.0, 0.0, 500.0, 7850.0), EvalError);
}

TEST_CASE("thicker walls mean more mass and less compliance") {
  const DesignSchema &s = bike_schema();
  const BeamStructuralProxy proxy(s);
  Design d = reference_design();
  const StructuralReport before = proxy.structural_eval(d);
  CHECK(before.mass_kg > 0.0);

  for (const char *name : {"Wall thickness Top tube", "Wall thickness Head tube",
                           "Wall thickness Down tube", "Wall thickness Chain stay",
                           "Wall thickness Seat stay", "Wall thickness Seat tube"})
    d.set_raw(s.index_of(name), d.real(s.index_of(name)) * 2.0);

  const StructuralReport after = proxy.structural_eval(d);
  CHECK(after.mass_kg > before.mass_kg);
  CHECK(after.planar_compliance < before.planar_compliance);
  CHECK(after.transverse_compliance < before.transverse_compliance);
  CHECK(after.eccentric_compliance < before.eccentric_compliance);
  // Stiffer sections also improve the safety margins.
  CHECK(after.planar_sf_margin < before.planar_sf_margin);
  CHECK(after.eccentric_sf_margin < before.eccentric_sf_margin);
}

TEST_CASE("non-isotropic materials evaluate with steel properties") {
  const DesignSchema &s = bike_schema();
  const BeamStructuralProxy proxy(s);
  Design steel = reference_design();
  Design carbon = steel;
  carbon.set_raw(s.index_of("MATERIAL"),
                 static_cast<double>(s.category_index(s.index_of("MATERIAL"), "CARBON")));
  Design bamboo = steel;
  bamboo.set_raw(s.index_of("MATERIAL"),
                 static_cast<double>(s.category_index(s.index_of("MATERIAL"), "BAMBOO")));
  Design titanium = steel;
  titanium.set_raw(s.index_of("MATERIAL"),
                   static_cast<double>(s.category_index(s.index_of("MATERIAL"), "TITANIUM")));

  const StructuralReport r_steel = proxy.structural_eval(steel);
  const StructuralReport r_carbon = proxy.structural_eval(carbon);
  const StructuralReport r_bamboo = proxy.structural_eval(bamboo);
  const StructuralReport r_ti = proxy.structural_eval(titanium);
  CHECK(r_carbon.mass_kg == r_steel.mass_kg);
  CHECK(r_carbon.planar_compliance == r_steel.planar_compliance);
  CHECK(r_bamboo.mass_kg == r_steel.mass_kg);
  CHECK(r_ti.mass_kg != r_steel.mass_kg);

  const MaterialTable table = MaterialTable::defaults();
  CHECK(table.lookup("CARBON").density_kgm3 == table.lookup("STEEL").density_kgm3);
  CHECK(table.lookup("OTHER").yield_mpa == table.lookup("STEEL").yield_mpa);
}

TEST_CASE("drag follows the quadratic law in frontal area") {
  const ErgonomicsSolver solver(bike_schema());
  const FrontalAreaAeroProxy aero(solver);
  CHECK(std::fabs(aero.drag_from_area(0.5) - 27.56) < 0.01);
  CHECK(aero.drag_from_area(1.0) == doctest::Approx(2.0 * aero.drag_from_area(0.5)));
}

TEST_CASE("flatter torsos incur less drag") {
  // Two grip heights and torso/arm pairs chosen so the torso goes from
  // upright to nearly horizontal.
  RiderProfile rider;
  rider.torso = 500.0;
  rider.arm = 500.0;

  InterfacePoints upright;
  upright.saddle = {0.0, 700.0};
  upright.grip = {350.0, 1000.0};
  upright.pedal_far = {40.0, -168.0};

  InterfacePoints flat;
  flat.saddle = {0.0, 700.0};
  flat.grip = {995.0, 700.0};
  flat.pedal_far = {40.0, -168.0};

  const double upright_angle = joint_angles(upright, rider).torso_angle_deg;
  const double flat_angle = joint_angles(flat, rider).torso_angle_deg;
  CHECK(flat_angle < upright_angle);

  const ErgonomicsSolver solver(bike_schema());
  const FrontalAreaAeroProxy aero(solver);
  const AeroConfig cfg;
  auto drag_for_angle = [&](double deg) {
    const double area =
        rider.torso_width * 1e-3 * rider.torso * 1e-3 * std::sin(deg * kDegToRad);
    return aero.drag_from_area(area + cfg.limbs_head_area_m2);
  };
  CHECK(drag_for_angle(flat_angle) < drag_for_angle(upright_angle));
}

TEST_CASE("usability scores stay in [0,1] and are deterministic") {
  const DesignSchema &s = bike_schema();
  const LogisticUsabilityProxy proxy(s);
  for (const Design &d : sample_uniform(s, 10'000, 99)) {
    const double v = proxy.usability_score(d);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  const Design d = reference_design();
  CHECK(proxy.usability_score(d) == proxy.usability_score(d));
}

TEST_CASE("the rack flag shifts the logit by its fixed weight") {
  const DesignSchema &s = bike_schema();
  const UsabilityWeights weights;
  const LogisticUsabilityProxy proxy(s, weights);
  const std::size_t rack = s.index_of("Display RACK");
  for (int i = 0; i < 20; ++i) {
    Design with = sample_uniform(s, 300 + i);
    Design without = with;
    with.set_raw(rack, 1.0);
    without.set_raw(rack, 0.0);
    CHECK(proxy.logit(with) - proxy.logit(without) == doctest::Approx(weights.rack));
  }
}

TEST_CASE("default embedder is deterministic, fixed-dimension and linear") {
  const DesignSchema &s = bike_schema();
  const LinearMapEmbedder embedder(s, 64, 0x5eed);
  const Design d = reference_design();

  const Embedding e1 = embed_design(d, embedder);
  const Embedding e2 = embed_design(d, embedder);
  REQUIRE(e1.data.size() == 64);
  CHECK(e1.data == e2.data);

  // Shifting one bounded parameter moves the embedding along a fixed
  // direction: difference vectors are collinear.
  const std::size_t stack = s.index_of("Stack");
  Design d1 = d, d2 = d;
  d1.set_raw(stack, d.real(stack) + 40.0);
  d2.set_raw(stack, d.real(stack) + 80.0);
  const Embedding b = embed_design(d, embedder);
  const Embedding s1 = embed_design(d1, embedder);
  const Embedding s2 = embed_design(d2, embedder);
  for (std::size_t i = 0; i < b.data.size(); ++i) {
    const double step1 = s1.data[i] - b.data[i];
    const double step2 = s2.data[i] - b.data[i];
    CHECK(step2 == doctest::Approx(2.0 * step1).epsilon(1e-9));
  }
}

TEST_CASE("cosine distance spans [0, 2]") {
  const Embedding a = Embedding::from({1.0, 0.0, 0.0});
  const Embedding minus_a = Embedding::from({-1.0, 0.0, 0.0});
  const Embedding orth = Embedding::from({0.0, 2.0, 0.0});
  CHECK(aesthetic_distance(a, a) == doctest::Approx(0.0));
  CHECK(aesthetic_distance(a, minus_a) == doctest::Approx(2.0));
  CHECK(aesthetic_distance(a, orth) == doctest::Approx(1.0));
  CHECK_THROWS_AS(aesthetic_distance(a, Embedding::from({0.0, 0.0, 0.0})), EvalError);
}
