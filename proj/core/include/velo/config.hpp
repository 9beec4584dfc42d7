#pragma once

#include <cstdint>
#include <string>

#include "velo/ergonomics.hpp"
#include "velo/geometry.hpp"
#include "velo/metrics.hpp"
#include "velo/optimize.hpp"
#include "velo/proxies.hpp"
#include "velo/scoring.hpp"

namespace velo {

struct RiderMoment {
  double mean = 0.0;
  double std_dev = 1.0;
};

/// Independent normal population model for the six rider lengths, clamped
/// at three standard deviations when sampled.
struct RiderPopulation {
  RiderMoment upper_leg{450.0, 40.0};
  RiderMoment lower_leg{435.0, 40.0};
  RiderMoment arm{580.0, 50.0};
  RiderMoment torso{510.0, 45.0};
  RiderMoment neck_head{240.0, 25.0};
  RiderMoment torso_width{390.0, 40.0};
};

struct MetricsConfig {
  HypervolumeMode hv_mode = HypervolumeMode::montecarlo;
  std::size_t mc_samples = 200'000;
  double bandwidth = 0.0; // <= 0 selects the median heuristic
};

/// Benchmark sizing knobs per scale.
struct ScaleConfig {
  std::size_t dataset_size = 1200;     // pseudo-dataset total
  std::size_t holdout_size = 400;      // similarity reference split
  std::size_t samples_per_condition = 1000;
  std::size_t unconditional_conditions = 10;
  std::size_t conditional_cases = 1000;
  std::size_t mc_samples = 200'000;
};

/// One structured file covering the schema path, evaluator parameters,
/// metric settings and optimizer hyperparameters.
struct EvalConfig {
  std::string schema_path; // empty selects the bundled schema
  GeometryConfig geometry;
  ErgonomicsConfig ergonomics;
  UseCase use_case_road = default_use_case(UseCaseKind::road);
  UseCase use_case_mountain = default_use_case(UseCaseKind::mountain);
  UseCase use_case_commuting = default_use_case(UseCaseKind::commuting);
  MaterialTable materials = MaterialTable::defaults();
  StructuralLoads loads;
  AeroConfig aero;
  UsabilityWeights usability;
  std::size_t embedding_dim = 512;
  std::uint64_t embedding_map_seed = 0x5eed;
  RiderPopulation riders;
  PenaltyParams penalty;
  MetricsConfig metrics;
  Nsga2Config nsga2;
  GradConfig grad;
  ScaleConfig desk;
  ScaleConfig full{4500, 900, 1000, 10, 10'000, 1'000'000};

  const UseCase &use_case(UseCaseKind kind) const {
    switch (kind) {
    case UseCaseKind::road: return use_case_road;
    case UseCaseKind::mountain: return use_case_mountain;
    default: return use_case_commuting;
    }
  }
  const ScaleConfig &scale(const std::string &name) const;
};

EvalConfig default_config();
/// Loads a config JSON; absent keys keep their defaults.
EvalConfig load_config(const std::string &path);
void save_config(const std::string &path, const EvalConfig &config);
std::string bundled_config_path();

} // namespace velo
