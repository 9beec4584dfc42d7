#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "velo/common.hpp"
#include "velo/design_space.hpp"

namespace velo {

/// One point in objective space, minimization convention.
using ObjectivePoint = std::vector<double>;

/// Per-objective worst values bounding the hypervolume computation.
using ReferencePoint = std::vector<double>;

/// The three benchmark scores for one design set.
struct ScoreSummary {
  double validity = 0.0;   // fraction in [0, 1]
  double optimality = 0.0; // normalized hypervolume in [0, 1]
  double similarity = 0.0; // MMD >= 0
};

enum class HypervolumeMode { exact, montecarlo };

/// Hypervolume of the region dominated by `points` within the box bounded
/// by `ref`, normalized so the result lies in [0, 1]. Dimensions with a
/// non-positive or non-finite reference coordinate are dropped; points not
/// strictly better than the reference in every kept dimension are
/// excluded. Exact mode uses inclusion-exclusion (intended for small sets
/// and tests); montecarlo is deterministic per seed.
double hypervolume(const std::vector<ObjectivePoint> &points, const ReferencePoint &ref,
                   HypervolumeMode mode = HypervolumeMode::montecarlo,
                   std::size_t mc_samples = 1'000'000, std::uint64_t seed = 0);

/// Coordinate-wise maximum of the given objective vectors.
ReferencePoint reference_point(const std::vector<ObjectivePoint> &objective_rows);

/// Fraction of reports whose 15 margins are all <= 0. Implemented over raw
/// constraint rows so any report representation can feed it.
double validity_rate(const std::vector<std::vector<double>> &constraint_rows);

struct MmdOptions {
  double bandwidth = 0.0; // <= 0 selects the median-distance heuristic
};

/// Biased squared-MMD estimator with a Gaussian kernel, returned as
/// sqrt(max(0, MMD^2)). Inputs are expected to be standardized by the
/// caller. Bandwidth auto = median pairwise distance over the pooled set;
/// a zero median requires an explicit bandwidth and raises EvalError
/// otherwise.
double mmd(const std::vector<std::vector<double>> &set_a,
           const std::vector<std::vector<double>> &set_b, const MmdOptions &options = {});

enum class ConsensusLabel { usable, unusable, unlabeled };

struct RatingTally {
  std::uint32_t yes = 0;
  std::uint32_t total = 0;
};

/// Binomial consensus rule: mean >= 0.7 usable, <= 0.3 unusable, else
/// unlabeled. Totals must be positive.
std::vector<ConsensusLabel> consensus_labels(const std::vector<RatingTally> &ratings);

/// Per-dimension mean/std standardization helper used before MMD. A zero
/// std is floored to keep the transform total.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std_dev;

  static Standardizer fit(const std::vector<std::vector<double>> &rows);
  std::vector<double> apply(const std::vector<double> &row) const;
  std::vector<std::vector<double>> apply_all(const std::vector<std::vector<double>> &rows) const;
};

} // namespace velo
