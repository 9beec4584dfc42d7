#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "velo/common.hpp"

namespace velo {

inline constexpr std::size_t kObjectiveCount = 10;
inline constexpr std::size_t kConstraintCount = 15;

/// Per-criterion normalization weights, strictly positive.
struct Weights {
  std::vector<double> objectives;  // size kObjectiveCount
  std::vector<double> constraints; // size kConstraintCount

  static Weights unit();
};

struct PenaltyParams {
  double alpha = 10.0;
  double beta = 10.0;
};

/// Nonlinear constraint penalty: exponential decay on the satisfied side,
/// linear growth on the violated side, with matching value and first
/// derivative at the boundary.
///   g(x) = alpha * exp(beta x) / beta  for x <= 0
///   g(x) = alpha * (x + 1/beta)        for x >= 0
double penalty_g(double x, const PenaltyParams &p = {});

/// Scalar aggregate score, lower is better:
///   s = sum o_i / w_o[i] + sum g(c_i / w_c[i]).
/// Non-finite inputs propagate to a non-finite result.
double aggregate_quality(std::span<const double> objectives, std::span<const double> constraints,
                         const Weights &w, const PenaltyParams &p = {});

/// Calibrates weights as the mean absolute criterion values over a dataset
/// paired with one condition per design; zero means are floored.
/// Implemented over precomputed criterion matrices so any evaluator stack
/// can feed it.
Weights calibrate_weights(const std::vector<std::vector<double>> &objective_rows,
                          const std::vector<std::vector<double>> &constraint_rows);

/// Weight persistence: JSON with the pairing seed used for calibration.
void save_weights(const std::string &path, const Weights &w, std::uint64_t pairing_seed);
Weights load_weights(const std::string &path, std::uint64_t *pairing_seed = nullptr);

} // namespace velo
