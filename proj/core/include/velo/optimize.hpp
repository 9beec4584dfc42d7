#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "velo/design_space.hpp"
#include "velo/metrics.hpp"
#include "velo/scoring.hpp"

namespace velo {

/// Optimization problem over a design schema with a fixed condition bound
/// into the evaluate closure (optimization is unconditional-only). The
/// closure fills raw objective and constraint values; weights normalize
/// them for violation sums, penalties and the scalar aggregate.
struct Problem {
  const DesignSchema *schema = nullptr;
  std::size_t n_objectives = kObjectiveCount;
  std::size_t n_constraints = kConstraintCount;
  Weights weights = Weights::unit();
  PenaltyParams penalty{};
  std::function<void(const Design &, std::span<double>, std::span<double>)> evaluate;
  std::string condition_label;
};

struct Member {
  Design design;
  std::vector<double> objectives;
  std::vector<double> constraints;
  double violation = 0.0; // sum of positive weighted margins
  double aggregate = 0.0; // scalar quality, lower is better
  bool feasible() const { return violation <= 0.0; }
};

struct Population {
  std::vector<Member> members;
  std::size_t generation = 0;
  std::uint64_t seed = 0;
};

/// Constraint-domination non-dominated sort: feasible beats infeasible,
/// infeasible order by total violation, feasible order by Pareto
/// dominance. Returns index fronts partitioning the input in rank order.
std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<ObjectivePoint> &points,
                                                        const std::vector<double> &violations);

/// NSGA-II crowding distance within one front: boundary points per
/// objective get +infinity, interior points normalized neighbor-gap sums.
std::vector<double> crowding_distance(const std::vector<ObjectivePoint> &front);

struct Nsga2Config {
  std::size_t population = 100; // must be even
  std::size_t generations = 200;
  double crossover_rate = 0.9;
  double sbx_eta = 15.0;
  double mutation_eta = 20.0;
  double mutation_rate = -1.0; // < 0 selects 1/n_parameters
  std::uint64_t seed = 0;
  /// Invoked after every generation (checkpointing, telemetry).
  std::function<void(const Population &)> on_generation;
  /// Resume support: start from this population at this generation instead
  /// of a fresh uniform sample. Variation randomness is derived from
  /// (seed, generation), so a resumed run reproduces the uninterrupted one
  /// exactly.
  std::vector<Design> initial_population;
  std::size_t initial_generation = 0;
};

/// Mixed-variable NSGA-II: SBX and polynomial mutation on continuous and
/// integer parameters, uniform crossover and flip mutation on booleans and
/// categoricals, binary tournament on (rank, crowding), elitist (mu+lambda)
/// survival under constraint domination. Deterministic per seed. The best
/// feasible aggregate score never worsens across generations: the incumbent
/// is reinserted if survival selection would drop it.
Population nsga2(const Problem &problem, const Nsga2Config &config);

/// Box-constrained continuous minimization target. evaluate fills
/// already-normalized objective and constraint values for a point inside
/// the box.
struct BoxObjective {
  std::size_t dim = 0;
  std::vector<double> lower, upper;
  std::size_t n_objectives = 0;
  std::size_t n_constraints = 0;
  std::function<void(std::span<const double>, std::span<double>, std::span<double>)> evaluate;
};

struct GradConfig {
  std::size_t starts = 20;
  std::size_t steps = 100;
  double learning_rate = 0.2; // in box-normalized coordinates
  double penalty_weight = 1000.0;
  double fd_step = 1e-4; // central-difference step, box-normalized
  double armijo_c = 1e-4;
  std::size_t max_backtracks = 40;
  std::uint64_t seed = 0;
  /// Loss trace: invoked with the start loss (step 0) and after every
  /// accepted step. May run concurrently across chains.
  std::function<void(std::size_t chain, std::size_t step, double loss)> on_step;
};

struct GradResult {
  std::vector<std::vector<double>> points; // box coordinates, one per start
  std::vector<double> losses;
  std::size_t restarts = 0; // chains restarted after non-finite loss
};

/// Aggregate penalty descent: minimizes
///   sum(objectives) + penalty_weight * sum(max(0, constraints)^2)
/// by projected gradient descent with central finite differences and a
/// backtracking line search (loss is non-increasing along each chain).
/// Chains hitting a non-finite loss restart from a fresh seeded point.
GradResult grad_penalty_descent(const BoxObjective &objective, const GradConfig &config);

/// Bike-level wrapper: runs the descent on the one-hot relaxation of the
/// problem (weights applied, categorical/boolean slots relaxed to [0,1])
/// and decodes the final points.
std::vector<Design> grad_penalty_descent(const Problem &problem, const GradConfig &config);

/// Evaluates a design under the problem and fills a Member, including its
/// violation sum and aggregate score.
Member evaluate_member(const Problem &problem, Design design);

} // namespace velo
