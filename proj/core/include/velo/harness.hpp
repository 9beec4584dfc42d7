#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "velo/config.hpp"
#include "velo/csv.hpp"
#include "velo/design_space.hpp"
#include "velo/ergonomics.hpp"
#include "velo/geometry.hpp"
#include "velo/metrics.hpp"
#include "velo/optimize.hpp"
#include "velo/proxies.hpp"
#include "velo/scoring.hpp"

namespace velo {

/// Conditional context of an evaluation: rider anthropometry, use case with
/// its target ranges, target embedding and the opaque prompt text (consumed
/// only by external embedders).
struct Condition {
  RiderProfile rider;
  UseCase use_case;
  Embedding target_embedding;
  std::string prompt_text;
};

const std::array<std::string, kObjectiveCount> &objective_names();
const std::array<std::string, kConstraintCount> &constraint_names();

/// Canonical 10-objective / 15-constraint evaluation of one (design,
/// condition) pair. Failed evaluator families mark the report invalid,
/// name the failing criterion and leave large finite sentinels in their
/// entries so downstream arithmetic stays total.
struct EvaluationReport {
  std::array<double, kObjectiveCount> objectives{};
  std::array<double, kConstraintCount> constraints{};
  bool invalid = false;
  std::string failing;
  std::uint32_t proxy_mask = 0; // bit per family flagged as proxy

  bool feasible() const {
    for (double c : constraints)
      if (!(c <= 0.0)) return false;
    return true;
  }
};

/// Sentinel stored for criteria whose evaluator failed.
inline constexpr double kFailedEvalSentinel = 1e6;

/// The evaluator stack behind one benchmark run. Families are pluggable
/// behind their interfaces; the defaults are the analytic proxies.
class EvaluatorBundle {
public:
  EvaluatorBundle(const DesignSchema &schema, const EvalConfig &config);

  const DesignSchema &schema() const { return *schema_; }
  const EvalConfig &config() const { return *config_; }
  const ErgonomicsSolver &ergonomics() const { return *ergonomics_; }
  const Embedder &embedder() const { return *embedder_; }
  const FrameValidityClassifier &frame_classifier() const { return *frame_validity_; }

  void set_structural(std::unique_ptr<StructuralEvaluator> e) { structural_ = std::move(e); }
  void set_aero(std::unique_ptr<AeroEvaluator> e) { aero_ = std::move(e); }
  void set_usability(std::unique_ptr<UsabilityEvaluator> e) { usability_ = std::move(e); }
  void set_embedder(std::unique_ptr<Embedder> e) { embedder_ = std::move(e); }
  void set_frame_classifier(std::unique_ptr<FrameValidityClassifier> c) {
    frame_validity_ = std::move(c);
  }

  /// Provenance: names of families currently backed by proxies.
  std::vector<std::string> proxy_notes() const;

  friend EvaluationReport evaluate_design(const Design &, const Condition &,
                                          const EvaluatorBundle &, const Embedding *);

private:
  const DesignSchema *schema_;
  const EvalConfig *config_;
  BikeParams params_;
  std::unique_ptr<ErgonomicsSolver> ergonomics_;
  std::unique_ptr<StructuralEvaluator> structural_;
  std::unique_ptr<AeroEvaluator> aero_;
  std::unique_ptr<UsabilityEvaluator> usability_;
  std::unique_ptr<Embedder> embedder_;
  std::unique_ptr<FrameValidityClassifier> frame_validity_;
};

/// Full evaluation dispatch in canonical criterion order. A precomputed
/// embedding (external embedder contract) overrides the bundled one.
EvaluationReport evaluate_design(const Design &design, const Condition &condition,
                                 const EvaluatorBundle &bundle,
                                 const Embedding *precomputed_embedding = nullptr);

/// Seeded condition sampling: riders from the configured normal population
/// clamped at +-3 sigma, use case uniform over the three kinds, target
/// embeddings standard normal in the configured dimension.
std::vector<Condition> sample_conditions(std::size_t n, std::uint64_t seed,
                                         const EvalConfig &config);

/// Random selection from a dataset: without replacement when n does not
/// exceed the dataset size, with replacement otherwise. Deterministic per
/// seed.
std::vector<Design> dataset_baseline(const std::vector<Design> &dataset, std::size_t n,
                                     std::uint64_t seed);

/// Seeded synthetic stand-in for a real design dataset: uniform samples
/// accepted only when all 13 geometric checks pass.
std::vector<Design> pseudo_dataset(const EvaluatorBundle &bundle, std::size_t n,
                                   std::uint64_t seed);

/// Condition-file records mirror the benchmark's conditional fields.
std::vector<Condition> read_conditions_json(const std::string &path, const EvalConfig &config);
void write_conditions_json(const std::string &path, const std::vector<Condition> &conditions);

struct BenchmarkSeeds {
  std::uint64_t run = 0;       // generator randomness
  std::uint64_t condition = 0; // condition sampling
  std::uint64_t metric = 0;    // reference pairing + Monte Carlo streams
};

struct ConditionScore {
  std::size_t condition_index = 0;
  ScoreSummary score;
  std::size_t n_designs = 0;
  std::size_t n_feasible = 0;
  bool failed = false;
  std::string error;
};

struct BenchmarkRun {
  std::string mode; // unconditional | conditional
  std::string generator;
  std::string scale;
  BenchmarkSeeds seeds;
  std::vector<ConditionScore> per_condition;
  ScoreSummary aggregate;
  bool partial = false;
  std::vector<std::string> provenance;
};

/// A design source under benchmark. Unconditional generators ignore the
/// condition's content beyond what their fixed problem embeds; conditional
/// generators may react to it. generate() must be deterministic per seed.
class DesignGenerator {
public:
  virtual ~DesignGenerator() = default;
  virtual std::string name() const = 0;
  virtual bool supports_conditional() const = 0;
  virtual std::vector<Design> generate(const Condition &condition, std::size_t n,
                                       std::uint64_t seed) = 0;
};

/// Shared state for benchmark runs: dataset splits, calibrated weights and
/// the similarity reference.
class BenchmarkContext {
public:
  BenchmarkContext(const EvaluatorBundle &bundle, const ScaleConfig &scale,
                   BenchmarkSeeds seeds, std::vector<Design> dataset = {});

  const EvaluatorBundle &bundle() const { return *bundle_; }
  const ScaleConfig &scale_config() const { return scale_; }
  const BenchmarkSeeds &seeds() const { return seeds_; }
  const std::vector<Design> &train_split() const { return train_; }
  const std::vector<Design> &holdout_split() const { return holdout_; }
  const Weights &weights() const { return weights_; }
  const ReferencePoint &reference() const { return reference_; }

  /// Validity/optimality/similarity for an evaluated design set.
  ScoreSummary score_set(const std::vector<EvaluationReport> &reports,
                         const std::vector<Design> &designs, std::uint64_t hv_seed) const;

  /// Builds the optimization problem for one condition.
  Problem make_problem(const Condition &condition) const;

private:
  const EvaluatorBundle *bundle_;
  ScaleConfig scale_;
  BenchmarkSeeds seeds_;
  std::vector<Design> train_, holdout_;
  Weights weights_ = Weights::unit();
  ReferencePoint reference_;
  Standardizer standardizer_;
  std::vector<std::vector<double>> holdout_standardized_;
};

/// Unconditional protocol: a fixed number of seeded conditions, each
/// queried for up to samples_per_condition designs; per-condition scores
/// plus their mean. Generator failures are recorded and mark the run
/// partial.
BenchmarkRun run_unconditional(DesignGenerator &generator, const BenchmarkContext &context);

/// Conditional protocol: one design per seeded condition, scored as a
/// single pooled set with per-design conditions.
BenchmarkRun run_conditional(DesignGenerator &generator, const BenchmarkContext &context);

enum class ReportFormat { table, structured };

/// Renders a run: the table form for humans, the structured JSON form for
/// machines. Both carry identical metric values.
std::string render_report(const BenchmarkRun &run, ReportFormat format);

void save_run(const std::string &path, const BenchmarkRun &run);
BenchmarkRun load_run(const std::string &path);

/// Calibrates aggregation weights over a dataset paired with seeded
/// conditions (one per design).
Weights calibrate_weights_on_dataset(const EvaluatorBundle &bundle,
                                     const std::vector<Design> &dataset,
                                     std::uint64_t pairing_seed);

/// Built-in generators.
std::unique_ptr<DesignGenerator> make_baseline_generator(const std::vector<Design> &dataset);
std::unique_ptr<DesignGenerator> make_uniform_generator(const DesignSchema &schema);
std::unique_ptr<DesignGenerator> make_nsga2_generator(const BenchmarkContext &context,
                                                      Nsga2Config config);
std::unique_ptr<DesignGenerator> make_grad_generator(const BenchmarkContext &context,
                                                     GradConfig config);

} // namespace velo
