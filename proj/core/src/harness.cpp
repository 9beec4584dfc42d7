#include "velo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

namespace velo {

using nlohmann::json;
using nlohmann::ordered_json;

const std::array<std::string, kObjectiveCount> &objective_names() {
  static const std::array<std::string, kObjectiveCount> names = {
      "usability",
      "drag_force_n",
      "knee_angle_error_deg",
      "hip_angle_error_deg",
      "arm_angle_error_deg",
      "embedding_cosine_distance",
      "frame_mass_kg",
      "planar_compliance",
      "transverse_compliance",
      "eccentric_compliance",
  };
  return names;
}

const std::array<std::string, kConstraintCount> &constraint_names() {
  static const std::array<std::string, kConstraintCount> names = [] {
    std::array<std::string, kConstraintCount> n;
    n[0] = "planar_safety_factor";
    n[1] = "eccentric_safety_factor";
    const auto &geo = geometric_check_names();
    for (std::size_t i = 0; i < geo.size(); ++i) n[2 + i] = geo[i];
    n[14] = "frame_validity";
    return n;
  }();
  return names;
}

namespace {

enum ProxyBit : std::uint32_t {
  kProxyStructural = 1u << 0,
  kProxyAero = 1u << 1,
  kProxyUsability = 1u << 2,
  kProxyAesthetics = 1u << 3,
  kProxyFrameValidity = 1u << 4,
};

} // namespace

EvaluatorBundle::EvaluatorBundle(const DesignSchema &schema, const EvalConfig &config)
    : schema_(&schema), config_(&config), params_(BikeParams::resolve(schema)) {
  ErgonomicsConfig ergo_cfg = config.ergonomics;
  ergo_cfg.crank_length_mm = config.geometry.crank_length_mm;
  ergonomics_ = std::make_unique<ErgonomicsSolver>(schema, ergo_cfg, config.geometry);
  structural_ = std::make_unique<BeamStructuralProxy>(schema, config.materials, config.loads,
                                                      config.geometry);
  aero_ = std::make_unique<FrontalAreaAeroProxy>(*ergonomics_, config.aero);
  usability_ = std::make_unique<LogisticUsabilityProxy>(schema, config.usability);
  embedder_ =
      std::make_unique<LinearMapEmbedder>(schema, config.embedding_dim, config.embedding_map_seed);
  frame_validity_ = std::make_unique<ClosureFrameValidity>(schema, config.geometry);
}

std::vector<std::string> EvaluatorBundle::proxy_notes() const {
  std::vector<std::string> notes;
  auto note = [&](const char *family, const std::string &name, bool proxy) {
    if (proxy) notes.push_back(std::string(family) + "=" + name + " (substitute)");
  };
  note("structural", structural_->name(), structural_->is_proxy());
  note("aero", aero_->name(), aero_->is_proxy());
  note("usability", usability_->name(), usability_->is_proxy());
  note("aesthetics", embedder_->name(), embedder_->is_proxy());
  note("frame_validity", frame_validity_->name(), frame_validity_->is_proxy());
  return notes;
}

EvaluationReport evaluate_design(const Design &design, const Condition &condition,
                                 const EvaluatorBundle &bundle,
                                 const Embedding *precomputed_embedding) {
  EvaluationReport report;
  report.objectives.fill(kFailedEvalSentinel);
  report.constraints.fill(kFailedEvalSentinel);

  auto fail = [&](const char *criterion) {
    report.invalid = true;
    if (report.failing.empty()) report.failing = criterion;
  };

  // Usability (objective 0).
  if (bundle.usability_->is_proxy()) report.proxy_mask |= kProxyUsability;
  try {
    report.objectives[0] = bundle.usability_->usability_score(design);
  } catch (const std::exception &) {
    fail("usability");
  }

  // Ergonomic pipeline (objectives 2..4) and drag (objective 1).
  if (bundle.aero_->is_proxy()) report.proxy_mask |= kProxyAero;
  try {
    const InterfacePoints pts = bundle.ergonomics_->interface_points(design);
    const JointAngles angles = joint_angles(pts, condition.rider);
    const ErgonomicErrors errors =
        ergonomic_errors(angles, condition.use_case, bundle.ergonomics_->config());
    report.objectives[2] = errors.knee;
    report.objectives[3] = errors.hip;
    report.objectives[4] = errors.arm;
  } catch (const std::exception &) {
    fail("knee_angle_error_deg");
  }
  try {
    report.objectives[1] = bundle.aero_->drag_force(design, condition.rider);
  } catch (const std::exception &) {
    fail("drag_force_n");
  }

  // Aesthetics (objective 5).
  if (bundle.embedder_->is_proxy()) report.proxy_mask |= kProxyAesthetics;
  try {
    const Embedding e =
        precomputed_embedding ? *precomputed_embedding : bundle.embedder_->embed(design);
    report.objectives[5] = aesthetic_distance(e, condition.target_embedding);
  } catch (const std::exception &) {
    fail("embedding_cosine_distance");
  }

  // Structural family (objectives 6..9, constraints 0..1).
  if (bundle.structural_->is_proxy()) report.proxy_mask |= kProxyStructural;
  try {
    const StructuralReport s = bundle.structural_->structural_eval(design);
    report.objectives[6] = s.mass_kg;
    report.objectives[7] = s.planar_compliance;
    report.objectives[8] = s.transverse_compliance;
    report.objectives[9] = s.eccentric_compliance;
    report.constraints[0] = s.planar_sf_margin;
    report.constraints[1] = s.eccentric_sf_margin;
  } catch (const std::exception &) {
    fail("planar_safety_factor");
  }

  // Geometric checks (constraints 2..13) never throw.
  const std::vector<ConstraintValue> checks =
      geometric_checks(design, bundle.params_, bundle.config_->geometry);
  for (std::size_t i = 0; i < checks.size(); ++i) report.constraints[2 + i] = checks[i].value;

  // Frame validity (constraint 14).
  if (bundle.frame_validity_->is_proxy()) report.proxy_mask |= kProxyFrameValidity;
  const ConstraintValue fv = frame_validity(design, *bundle.frame_validity_);
  report.constraints[14] = fv.value;
  if (!fv.note.empty()) fail("frame_validity");

  return report;
}

std::vector<Condition> sample_conditions(std::size_t n, std::uint64_t seed,
                                         const EvalConfig &config) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> pick_case(0, 2);

  auto clamped_normal = [&](const RiderMoment &m) {
    const double raw = m.mean + m.std_dev * gauss(rng);
    const double lo = m.mean - 3.0 * m.std_dev;
    const double hi = m.mean + 3.0 * m.std_dev;
    return std::max(1.0, std::clamp(raw, lo, hi));
  };

  std::vector<Condition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Condition c;
    c.rider.upper_leg = clamped_normal(config.riders.upper_leg);
    c.rider.lower_leg = clamped_normal(config.riders.lower_leg);
    c.rider.arm = clamped_normal(config.riders.arm);
    c.rider.torso = clamped_normal(config.riders.torso);
    c.rider.neck_head = clamped_normal(config.riders.neck_head);
    c.rider.torso_width = clamped_normal(config.riders.torso_width);
    c.use_case = config.use_case(static_cast<UseCaseKind>(pick_case(rng)));
    std::vector<double> target(config.embedding_dim);
    for (double &v : target) v = gauss(rng);
    c.target_embedding = Embedding::from(std::move(target));
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Design> dataset_baseline(const std::vector<Design> &dataset, std::size_t n,
                                     std::uint64_t seed) {
  if (dataset.empty()) throw EvalError("dataset_baseline: empty dataset");
  std::mt19937_64 rng(seed);
  std::vector<Design> out;
  out.reserve(n);
  if (n > dataset.size()) {
    std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);
    for (std::size_t i = 0; i < n; ++i) out.push_back(dataset[pick(rng)]);
    return out;
  }
  // Partial Fisher-Yates gives the first n entries of a random permutation.
  std::vector<std::size_t> idx(dataset.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.push_back(dataset[idx[i]]);
  }
  return out;
}

std::vector<Design> pseudo_dataset(const EvaluatorBundle &bundle, std::size_t n,
                                   std::uint64_t seed) {
  const DesignSchema &schema = bundle.schema();
  const BikeParams params = BikeParams::resolve(schema);
  const GeometryConfig &geo = bundle.config().geometry;
  std::mt19937_64 rng(seed);
  std::vector<Design> out;
  out.reserve(n);
  const std::size_t max_attempts = std::max<std::size_t>(n, 1) * 20000;
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > max_attempts)
      throw EvalError("pseudo_dataset: rejection sampling failed to reach " + std::to_string(n) +
                      " accepted designs");
    Design d = sample_uniform(schema, rng());
    bool ok = true;
    for (const ConstraintValue &c : geometric_checks(d, params, geo))
      if (!c.satisfied()) { ok = false; break; }
    if (ok && frame_validity(d, bundle.frame_classifier()).satisfied()) out.push_back(std::move(d));
  }
  return out;
}

std::vector<Condition> read_conditions_json(const std::string &path, const EvalConfig &config) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open conditions file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception &e) {
    throw IoError(std::string("conditions parse failure: ") + e.what());
  }
  if (!doc.is_array()) throw IoError("conditions file must be a JSON array");

  std::vector<Condition> out;
  std::mt19937_64 fallback_rng(0);
  for (const json &entry : doc) {
    Condition c;
    const json &rider = entry.at("rider");
    c.rider.upper_leg = rider.at("upper_leg").get<double>();
    c.rider.lower_leg = rider.at("lower_leg").get<double>();
    c.rider.arm = rider.at("arm").get<double>();
    c.rider.torso = rider.at("torso").get<double>();
    c.rider.neck_head = rider.at("neck_head").get<double>();
    c.rider.torso_width = rider.at("torso_width").get<double>();
    if (!c.rider.valid()) throw IoError("conditions file: rider lengths must be positive");
    c.use_case = config.use_case(use_case_from_string(entry.at("use_case").get<std::string>()));
    c.prompt_text = entry.value("prompt_text", std::string());
    if (entry.contains("target_embedding")) {
      c.target_embedding = Embedding::from(entry["target_embedding"].get<std::vector<double>>());
    } else {
      std::mt19937_64 rng(entry.value("target_seed", 0ULL));
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<double> target(config.embedding_dim);
      for (double &v : target) v = gauss(rng);
      c.target_embedding = Embedding::from(std::move(target));
    }
    out.push_back(std::move(c));
  }
  return out;
}

void write_conditions_json(const std::string &path, const std::vector<Condition> &conditions) {
  ordered_json doc = json::array();
  for (const Condition &c : conditions) {
    ordered_json entry;
    entry["rider"] = {{"upper_leg", c.rider.upper_leg}, {"lower_leg", c.rider.lower_leg},
                      {"arm", c.rider.arm},             {"torso", c.rider.torso},
                      {"neck_head", c.rider.neck_head}, {"torso_width", c.rider.torso_width}};
    entry["use_case"] = to_string(c.use_case.kind);
    entry["prompt_text"] = c.prompt_text;
    entry["target_embedding"] = c.target_embedding.data;
    doc.push_back(std::move(entry));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write conditions file '" + path + "'");
  out << doc.dump(2) << "\n";
}

namespace {

std::vector<EvaluationReport> evaluate_set(const EvaluatorBundle &bundle,
                                           const std::vector<Design> &designs,
                                           const Condition &condition) {
  std::vector<EvaluationReport> reports(designs.size());
  parallel_for(designs.size(), [&](std::size_t i) {
    reports[i] = evaluate_design(designs[i], condition, bundle);
  });
  return reports;
}

} // namespace

Weights calibrate_weights_on_dataset(const EvaluatorBundle &bundle,
                                     const std::vector<Design> &dataset,
                                     std::uint64_t pairing_seed) {
  if (dataset.empty()) throw EvalError("calibrate_weights_on_dataset: empty dataset");
  const std::vector<Condition> conditions =
      sample_conditions(dataset.size(), pairing_seed, bundle.config());
  std::vector<std::vector<double>> obj_rows(dataset.size()), con_rows(dataset.size());
  parallel_for(dataset.size(), [&](std::size_t i) {
    const EvaluationReport r = evaluate_design(dataset[i], conditions[i], bundle);
    if (r.invalid) return; // left empty, filtered below
    obj_rows[i].assign(r.objectives.begin(), r.objectives.end());
    con_rows[i].assign(r.constraints.begin(), r.constraints.end());
  });
  std::vector<std::vector<double>> obj_kept, con_kept;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (obj_rows[i].empty()) continue;
    obj_kept.push_back(std::move(obj_rows[i]));
    con_kept.push_back(std::move(con_rows[i]));
  }
  return calibrate_weights(obj_kept, con_kept);
}

BenchmarkContext::BenchmarkContext(const EvaluatorBundle &bundle, const ScaleConfig &scale,
                                   BenchmarkSeeds seeds, std::vector<Design> dataset)
    : bundle_(&bundle), scale_(scale), seeds_(seeds) {
  std::vector<Design> all = std::move(dataset);
  if (all.empty())
    all = pseudo_dataset(bundle, scale.dataset_size, split_seed(seeds.metric, 1));
  if (all.size() <= scale.holdout_size)
    throw EvalError("benchmark dataset smaller than the holdout split");
  holdout_.assign(all.end() - static_cast<std::ptrdiff_t>(scale.holdout_size), all.end());
  train_.assign(all.begin(), all.end() - static_cast<std::ptrdiff_t>(scale.holdout_size));

  weights_ = calibrate_weights_on_dataset(bundle, train_, split_seed(seeds.metric, 2));

  // Reference point: worst objective per dimension over the dataset, each
  // design paired with a seeded random condition.
  const std::vector<Condition> ref_conditions =
      sample_conditions(train_.size(), split_seed(seeds.metric, 3), bundle.config());
  std::vector<std::vector<double>> obj_rows(train_.size());
  parallel_for(train_.size(), [&](std::size_t i) {
    const EvaluationReport r = evaluate_design(train_[i], ref_conditions[i], bundle);
    if (!r.invalid) obj_rows[i].assign(r.objectives.begin(), r.objectives.end());
  });
  std::vector<std::vector<double>> kept;
  for (auto &row : obj_rows)
    if (!row.empty()) kept.push_back(std::move(row));
  if (kept.empty()) throw EvalError("reference point: no evaluable dataset designs");
  reference_ = reference_point(kept);

  std::vector<std::vector<double>> holdout_encoded;
  holdout_encoded.reserve(holdout_.size());
  for (const Design &d : holdout_)
    holdout_encoded.push_back(encode_continuous(d, bundle.schema()));
  standardizer_ = Standardizer::fit(holdout_encoded);
  holdout_standardized_ = standardizer_.apply_all(holdout_encoded);
}

ScoreSummary BenchmarkContext::score_set(const std::vector<EvaluationReport> &reports,
                                         const std::vector<Design> &designs,
                                         std::uint64_t hv_seed) const {
  ScoreSummary summary;
  std::vector<std::vector<double>> constraint_rows;
  constraint_rows.reserve(reports.size());
  for (const EvaluationReport &r : reports)
    constraint_rows.emplace_back(r.constraints.begin(), r.constraints.end());
  summary.validity = validity_rate(constraint_rows);

  std::vector<ObjectivePoint> feasible_objectives;
  for (const EvaluationReport &r : reports)
    if (!r.invalid && r.feasible())
      feasible_objectives.emplace_back(r.objectives.begin(), r.objectives.end());
  const MetricsConfig &metrics = bundle_->config().metrics;
  summary.optimality = hypervolume(feasible_objectives, reference_, metrics.hv_mode,
                                   scale_.mc_samples, hv_seed);

  std::vector<std::vector<double>> encoded;
  encoded.reserve(designs.size());
  for (const Design &d : designs)
    encoded.push_back(standardizer_.apply(encode_continuous(d, bundle_->schema())));
  MmdOptions mmd_opts;
  mmd_opts.bandwidth = metrics.bandwidth;
  summary.similarity = mmd(encoded, holdout_standardized_, mmd_opts);
  return summary;
}

Problem BenchmarkContext::make_problem(const Condition &condition) const {
  Problem problem;
  problem.schema = &bundle_->schema();
  problem.weights = weights_;
  problem.penalty = bundle_->config().penalty;
  problem.condition_label = to_string(condition.use_case.kind);
  const EvaluatorBundle *bundle = bundle_;
  problem.evaluate = [bundle, condition](const Design &d, std::span<double> objs,
                                         std::span<double> cons) {
    const EvaluationReport r = evaluate_design(d, condition, *bundle);
    std::copy(r.objectives.begin(), r.objectives.end(), objs.begin());
    std::copy(r.constraints.begin(), r.constraints.end(), cons.begin());
  };
  return problem;
}

namespace {

ScoreSummary mean_score(const std::vector<ConditionScore> &scores) {
  ScoreSummary mean;
  std::size_t counted = 0;
  for (const ConditionScore &cs : scores) {
    if (cs.failed) continue;
    mean.validity += cs.score.validity;
    mean.optimality += cs.score.optimality;
    mean.similarity += cs.score.similarity;
    ++counted;
  }
  if (counted > 0) {
    mean.validity /= static_cast<double>(counted);
    mean.optimality /= static_cast<double>(counted);
    mean.similarity /= static_cast<double>(counted);
  }
  return mean;
}

std::size_t count_feasible(const std::vector<EvaluationReport> &reports) {
  std::size_t n = 0;
  for (const EvaluationReport &r : reports)
    if (r.feasible()) ++n;
  return n;
}

} // namespace

BenchmarkRun run_unconditional(DesignGenerator &generator, const BenchmarkContext &context) {
  BenchmarkRun run;
  run.mode = "unconditional";
  run.generator = generator.name();
  run.seeds = context.seeds();
  run.provenance = context.bundle().proxy_notes();

  const ScaleConfig &scale = context.scale_config();
  const std::vector<Condition> conditions = sample_conditions(
      scale.unconditional_conditions, context.seeds().condition, context.bundle().config());

  for (std::size_t i = 0; i < conditions.size(); ++i) {
    ConditionScore cs;
    cs.condition_index = i;
    try {
      std::vector<Design> designs = generator.generate(
          conditions[i], scale.samples_per_condition, split_seed(context.seeds().run, i));
      if (designs.empty()) throw EvalError("generator produced no designs");
      const std::vector<EvaluationReport> reports =
          evaluate_set(context.bundle(), designs, conditions[i]);
      cs.n_designs = designs.size();
      cs.n_feasible = count_feasible(reports);
      cs.score = context.score_set(reports, designs, split_seed(context.seeds().metric, 100 + i));
    } catch (const std::exception &e) {
      cs.failed = true;
      cs.error = e.what();
      run.partial = true;
    }
    run.per_condition.push_back(std::move(cs));
  }
  run.aggregate = mean_score(run.per_condition);
  return run;
}

BenchmarkRun run_conditional(DesignGenerator &generator, const BenchmarkContext &context) {
  BenchmarkRun run;
  run.mode = "conditional";
  run.generator = generator.name();
  run.seeds = context.seeds();
  run.provenance = context.bundle().proxy_notes();

  const ScaleConfig &scale = context.scale_config();
  const std::vector<Condition> conditions = sample_conditions(
      scale.conditional_cases, context.seeds().condition, context.bundle().config());

  std::vector<Design> designs;
  std::vector<std::size_t> design_condition;
  designs.reserve(conditions.size());
  std::size_t failures = 0;
  std::string first_error;
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    try {
      std::vector<Design> got =
          generator.generate(conditions[i], 1, split_seed(context.seeds().run, i));
      if (got.empty()) throw EvalError("generator produced no design");
      designs.push_back(std::move(got.front()));
      design_condition.push_back(i);
    } catch (const std::exception &e) {
      ++failures;
      if (first_error.empty()) first_error = e.what();
      run.partial = true;
    }
  }
  if (designs.empty()) {
    ConditionScore cs;
    cs.failed = true;
    cs.error = first_error.empty() ? "no designs generated" : first_error;
    run.per_condition.push_back(std::move(cs));
    return run;
  }

  std::vector<EvaluationReport> reports(designs.size());
  parallel_for(designs.size(), [&](std::size_t i) {
    reports[i] = evaluate_design(designs[i], conditions[design_condition[i]], context.bundle());
  });

  ConditionScore pooled;
  pooled.condition_index = 0;
  pooled.n_designs = designs.size();
  pooled.n_feasible = count_feasible(reports);
  pooled.score = context.score_set(reports, designs, split_seed(context.seeds().metric, 999));
  if (failures > 0)
    pooled.error = std::to_string(failures) + " condition(s) failed; first: " + first_error;
  run.per_condition.push_back(std::move(pooled));
  run.aggregate = run.per_condition.front().score;
  return run;
}

namespace {

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

ordered_json run_to_json(const BenchmarkRun &run) {
  ordered_json doc;
  doc["mode"] = run.mode;
  doc["generator"] = run.generator;
  doc["scale"] = run.scale;
  doc["seeds"] = {{"run", run.seeds.run},
                  {"condition", run.seeds.condition},
                  {"metric", run.seeds.metric}};
  doc["partial"] = run.partial;
  ordered_json rows = json::array();
  for (const ConditionScore &cs : run.per_condition) {
    ordered_json row;
    row["condition_index"] = cs.condition_index;
    row["validity"] = cs.score.validity;
    row["optimality"] = cs.score.optimality;
    row["similarity"] = cs.score.similarity;
    row["n_designs"] = cs.n_designs;
    row["n_feasible"] = cs.n_feasible;
    row["failed"] = cs.failed;
    row["error"] = cs.error;
    rows.push_back(std::move(row));
  }
  doc["per_condition"] = rows;
  doc["aggregate"] = {{"validity", run.aggregate.validity},
                      {"optimality", run.aggregate.optimality},
                      {"similarity", run.aggregate.similarity}};
  doc["provenance"] = run.provenance;
  return doc;
}

} // namespace

std::string render_report(const BenchmarkRun &run, ReportFormat format) {
  if (format == ReportFormat::structured) return run_to_json(run).dump(2) + "\n";

  std::ostringstream out;
  out << "benchmark: mode=" << run.mode << " scale=" << run.scale << " seeds(run=" << run.seeds.run
      << " condition=" << run.seeds.condition << " metric=" << run.seeds.metric << ")\n";
  if (run.partial) out << "PARTIAL RUN: at least one condition failed\n";
  out << "\n";
  out << "generator        validity (up)   optimality (up)   similarity (down)\n";
  out << run.generator;
  for (std::size_t pad = run.generator.size(); pad < 17; ++pad) out << ' ';
  out << format_percent(run.aggregate.validity) << "          " << format_metric(run.aggregate.optimality)
      << "            " << format_metric(run.aggregate.similarity) << "\n\n";
  out << "per-condition:\n";
  for (const ConditionScore &cs : run.per_condition) {
    out << "  [" << cs.condition_index << "] ";
    if (cs.failed) {
      out << "FAILED: " << cs.error << "\n";
      continue;
    }
    out << "validity=" << format_percent(cs.score.validity)
        << " optimality=" << format_metric(cs.score.optimality)
        << " similarity=" << format_metric(cs.score.similarity) << " designs=" << cs.n_designs
        << " feasible=" << cs.n_feasible;
    if (!cs.error.empty()) out << "  note: " << cs.error;
    out << "\n";
  }
  if (!run.provenance.empty()) {
    out << "\nevaluator provenance:\n";
    for (const std::string &p : run.provenance) out << "  " << p << "\n";
  }
  return out.str();
}

void save_run(const std::string &path, const BenchmarkRun &run) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write run file '" + path + "'");
  out << run_to_json(run).dump(2) << "\n";
}

BenchmarkRun load_run(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open run file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception &e) {
    throw IoError(std::string("run file parse failure: ") + e.what());
  }
  BenchmarkRun run;
  run.mode = doc.value("mode", "");
  run.generator = doc.value("generator", "");
  run.scale = doc.value("scale", "");
  run.seeds.run = doc["seeds"].value("run", 0ULL);
  run.seeds.condition = doc["seeds"].value("condition", 0ULL);
  run.seeds.metric = doc["seeds"].value("metric", 0ULL);
  run.partial = doc.value("partial", false);
  for (const json &row : doc.value("per_condition", json::array())) {
    ConditionScore cs;
    cs.condition_index = row.value("condition_index", 0ULL);
    cs.score.validity = row.value("validity", 0.0);
    cs.score.optimality = row.value("optimality", 0.0);
    cs.score.similarity = row.value("similarity", 0.0);
    cs.n_designs = row.value("n_designs", 0ULL);
    cs.n_feasible = row.value("n_feasible", 0ULL);
    cs.failed = row.value("failed", false);
    cs.error = row.value("error", "");
    run.per_condition.push_back(std::move(cs));
  }
  run.aggregate.validity = doc["aggregate"].value("validity", 0.0);
  run.aggregate.optimality = doc["aggregate"].value("optimality", 0.0);
  run.aggregate.similarity = doc["aggregate"].value("similarity", 0.0);
  run.provenance = doc.value("provenance", std::vector<std::string>{});
  return run;
}

namespace {

class BaselineGenerator : public DesignGenerator {
public:
  explicit BaselineGenerator(const std::vector<Design> &dataset) : dataset_(&dataset) {}
  std::string name() const override { return "baseline"; }
  bool supports_conditional() const override { return true; }
  std::vector<Design> generate(const Condition &, std::size_t n, std::uint64_t seed) override {
    return dataset_baseline(*dataset_, n, seed);
  }

private:
  const std::vector<Design> *dataset_;
};

class UniformGenerator : public DesignGenerator {
public:
  explicit UniformGenerator(const DesignSchema &schema) : schema_(&schema) {}
  std::string name() const override { return "uniform"; }
  bool supports_conditional() const override { return true; }
  std::vector<Design> generate(const Condition &, std::size_t n, std::uint64_t seed) override {
    return sample_uniform(*schema_, n, seed);
  }

private:
  const DesignSchema *schema_;
};

class Nsga2Generator : public DesignGenerator {
public:
  Nsga2Generator(const BenchmarkContext &context, Nsga2Config config)
      : context_(&context), config_(std::move(config)) {}
  std::string name() const override { return "nsga2"; }
  bool supports_conditional() const override { return false; }
  std::vector<Design> generate(const Condition &condition, std::size_t n,
                               std::uint64_t seed) override {
    Nsga2Config cfg = config_;
    cfg.seed = seed;
    if (cfg.population > n) cfg.population = n - n % 2; // final set must fit the query
    const Problem problem = context_->make_problem(condition);
    const Population pop = nsga2(problem, cfg);
    std::vector<Design> out;
    out.reserve(pop.members.size());
    for (const Member &m : pop.members) out.push_back(m.design);
    return out;
  }

private:
  const BenchmarkContext *context_;
  Nsga2Config config_;
};

class GradGenerator : public DesignGenerator {
public:
  GradGenerator(const BenchmarkContext &context, GradConfig config)
      : context_(&context), config_(config) {}
  std::string name() const override { return "grad"; }
  bool supports_conditional() const override { return false; }
  std::vector<Design> generate(const Condition &condition, std::size_t n,
                               std::uint64_t seed) override {
    GradConfig cfg = config_;
    cfg.seed = seed;
    if (cfg.starts > n) cfg.starts = n;
    const Problem problem = context_->make_problem(condition);
    return grad_penalty_descent(problem, cfg);
  }

private:
  const BenchmarkContext *context_;
  GradConfig config_;
};

} // namespace

std::unique_ptr<DesignGenerator> make_baseline_generator(const std::vector<Design> &dataset) {
  return std::make_unique<BaselineGenerator>(dataset);
}

std::unique_ptr<DesignGenerator> make_uniform_generator(const DesignSchema &schema) {
  return std::make_unique<UniformGenerator>(schema);
}

std::unique_ptr<DesignGenerator> make_nsga2_generator(const BenchmarkContext &context,
                                                      Nsga2Config config) {
  return std::make_unique<Nsga2Generator>(context, std::move(config));
}

std::unique_ptr<DesignGenerator> make_grad_generator(const BenchmarkContext &context,
                                                     GradConfig config) {
  return std::make_unique<GradGenerator>(context, config);
}

} // namespace velo
