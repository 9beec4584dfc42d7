#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "velo/harness.hpp"

namespace fs = std::filesystem;
using namespace velo;

namespace {

EvalConfig load_cli_config(const std::string &config_path) {
  return load_config(config_path.empty() ? bundled_config_path() : config_path);
}

DesignSchema load_cli_schema(const EvalConfig &config) {
  return load_schema(config.schema_path.empty() ? bundled_schema_path() : config.schema_path);
}

void write_reports_csv(const std::string &path, const std::vector<EvaluationReport> &reports) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "index";
  for (const auto &n : objective_names()) out << ',' << n;
  for (const auto &n : constraint_names()) out << ',' << n;
  out << ",feasible,invalid,failing\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const EvaluationReport &r = reports[i];
    out << i;
    for (double v : r.objectives) out << ',' << format_double(v);
    for (double v : r.constraints) out << ',' << format_double(v);
    out << ',' << (r.feasible() ? "true" : "false") << ',' << (r.invalid ? "true" : "false") << ','
        << r.failing << '\n';
  }
}

void write_reports_json(const std::string &path, const std::vector<EvaluationReport> &reports) {
  nlohmann::ordered_json doc = nlohmann::json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const EvaluationReport &r = reports[i];
    nlohmann::ordered_json row;
    row["index"] = i;
    for (std::size_t k = 0; k < kObjectiveCount; ++k)
      row["objectives"][objective_names()[k]] = r.objectives[k];
    for (std::size_t k = 0; k < kConstraintCount; ++k)
      row["constraints"][constraint_names()[k]] = r.constraints[k];
    row["feasible"] = r.feasible();
    row["invalid"] = r.invalid;
    row["failing"] = r.failing;
    doc.push_back(std::move(row));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
}

int cmd_evaluate(const std::string &config_path, const std::string &designs_path,
                 const std::string &conditions_path, const std::string &out_path,
                 const std::string &embeddings_path) {
  const EvalConfig config = load_cli_config(config_path);
  const DesignSchema schema = load_cli_schema(config);
  const EvaluatorBundle bundle(schema, config);

  const std::vector<Design> designs = read_designs_csv(designs_path, schema);
  const std::vector<Condition> conditions = read_conditions_json(conditions_path, config);
  if (designs.empty()) throw IoError("no designs to evaluate");
  if (conditions.size() != 1 && conditions.size() != designs.size())
    throw IoError("conditions file must hold one record or one per design row (got " +
                  std::to_string(conditions.size()) + " for " + std::to_string(designs.size()) +
                  " designs)");

  std::vector<Embedding> embeddings;
  if (!embeddings_path.empty()) {
    embeddings = read_embeddings_csv(embeddings_path);
    if (embeddings.size() != designs.size())
      throw IoError("embeddings CSV must carry one row per design");
  }

  std::vector<EvaluationReport> reports(designs.size());
  parallel_for(designs.size(), [&](std::size_t i) {
    const Condition &c = conditions.size() == 1 ? conditions.front() : conditions[i];
    const Embedding *pre = embeddings.empty() ? nullptr : &embeddings[i];
    reports[i] = evaluate_design(designs[i], c, bundle, pre);
  });

  if (out_path.ends_with(".json")) write_reports_json(out_path, reports);
  else write_reports_csv(out_path, reports);

  std::size_t feasible = 0;
  for (const auto &r : reports)
    if (r.feasible()) ++feasible;
  std::printf("evaluated %zu designs; %zu feasible (%.2f%%); report written to %s\n",
              designs.size(), feasible, 100.0 * feasible / designs.size(), out_path.c_str());
  return 0;
}

struct CheckpointWriter {
  fs::path dir;
  const DesignSchema *schema;
  std::size_t every = 0;
  std::uint64_t seed = 0;

  void operator()(const Population &pop) const {
    if (every == 0 || pop.generation % every != 0) return;
    char name[64];
    std::snprintf(name, sizeof(name), "checkpoint_gen%04zu", pop.generation);
    const fs::path csv = dir / (std::string(name) + ".csv");
    std::vector<Design> designs;
    designs.reserve(pop.members.size());
    for (const Member &m : pop.members) designs.push_back(m.design);
    write_designs_csv(csv.string(), designs, *schema);

    nlohmann::ordered_json meta;
    meta["generation"] = pop.generation;
    meta["seed"] = seed;
    meta["population_csv"] = csv.filename().string();
    meta["population"] = pop.members.size();
    std::ofstream out(dir / (std::string(name) + ".json"));
    out << meta.dump(2) << "\n";
  }
};

int cmd_optimize(const std::string &config_path, const std::string &algo, std::uint64_t seed,
                 const std::string &out_dir, const std::string &condition_file,
                 std::uint64_t condition_seed, std::size_t checkpoint_every,
                 const std::string &resume_path) {
  const EvalConfig config = load_cli_config(config_path);
  const DesignSchema schema = load_cli_schema(config);
  const EvaluatorBundle bundle(schema, config);
  fs::create_directories(out_dir);

  const BenchmarkContext context(bundle, config.desk,
                                 BenchmarkSeeds{seed, condition_seed, condition_seed});
  Condition condition;
  if (!condition_file.empty()) {
    const auto conditions = read_conditions_json(condition_file, config);
    if (conditions.empty()) throw IoError("condition file is empty");
    condition = conditions.front();
  } else {
    condition = sample_conditions(1, condition_seed, config).front();
  }
  const Problem problem = context.make_problem(condition);
  save_weights((fs::path(out_dir) / "weights.json").string(), context.weights(),
               split_seed(condition_seed, 2));

  std::vector<Design> finals;
  std::size_t generations_done = 0;
  if (algo == "nsga2") {
    Nsga2Config cfg = config.nsga2;
    cfg.seed = seed;
    if (!resume_path.empty()) {
      std::ifstream in(resume_path);
      if (!in) throw IoError("cannot open resume checkpoint '" + resume_path + "'");
      nlohmann::json meta;
      in >> meta;
      cfg.initial_generation = meta.at("generation").get<std::size_t>();
      cfg.seed = meta.at("seed").get<std::uint64_t>();
      const fs::path csv = fs::path(resume_path).parent_path() /
                           meta.at("population_csv").get<std::string>();
      cfg.initial_population = read_designs_csv(csv.string(), schema);
    }
    cfg.on_generation = CheckpointWriter{fs::path(out_dir), &schema, checkpoint_every, cfg.seed};
    const Population pop = nsga2(problem, cfg);
    for (const Member &m : pop.members) finals.push_back(m.design);
    generations_done = pop.generation;
  } else if (algo == "grad") {
    GradConfig cfg = config.grad;
    cfg.seed = seed;
    finals = grad_penalty_descent(problem, cfg);
  } else {
    throw IoError("unknown algorithm '" + algo + "' (expected nsga2 or grad)");
  }

  const fs::path final_csv = fs::path(out_dir) / "final_population.csv";
  write_designs_csv(final_csv.string(), finals, schema);

  std::size_t feasible = 0;
  double best_aggregate = std::numeric_limits<double>::infinity();
  for (const Design &d : finals) {
    const Member m = evaluate_member(problem, d);
    if (m.feasible()) {
      ++feasible;
      best_aggregate = std::min(best_aggregate, m.aggregate);
    }
  }
  nlohmann::ordered_json meta;
  meta["algorithm"] = algo;
  meta["seed"] = seed;
  meta["condition_seed"] = condition_seed;
  meta["designs"] = finals.size();
  meta["feasible"] = feasible;
  meta["generations"] = generations_done;
  meta["best_feasible_aggregate"] =
      std::isfinite(best_aggregate) ? nlohmann::json(best_aggregate) : nlohmann::json();
  std::ofstream meta_out(fs::path(out_dir) / "final_meta.json");
  meta_out << meta.dump(2) << "\n";

  std::printf("%s: %zu designs (%zu feasible) written to %s\n", algo.c_str(), finals.size(),
              feasible, final_csv.string().c_str());
  return 0;
}

int cmd_benchmark(const std::string &config_path, const std::string &mode,
                  const std::string &generator_name, const std::string &scale_name,
                  std::uint64_t seed, const std::string &out_path, const std::string &dataset_path,
                  const std::string &format) {
  const EvalConfig config = load_cli_config(config_path);
  const DesignSchema schema = load_cli_schema(config);
  const EvaluatorBundle bundle(schema, config);
  const ScaleConfig &scale = config.scale(scale_name);

  std::vector<Design> dataset;
  if (!dataset_path.empty()) dataset = read_designs_csv(dataset_path, schema);

  const BenchmarkSeeds seeds{seed, seed, seed};
  const BenchmarkContext context(bundle, scale, seeds, std::move(dataset));

  std::unique_ptr<DesignGenerator> generator;
  if (generator_name == "baseline") generator = make_baseline_generator(context.train_split());
  else if (generator_name == "uniform") generator = make_uniform_generator(schema);
  else if (generator_name == "nsga2") generator = make_nsga2_generator(context, config.nsga2);
  else if (generator_name == "grad") generator = make_grad_generator(context, config.grad);
  else throw IoError("unknown generator '" + generator_name + "'");

  BenchmarkRun run;
  if (mode == "unconditional") {
    run = run_unconditional(*generator, context);
  } else if (mode == "conditional") {
    if (!generator->supports_conditional())
      throw IoError("generator '" + generator_name + "' only supports the unconditional mode");
    run = run_conditional(*generator, context);
  } else {
    throw IoError("unknown mode '" + mode + "' (expected unconditional or conditional)");
  }
  run.scale = scale_name;

  if (!out_path.empty()) save_run(out_path, run);
  const ReportFormat fmt = format == "structured" ? ReportFormat::structured : ReportFormat::table;
  std::cout << render_report(run, fmt);
  return run.partial ? 2 : 0;
}

int cmd_report(const std::string &run_path, const std::string &format) {
  const BenchmarkRun run = load_run(run_path);
  const ReportFormat fmt = format == "structured" ? ReportFormat::structured : ReportFormat::table;
  std::cout << render_report(run, fmt);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"velobench: evaluation, scoring and optimization benchmark for parametric "
               "bicycle designs"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "Config JSON (defaults to the bundled one)");

  auto *evaluate = app.add_subcommand("evaluate", "Evaluate designs against conditions");
  std::string designs_path, conditions_path, out_path, embeddings_path;
  evaluate->add_option("--designs", designs_path, "Design CSV")->required();
  evaluate->add_option("--conditions", conditions_path, "Conditions JSON")->required();
  evaluate->add_option("--out", out_path, "Output report (.csv or .json)")->required();
  evaluate->add_option("--embeddings", embeddings_path,
                       "Precomputed embeddings CSV (one row per design)");

  auto *optimize = app.add_subcommand("optimize", "Run an optimization baseline");
  std::string algo = "nsga2", opt_out = "opt_out", condition_file, resume_path;
  std::uint64_t opt_seed = 0, condition_seed = 0;
  std::size_t checkpoint_every = 50;
  optimize->add_option("--algo", algo, "nsga2 | grad")->required();
  optimize->add_option("--seed", opt_seed, "Optimizer seed")->required();
  optimize->add_option("--out", opt_out, "Output directory");
  optimize->add_option("--condition-file", condition_file, "Condition JSON (first record used)");
  optimize->add_option("--condition-seed", condition_seed, "Seed for the sampled condition");
  optimize->add_option("--checkpoint-every", checkpoint_every,
                       "Write a checkpoint every N generations (0 disables)");
  optimize->add_option("--resume", resume_path, "Resume from a checkpoint meta JSON");

  auto *benchmark = app.add_subcommand("benchmark", "Run the benchmark protocol");
  std::string mode = "unconditional", generator = "baseline", scale = "desk", bench_out,
              dataset_path, bench_format = "table";
  std::uint64_t bench_seed = 0;
  benchmark->add_option("--mode", mode, "unconditional | conditional")->required();
  benchmark->add_option("--generator", generator, "baseline | uniform | nsga2 | grad")->required();
  benchmark->add_option("--scale", scale, "desk | full");
  benchmark->add_option("--seed", bench_seed, "Run seed (drives every stream)");
  benchmark->add_option("--out", bench_out, "Structured run JSON output path");
  benchmark->add_option("--dataset", dataset_path, "External design dataset CSV");
  benchmark->add_option("--format", bench_format, "table | structured");

  auto *report = app.add_subcommand("report", "Render a stored benchmark run");
  std::string run_path, report_format = "table";
  report->add_option("--run", run_path, "Run JSON produced by benchmark --out")->required();
  report->add_option("--format", report_format, "table | structured");

  CLI11_PARSE(app, argc, argv);

  try {
    if (evaluate->parsed())
      return cmd_evaluate(config_path, designs_path, conditions_path, out_path, embeddings_path);
    if (optimize->parsed())
      return cmd_optimize(config_path, algo, opt_seed, opt_out, condition_file, condition_seed,
                          checkpoint_every, resume_path);
    if (benchmark->parsed())
      return cmd_benchmark(config_path, mode, generator, scale, bench_seed, bench_out,
                           dataset_path, bench_format);
    if (report->parsed()) return cmd_report(run_path, report_format);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
