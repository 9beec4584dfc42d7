#include "velo/config.hpp"

#include <fstream>

#include <json.hpp>

namespace velo {

using nlohmann::json;
using nlohmann::ordered_json;

const ScaleConfig &EvalConfig::scale(const std::string &name) const {
  if (name == "desk") return desk;
  if (name == "full") return full;
  throw IoError("unknown scale '" + name + "' (expected desk or full)");
}

EvalConfig default_config() { return EvalConfig{}; }

namespace {

void read_range(const json &j, const char *key, AngleRange &range) {
  if (!j.contains(key)) return;
  const auto &arr = j.at(key);
  range.lo = arr.at(0).get<double>();
  range.hi = arr.at(1).get<double>();
  if (!(range.lo < range.hi))
    throw IoError(std::string("use-case range '") + key + "' must have lo < hi");
}

void read_use_case(const json &j, const char *key, UseCase &uc) {
  if (!j.contains(key)) return;
  const json &block = j.at(key);
  read_range(block, "knee", uc.knee);
  read_range(block, "hip", uc.hip);
  read_range(block, "arm", uc.arm);
}

void read_moment(const json &j, const char *key, RiderMoment &m) {
  if (!j.contains(key)) return;
  const auto &arr = j.at(key);
  m.mean = arr.at(0).get<double>();
  m.std_dev = arr.at(1).get<double>();
}

void read_vec2(const json &arr, Vec2 &v) {
  v.x = arr.at(0).get<double>();
  v.y = arr.at(1).get<double>();
}

void read_scale(const json &j, const char *key, ScaleConfig &s) {
  if (!j.contains(key)) return;
  const json &b = j.at(key);
  s.dataset_size = b.value("dataset_size", s.dataset_size);
  s.holdout_size = b.value("holdout_size", s.holdout_size);
  s.samples_per_condition = b.value("samples_per_condition", s.samples_per_condition);
  s.unconditional_conditions = b.value("unconditional_conditions", s.unconditional_conditions);
  s.conditional_cases = b.value("conditional_cases", s.conditional_cases);
  s.mc_samples = b.value("mc_samples", s.mc_samples);
}

} // namespace

EvalConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception &e) {
    throw IoError(std::string("config parse failure: ") + e.what());
  }

  EvalConfig cfg;
  cfg.schema_path = doc.value("schema_path", std::string());

  if (doc.contains("geometry")) {
    const json &g = doc["geometry"];
    cfg.geometry.crank_length_mm = g.value("crank_length_mm", cfg.geometry.crank_length_mm);
    cfg.geometry.min_segment_mm = g.value("min_segment_mm", cfg.geometry.min_segment_mm);
    cfg.ergonomics.crank_length_mm = cfg.geometry.crank_length_mm;
  }

  if (doc.contains("ergonomics")) {
    const json &e = doc["ergonomics"];
    cfg.ergonomics.incompatibility_penalty_deg =
        e.value("incompatibility_penalty_deg", cfg.ergonomics.incompatibility_penalty_deg);
    cfg.ergonomics.penalty_deg_per_mm =
        e.value("penalty_deg_per_mm", cfg.ergonomics.penalty_deg_per_mm);
    if (e.contains("stem_offsets_mm"))
      for (std::size_t i = 0; i < cfg.ergonomics.stem_offsets.size(); ++i)
        read_vec2(e["stem_offsets_mm"].at(i), cfg.ergonomics.stem_offsets[i]);
    if (e.contains("bar_offsets_mm"))
      for (std::size_t i = 0; i < cfg.ergonomics.bar_offsets.size(); ++i)
        read_vec2(e["bar_offsets_mm"].at(i), cfg.ergonomics.bar_offsets[i]);
    read_use_case(e, "road", cfg.use_case_road);
    read_use_case(e, "mountain", cfg.use_case_mountain);
    read_use_case(e, "commuting", cfg.use_case_commuting);
  }

  if (doc.contains("materials")) {
    for (const auto &[label, value] : doc["materials"].items()) {
      if (value.is_string()) {
        cfg.materials.alias(label, value.get<std::string>());
      } else {
        MaterialProperties props;
        props.density_kgm3 = value.value("density_kgm3", props.density_kgm3);
        props.modulus_mpa = value.value("modulus_mpa", props.modulus_mpa);
        props.yield_mpa = value.value("yield_mpa", props.yield_mpa);
        cfg.materials.set(label, props);
      }
    }
  }

  if (doc.contains("loads")) {
    const json &l = doc["loads"];
    cfg.loads.planar_n = l.value("planar_n", cfg.loads.planar_n);
    cfg.loads.eccentric_n = l.value("eccentric_n", cfg.loads.eccentric_n);
    cfg.loads.eccentric_amplification =
        l.value("eccentric_amplification", cfg.loads.eccentric_amplification);
    cfg.loads.target_safety_factor =
        l.value("target_safety_factor", cfg.loads.target_safety_factor);
  }

  if (doc.contains("aero")) {
    const json &a = doc["aero"];
    cfg.aero.air_density_kgm3 = a.value("air_density_kgm3", cfg.aero.air_density_kgm3);
    cfg.aero.drag_coefficient = a.value("drag_coefficient", cfg.aero.drag_coefficient);
    cfg.aero.headwind_ms = a.value("headwind_ms", cfg.aero.headwind_ms);
    cfg.aero.limbs_head_area_m2 = a.value("limbs_head_area_m2", cfg.aero.limbs_head_area_m2);
  }

  if (doc.contains("usability")) {
    const json &u = doc["usability"];
    UsabilityWeights &w = cfg.usability;
    w.bias = u.value("bias", w.bias);
    w.bar_drop = u.value("bar_drop", w.bar_drop);
    w.bar_mtb = u.value("bar_mtb", w.bar_mtb);
    w.bar_bullhorn = u.value("bar_bullhorn", w.bar_bullhorn);
    w.front_fender = u.value("front_fender", w.front_fender);
    w.rear_fender = u.value("rear_fender", w.rear_fender);
    w.rack = u.value("rack", w.rack);
    w.wheel_per_mm = u.value("wheel_per_mm", w.wheel_per_mm);
    w.reference_wheel_mm = u.value("reference_wheel_mm", w.reference_wheel_mm);
    w.brightness = u.value("brightness", w.brightness);
  }

  if (doc.contains("embedding")) {
    const json &e = doc["embedding"];
    cfg.embedding_dim = e.value("dim", cfg.embedding_dim);
    cfg.embedding_map_seed = e.value("map_seed", cfg.embedding_map_seed);
  }

  if (doc.contains("rider_population")) {
    const json &r = doc["rider_population"];
    read_moment(r, "upper_leg", cfg.riders.upper_leg);
    read_moment(r, "lower_leg", cfg.riders.lower_leg);
    read_moment(r, "arm", cfg.riders.arm);
    read_moment(r, "torso", cfg.riders.torso);
    read_moment(r, "neck_head", cfg.riders.neck_head);
    read_moment(r, "torso_width", cfg.riders.torso_width);
  }

  if (doc.contains("penalty")) {
    cfg.penalty.alpha = doc["penalty"].value("alpha", cfg.penalty.alpha);
    cfg.penalty.beta = doc["penalty"].value("beta", cfg.penalty.beta);
  }

  if (doc.contains("metrics")) {
    const json &m = doc["metrics"];
    const std::string mode = m.value("hv_mode", std::string("montecarlo"));
    if (mode == "exact") cfg.metrics.hv_mode = HypervolumeMode::exact;
    else if (mode == "montecarlo") cfg.metrics.hv_mode = HypervolumeMode::montecarlo;
    else throw IoError("metrics.hv_mode must be exact or montecarlo");
    cfg.metrics.mc_samples = m.value("mc_samples", cfg.metrics.mc_samples);
    cfg.metrics.bandwidth = m.value("bandwidth", cfg.metrics.bandwidth);
  }

  if (doc.contains("nsga2")) {
    const json &n = doc["nsga2"];
    cfg.nsga2.population = n.value("population", cfg.nsga2.population);
    cfg.nsga2.generations = n.value("generations", cfg.nsga2.generations);
    cfg.nsga2.crossover_rate = n.value("crossover_rate", cfg.nsga2.crossover_rate);
    cfg.nsga2.sbx_eta = n.value("sbx_eta", cfg.nsga2.sbx_eta);
    cfg.nsga2.mutation_eta = n.value("mutation_eta", cfg.nsga2.mutation_eta);
    cfg.nsga2.mutation_rate = n.value("mutation_rate", cfg.nsga2.mutation_rate);
  }

  if (doc.contains("grad")) {
    const json &g = doc["grad"];
    cfg.grad.starts = g.value("starts", cfg.grad.starts);
    cfg.grad.steps = g.value("steps", cfg.grad.steps);
    cfg.grad.learning_rate = g.value("learning_rate", cfg.grad.learning_rate);
    cfg.grad.penalty_weight = g.value("penalty_weight", cfg.grad.penalty_weight);
    cfg.grad.fd_step = g.value("fd_step", cfg.grad.fd_step);
    cfg.grad.max_backtracks = g.value("max_backtracks", cfg.grad.max_backtracks);
  }

  read_scale(doc, "desk", cfg.desk);
  read_scale(doc, "full", cfg.full);
  return cfg;
}

void save_config(const std::string &path, const EvalConfig &cfg) {
  ordered_json doc;
  doc["schema_path"] = cfg.schema_path;
  doc["geometry"] = {{"crank_length_mm", cfg.geometry.crank_length_mm},
                     {"min_segment_mm", cfg.geometry.min_segment_mm}};
  ordered_json ergo;
  ergo["incompatibility_penalty_deg"] = cfg.ergonomics.incompatibility_penalty_deg;
  ergo["penalty_deg_per_mm"] = cfg.ergonomics.penalty_deg_per_mm;
  for (const Vec2 &v : cfg.ergonomics.stem_offsets)
    ergo["stem_offsets_mm"].push_back({v.x, v.y});
  for (const Vec2 &v : cfg.ergonomics.bar_offsets) ergo["bar_offsets_mm"].push_back({v.x, v.y});
  auto uc_block = [](const UseCase &uc) {
    return ordered_json{{"knee", {uc.knee.lo, uc.knee.hi}},
                        {"hip", {uc.hip.lo, uc.hip.hi}},
                        {"arm", {uc.arm.lo, uc.arm.hi}}};
  };
  ergo["road"] = uc_block(cfg.use_case_road);
  ergo["mountain"] = uc_block(cfg.use_case_mountain);
  ergo["commuting"] = uc_block(cfg.use_case_commuting);
  doc["ergonomics"] = ergo;

  ordered_json materials;
  for (const auto &[label, props] : cfg.materials.entries())
    materials[label] = {{"density_kgm3", props.density_kgm3},
                        {"modulus_mpa", props.modulus_mpa},
                        {"yield_mpa", props.yield_mpa}};
  for (const auto &[label, target] : cfg.materials.alias_map()) materials[label] = target;
  doc["materials"] = materials;

  doc["loads"] = {{"planar_n", cfg.loads.planar_n},
                  {"eccentric_n", cfg.loads.eccentric_n},
                  {"eccentric_amplification", cfg.loads.eccentric_amplification},
                  {"target_safety_factor", cfg.loads.target_safety_factor}};
  doc["aero"] = {{"air_density_kgm3", cfg.aero.air_density_kgm3},
                 {"drag_coefficient", cfg.aero.drag_coefficient},
                 {"headwind_ms", cfg.aero.headwind_ms},
                 {"limbs_head_area_m2", cfg.aero.limbs_head_area_m2}};
  doc["usability"] = {{"bias", cfg.usability.bias},
                      {"bar_drop", cfg.usability.bar_drop},
                      {"bar_mtb", cfg.usability.bar_mtb},
                      {"bar_bullhorn", cfg.usability.bar_bullhorn},
                      {"front_fender", cfg.usability.front_fender},
                      {"rear_fender", cfg.usability.rear_fender},
                      {"rack", cfg.usability.rack},
                      {"wheel_per_mm", cfg.usability.wheel_per_mm},
                      {"reference_wheel_mm", cfg.usability.reference_wheel_mm},
                      {"brightness", cfg.usability.brightness}};
  doc["embedding"] = {{"dim", cfg.embedding_dim}, {"map_seed", cfg.embedding_map_seed}};
  doc["rider_population"] = {
      {"upper_leg", {cfg.riders.upper_leg.mean, cfg.riders.upper_leg.std_dev}},
      {"lower_leg", {cfg.riders.lower_leg.mean, cfg.riders.lower_leg.std_dev}},
      {"arm", {cfg.riders.arm.mean, cfg.riders.arm.std_dev}},
      {"torso", {cfg.riders.torso.mean, cfg.riders.torso.std_dev}},
      {"neck_head", {cfg.riders.neck_head.mean, cfg.riders.neck_head.std_dev}},
      {"torso_width", {cfg.riders.torso_width.mean, cfg.riders.torso_width.std_dev}}};
  doc["penalty"] = {{"alpha", cfg.penalty.alpha}, {"beta", cfg.penalty.beta}};
  doc["metrics"] = {
      {"hv_mode", cfg.metrics.hv_mode == HypervolumeMode::exact ? "exact" : "montecarlo"},
      {"mc_samples", cfg.metrics.mc_samples},
      {"bandwidth", cfg.metrics.bandwidth}};
  doc["nsga2"] = {{"population", cfg.nsga2.population},
                  {"generations", cfg.nsga2.generations},
                  {"crossover_rate", cfg.nsga2.crossover_rate},
                  {"sbx_eta", cfg.nsga2.sbx_eta},
                  {"mutation_eta", cfg.nsga2.mutation_eta},
                  {"mutation_rate", cfg.nsga2.mutation_rate}};
  doc["grad"] = {{"starts", cfg.grad.starts},
                 {"steps", cfg.grad.steps},
                 {"learning_rate", cfg.grad.learning_rate},
                 {"penalty_weight", cfg.grad.penalty_weight},
                 {"fd_step", cfg.grad.fd_step},
                 {"max_backtracks", cfg.grad.max_backtracks}};
  auto scale_block = [](const ScaleConfig &s) {
    return ordered_json{{"dataset_size", s.dataset_size},
                        {"holdout_size", s.holdout_size},
                        {"samples_per_condition", s.samples_per_condition},
                        {"unconditional_conditions", s.unconditional_conditions},
                        {"conditional_cases", s.conditional_cases},
                        {"mc_samples", s.mc_samples}};
  };
  doc["desk"] = scale_block(cfg.desk);
  doc["full"] = scale_block(cfg.full);

  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file '" + path + "'");
  out << doc.dump(2) << "\n";
}

std::string bundled_config_path() { return default_data_dir() + "/default_config.json"; }

} // namespace velo
