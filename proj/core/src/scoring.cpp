#include "velo/scoring.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace velo {

Weights Weights::unit() {
  Weights w;
  w.objectives.assign(kObjectiveCount, 1.0);
  w.constraints.assign(kConstraintCount, 1.0);
  return w;
}

double penalty_g(double x, const PenaltyParams &p) {
  if (x <= 0.0) return p.alpha * std::exp(p.beta * x) / p.beta;
  return p.alpha * (x + 1.0 / p.beta);
}

double aggregate_quality(std::span<const double> objectives, std::span<const double> constraints,
                         const Weights &w, const PenaltyParams &p) {
  double s = 0.0;
  for (std::size_t i = 0; i < objectives.size(); ++i) s += objectives[i] / w.objectives[i];
  for (std::size_t i = 0; i < constraints.size(); ++i)
    s += penalty_g(constraints[i] / w.constraints[i], p);
  return s; // NaN/inf inputs propagate, flagging the result
}

Weights calibrate_weights(const std::vector<std::vector<double>> &objective_rows,
                          const std::vector<std::vector<double>> &constraint_rows) {
  if (objective_rows.empty() || constraint_rows.empty())
    throw EvalError("calibrate_weights: empty dataset");
  if (objective_rows.size() != constraint_rows.size())
    throw EvalError("calibrate_weights: row count mismatch");

  const std::size_t n_obj = objective_rows.front().size();
  const std::size_t n_con = constraint_rows.front().size();
  Weights w;
  w.objectives.assign(n_obj, 0.0);
  w.constraints.assign(n_con, 0.0);

  std::size_t rows = 0;
  for (std::size_t r = 0; r < objective_rows.size(); ++r) {
    bool finite = true;
    for (double v : objective_rows[r]) finite = finite && std::isfinite(v);
    for (double v : constraint_rows[r]) finite = finite && std::isfinite(v);
    if (!finite) continue; // failed evaluations carry no calibration signal
    for (std::size_t i = 0; i < n_obj; ++i) w.objectives[i] += std::fabs(objective_rows[r][i]);
    for (std::size_t i = 0; i < n_con; ++i) w.constraints[i] += std::fabs(constraint_rows[r][i]);
    ++rows;
  }
  if (rows == 0) throw EvalError("calibrate_weights: no finite rows");

  const double floor = std::numeric_limits<double>::epsilon();
  for (double &v : w.objectives) v = std::max(v / static_cast<double>(rows), floor);
  for (double &v : w.constraints) v = std::max(v / static_cast<double>(rows), floor);
  return w;
}

void save_weights(const std::string &path, const Weights &w, std::uint64_t pairing_seed) {
  nlohmann::ordered_json doc;
  doc["pairing_seed"] = pairing_seed;
  doc["objective_weights"] = w.objectives;
  doc["constraint_weights"] = w.constraints;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write weights file '" + path + "'");
  out << doc.dump(2) << "\n";
}

Weights load_weights(const std::string &path, std::uint64_t *pairing_seed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open weights file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception &e) {
    throw IoError(std::string("weights file parse failure: ") + e.what());
  }
  Weights w;
  w.objectives = doc.at("objective_weights").get<std::vector<double>>();
  w.constraints = doc.at("constraint_weights").get<std::vector<double>>();
  if (pairing_seed) *pairing_seed = doc.value("pairing_seed", 0ULL);
  return w;
}

} // namespace velo
