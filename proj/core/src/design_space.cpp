#include "velo/design_space.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace velo {

using nlohmann::json;

std::string to_string(ParamKind kind) {
  switch (kind) {
  case ParamKind::continuous: return "continuous";
  case ParamKind::integer: return "integer";
  case ParamKind::boolean: return "boolean";
  case ParamKind::categorical: return "categorical";
  }
  return "unknown";
}

ParamKind param_kind_from_string(const std::string &s) {
  if (s == "continuous") return ParamKind::continuous;
  if (s == "integer") return ParamKind::integer;
  if (s == "boolean") return ParamKind::boolean;
  if (s == "categorical") return ParamKind::categorical;
  throw SchemaError("unknown parameter kind '" + s + "'");
}

DesignSchema::DesignSchema(std::vector<ParameterSpec> parameters)
    : parameters_(std::move(parameters)) {
  slot_offsets_.reserve(parameters_.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < parameters_.size(); ++i) {
    const ParameterSpec &p = parameters_[i];
    if (p.name.empty()) throw SchemaError("parameter " + std::to_string(i) + " has an empty name");
    if (!index_.emplace(p.name, i).second)
      throw SchemaError("duplicate parameter name '" + p.name + "'");
    switch (p.kind) {
    case ParamKind::continuous:
    case ParamKind::integer:
      if (!(p.lower < p.upper))
        throw SchemaError("parameter '" + p.name + "': lower bound must be below upper bound");
      break;
    case ParamKind::boolean:
      break;
    case ParamKind::categorical: {
      if (p.categories.empty())
        throw SchemaError("parameter '" + p.name + "': categorical without categories");
      std::vector<std::string> seen;
      for (const auto &c : p.categories) {
        if (std::find(seen.begin(), seen.end(), c) != seen.end())
          throw SchemaError("parameter '" + p.name + "': duplicate category '" + c + "'");
        seen.push_back(c);
      }
      break;
    }
    }
    slot_offsets_.push_back(offset);
    offset += p.slot_width();
  }
  continuous_dim_ = offset;
}

bool DesignSchema::contains(const std::string &name) const {
  return index_.find(name) != index_.end();
}

std::size_t DesignSchema::index_of(const std::string &name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw SchemaError("unknown parameter '" + name + "'");
  return it->second;
}

std::optional<std::size_t> DesignSchema::find(const std::string &name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t DesignSchema::category_index(std::size_t i, const std::string &label) const {
  const ParameterSpec &p = parameters_[i];
  for (std::size_t k = 0; k < p.categories.size(); ++k)
    if (p.categories[k] == label) return k;
  throw SchemaError("parameter '" + p.name + "': unknown category '" + label + "'");
}

DesignSchema schema_from_json_text(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception &e) {
    throw SchemaError(std::string("schema parse failure: ") + e.what());
  }
  if (!doc.contains("parameters") || !doc["parameters"].is_array())
    throw SchemaError("schema file must contain a 'parameters' array");

  std::vector<ParameterSpec> specs;
  for (const auto &entry : doc["parameters"]) {
    ParameterSpec spec;
    if (!entry.contains("name")) throw SchemaError("schema entry without 'name'");
    spec.name = entry["name"].get<std::string>();
    if (!entry.contains("kind"))
      throw SchemaError("parameter '" + spec.name + "': missing 'kind'");
    spec.kind = param_kind_from_string(entry["kind"].get<std::string>());
    if (spec.kind == ParamKind::categorical) {
      if (!entry.contains("categories"))
        throw SchemaError("parameter '" + spec.name + "': categorical without categories");
      spec.categories = entry["categories"].get<std::vector<std::string>>();
    } else if (spec.kind != ParamKind::boolean) {
      if (!entry.contains("lower") || !entry.contains("upper"))
        throw SchemaError("parameter '" + spec.name + "': missing bounds");
      spec.lower = entry["lower"].get<double>();
      spec.upper = entry["upper"].get<double>();
    } else {
      spec.lower = 0.0;
      spec.upper = 1.0;
    }
    spec.strictly_positive = entry.value("strictly_positive", false);
    spec.unit = entry.value("unit", "");
    specs.push_back(std::move(spec));
  }
  return DesignSchema(std::move(specs));
}

void require_bike_schema(const DesignSchema &schema) {
  if (schema.size() != 70)
    throw SchemaError("bike schema must have exactly 70 parameters, found " +
                      std::to_string(schema.size()));
  std::size_t categorical = 0, category_slots = 0;
  for (const ParameterSpec &p : schema.parameters()) {
    if (p.kind == ParamKind::categorical) {
      ++categorical;
      category_slots += p.category_count();
    }
  }
  if (categorical != 8)
    throw SchemaError("bike schema must have exactly 8 categorical parameters, found " +
                      std::to_string(categorical));
  if (category_slots != 28 || schema.continuous_dim() != 90)
    throw SchemaError("bike schema category slots must total 28 (one-hot dimension 90)");
}

DesignSchema load_schema(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open schema file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  DesignSchema schema = schema_from_json_text(buf.str());
  require_bike_schema(schema);
  return schema;
}

ValidationReport validate(const Design &design, const DesignSchema &schema) {
  ValidationReport report;
  if (design.size() != schema.size()) {
    report.violations.push_back(
        {"<design>", "expected " + std::to_string(schema.size()) + " parameters, got " +
                         std::to_string(design.size())});
    return report;
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const ParameterSpec &p = schema.param(i);
    const double v = design.raw(i);
    if (!std::isfinite(v)) {
      report.violations.push_back({p.name, "non-finite value"});
      continue;
    }
    switch (p.kind) {
    case ParamKind::continuous:
      if (v < p.lower || v > p.upper)
        report.violations.push_back({p.name, "value " + std::to_string(v) + " outside bounds [" +
                                                 std::to_string(p.lower) + ", " +
                                                 std::to_string(p.upper) + "]"});
      break;
    case ParamKind::integer:
      if (v != std::floor(v))
        report.violations.push_back({p.name, "integer parameter holds non-integral value"});
      else if (v < p.lower || v > p.upper)
        report.violations.push_back({p.name, "value outside integer bounds"});
      break;
    case ParamKind::boolean:
      if (v != 0.0 && v != 1.0)
        report.violations.push_back({p.name, "boolean parameter must be 0 or 1"});
      break;
    case ParamKind::categorical:
      if (v != std::floor(v) || v < 0.0 || v >= static_cast<double>(p.category_count()))
        report.violations.push_back({p.name, "category index out of range"});
      break;
    }
  }
  return report;
}

ContinuousVector encode_continuous(const Design &design, const DesignSchema &schema) {
  ValidationReport check = validate(design, schema);
  if (!check.ok())
    throw EvalError("cannot encode invalid design (first violation: " +
                    check.violations.front().parameter + ": " +
                    check.violations.front().message + ")");
  ContinuousVector out(schema.continuous_dim(), 0.0);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const ParameterSpec &p = schema.param(i);
    const std::size_t off = schema.slot_offset(i);
    if (p.kind == ParamKind::categorical) {
      out[off + design.category(i)] = 1.0;
    } else {
      out[off] = design.raw(i);
    }
  }
  return out;
}

Design decode_continuous(const ContinuousVector &vec, const DesignSchema &schema) {
  if (vec.size() != schema.continuous_dim())
    throw EvalError("continuous vector length " + std::to_string(vec.size()) +
                    " does not match schema dimension " + std::to_string(schema.continuous_dim()));
  Design design(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const ParameterSpec &p = schema.param(i);
    const std::size_t off = schema.slot_offset(i);
    switch (p.kind) {
    case ParamKind::continuous: {
      double v = vec[off];
      if (std::isnan(v)) v = p.lower;
      design.set_raw(i, std::clamp(v, p.lower, p.upper));
      break;
    }
    case ParamKind::integer: {
      double v = vec[off];
      if (std::isnan(v)) v = p.lower;
      v = std::round(v); // half away from zero
      design.set_raw(i, std::clamp(v, p.lower, p.upper));
      break;
    }
    case ParamKind::boolean:
      design.set_raw(i, vec[off] >= 0.5 ? 1.0 : 0.0);
      break;
    case ParamKind::categorical: {
      std::size_t best = 0;
      double best_v = vec[off];
      for (std::size_t k = 1; k < p.category_count(); ++k) {
        if (vec[off + k] > best_v) { // strict: ties keep the lowest index
          best_v = vec[off + k];
          best = k;
        }
      }
      if (std::isnan(best_v)) best = 0;
      design.set_raw(i, static_cast<double>(best));
      break;
    }
    }
  }
  return design;
}

namespace {

Design sample_one(const DesignSchema &schema, std::mt19937_64 &rng) {
  Design design(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const ParameterSpec &p = schema.param(i);
    switch (p.kind) {
    case ParamKind::continuous: {
      std::uniform_real_distribution<double> dist(p.lower, p.upper);
      design.set_raw(i, dist(rng));
      break;
    }
    case ParamKind::integer: {
      std::uniform_int_distribution<long long> dist(static_cast<long long>(p.lower),
                                                    static_cast<long long>(p.upper));
      design.set_raw(i, static_cast<double>(dist(rng)));
      break;
    }
    case ParamKind::boolean: {
      std::uniform_int_distribution<int> dist(0, 1);
      design.set_raw(i, static_cast<double>(dist(rng)));
      break;
    }
    case ParamKind::categorical: {
      std::uniform_int_distribution<std::size_t> dist(0, p.category_count() - 1);
      design.set_raw(i, static_cast<double>(dist(rng)));
      break;
    }
    }
  }
  return design;
}

} // namespace

Design sample_uniform(const DesignSchema &schema, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_one(schema, rng);
}

std::vector<Design> sample_uniform(const DesignSchema &schema, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Design> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(schema, rng));
  return out;
}

DesignSchema rebound_to_dataset(const DesignSchema &schema, const std::vector<Design> &dataset) {
  if (dataset.empty()) throw SchemaError("rebound_to_dataset: empty dataset");
  std::vector<ParameterSpec> specs = schema.parameters();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].kind == ParamKind::boolean || specs[i].kind == ParamKind::categorical) continue;
    double lo = dataset.front().raw(i), hi = lo;
    for (const Design &d : dataset) {
      lo = std::min(lo, d.raw(i));
      hi = std::max(hi, d.raw(i));
    }
    if (lo < hi) {
      specs[i].lower = lo;
      specs[i].upper = hi;
    }
  }
  return DesignSchema(std::move(specs));
}

std::string default_data_dir() {
  if (const char *env = std::getenv("VELOBENCH_DATA_DIR")) return env;
#ifdef VELO_BUNDLED_DATA_DIR
  return VELO_BUNDLED_DATA_DIR;
#else
  return "data";
#endif
}

std::string bundled_schema_path() { return default_data_dir() + "/schema.json"; }

} // namespace velo
