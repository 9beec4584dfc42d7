#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "velo/common.hpp"

namespace velo {

enum class ParamKind { continuous, integer, boolean, categorical };

std::string to_string(ParamKind kind);
ParamKind param_kind_from_string(const std::string &s);

/// One entry of the mixed-datatype design space. Lengths are in mm, angles
/// in degrees. `strictly_positive` marks parameters covered by the
/// positivity constraint check.
struct ParameterSpec {
  std::string name;
  ParamKind kind = ParamKind::continuous;
  double lower = 0.0;
  double upper = 1.0;
  std::vector<std::string> categories; // categorical only, ordered
  bool strictly_positive = false;
  std::string unit;

  std::size_t category_count() const { return categories.size(); }
  /// Width of this parameter in the one-hot relaxation.
  std::size_t slot_width() const {
    return kind == ParamKind::categorical ? categories.size() : 1;
  }
};

/// Immutable, order-preserving parameter schema. Also carries the slot
/// layout of the continuous one-hot relaxation: non-categorical parameters
/// occupy one slot, categorical parameters one slot per category, in
/// schema order.
class DesignSchema {
public:
  DesignSchema() = default;
  explicit DesignSchema(std::vector<ParameterSpec> parameters);

  std::size_t size() const { return parameters_.size(); }
  const ParameterSpec &param(std::size_t i) const { return parameters_[i]; }
  const std::vector<ParameterSpec> &parameters() const { return parameters_; }

  std::size_t continuous_dim() const { return continuous_dim_; }
  /// First slot of parameter i in the one-hot relaxation.
  std::size_t slot_offset(std::size_t i) const { return slot_offsets_[i]; }

  bool contains(const std::string &name) const;
  /// Index of a parameter by name; throws SchemaError when absent.
  std::size_t index_of(const std::string &name) const;
  std::optional<std::size_t> find(const std::string &name) const;

  /// Index of a category label within parameter i; throws on unknown label.
  std::size_t category_index(std::size_t i, const std::string &label) const;

private:
  std::vector<ParameterSpec> parameters_;
  std::vector<std::size_t> slot_offsets_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t continuous_dim_ = 0;
};

/// A design instance. One value per schema parameter, in schema order:
/// continuous values as-is, integers as integral doubles, booleans as 0/1,
/// categoricals as the category index. Typed access goes through the
/// schema-aware accessors; CSV/JSON I/O converts to and from labels.
class Design {
public:
  Design() = default;
  explicit Design(std::size_t n) : values_(n, 0.0) {}

  std::size_t size() const { return values_.size(); }
  double raw(std::size_t i) const { return values_[i]; }
  void set_raw(std::size_t i, double v) { values_[i] = v; }

  double real(std::size_t i) const { return values_[i]; }
  long long integer(std::size_t i) const { return static_cast<long long>(values_[i]); }
  bool boolean(std::size_t i) const { return values_[i] >= 0.5; }
  std::size_t category(std::size_t i) const { return static_cast<std::size_t>(values_[i]); }

  const std::vector<double> &raw_values() const { return values_; }
  std::vector<double> &raw_values() { return values_; }

  bool operator==(const Design &other) const { return values_ == other.values_; }

private:
  std::vector<double> values_;
};

/// Dense vector in the one-hot relaxation, length schema.continuous_dim().
using ContinuousVector = std::vector<double>;

struct Violation {
  std::string parameter;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Loads a design-space schema from a JSON file and enforces the bike
/// space's shape (see require_bike_schema). Fails with SchemaError naming
/// the offending field on parse errors, duplicate names, bad bounds or
/// empty category lists. Parameter order follows file order.
DesignSchema load_schema(const std::string &path);
/// Generic parser without the shape contract (programmatic/test spaces).
DesignSchema schema_from_json_text(const std::string &text);

/// The bike space ships 70 parameters, 8 of them categorical, with 28
/// category slots in total (one-hot dimension 90).
void require_bike_schema(const DesignSchema &schema);

/// Checks a design against the schema: presence of every parameter (by
/// vector length), value bounds, integral integers, 0/1 booleans, category
/// membership. Violations are data, not errors; values are not mutated.
ValidationReport validate(const Design &design, const DesignSchema &schema);

/// Maps a design into the one-hot relaxation: reals/integers copied,
/// booleans to {0,1}, categoricals to a one-hot block in category order.
ContinuousVector encode_continuous(const Design &design, const DesignSchema &schema);

/// Total inverse of encode_continuous: booleans round at 0.5, categoricals
/// take the argmax of their block (ties to the lowest index), integers
/// round half-away-from-zero and clamp, continuous values clamp to bounds.
/// Every finite vector of the right length decodes to a valid design.
Design decode_continuous(const ContinuousVector &vec, const DesignSchema &schema);

/// Independent uniform sampling over bounds/categories, deterministic per
/// seed. Sampled designs always validate.
Design sample_uniform(const DesignSchema &schema, std::uint64_t seed);
/// Batch variant drawing n designs from one seeded stream.
std::vector<Design> sample_uniform(const DesignSchema &schema, std::size_t n, std::uint64_t seed);

/// Returns a copy of the schema with numeric bounds tightened (or widened)
/// to the min/max observed in a dataset. Categories are left untouched.
DesignSchema rebound_to_dataset(const DesignSchema &schema, const std::vector<Design> &dataset);

/// Path of the bundled schema/config directory: VELOBENCH_DATA_DIR env var
/// when set, else the directory baked in at build time.
std::string default_data_dir();
std::string bundled_schema_path();

} // namespace velo
