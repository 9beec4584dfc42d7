#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "velo/design_space.hpp"
#include "velo/ergonomics.hpp"
#include "velo/geometry.hpp"

namespace velo {

/// Base of every pluggable evaluator family: deterministic, total over
/// valid designs, safe for concurrent read-only use. `is_proxy` marks
/// analytic substitutes standing in for trained models; reports carry the
/// flag as provenance.
class Evaluator {
public:
  virtual ~Evaluator() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> output_names() const = 0;
  virtual bool is_proxy() const { return true; }
};

struct MaterialProperties {
  double density_kgm3 = 7850.0;
  double modulus_mpa = 200000.0;
  double yield_mpa = 395.0;
};

/// Material table keyed by the MATERIAL category labels. Non-isotropic
/// entries (CARBON, BAMBOO, OTHER) alias STEEL.
class MaterialTable {
public:
  static MaterialTable defaults();
  const MaterialProperties &lookup(const std::string &label) const;
  void set(const std::string &label, MaterialProperties props);
  void alias(const std::string &label, const std::string &target);
  const std::map<std::string, MaterialProperties> &entries() const { return table_; }
  const std::map<std::string, std::string> &alias_map() const { return aliases_; }

private:
  std::map<std::string, MaterialProperties> table_;
  std::map<std::string, std::string> aliases_;
};

struct StructuralLoads {
  double planar_n = 1000.0;    // in-plane load applied at saddle and BB
  double eccentric_n = 700.0;  // offset load applied at the saddle
  double eccentric_amplification = 1.5;
  double target_safety_factor = 1.5;
};

struct StructuralReport {
  double mass_kg = 0.0;
  double planar_compliance = 0.0;     // mm/N along the in-plane load path
  double transverse_compliance = 0.0; // mm/N, out-of-plane stay bending
  double eccentric_compliance = 0.0;  // mm/N, offset-load path
  double planar_sf_margin = 0.0;      // 1.5 - safety factor, <= 0 satisfied
  double eccentric_sf_margin = 0.0;
};

/// Closed thin-wall tube-shell mass, in kg, for mm inputs.
double tube_shell_mass_kg(double outer_diameter_mm, double wall_mm, double length_mm,
                          double density_kgm3);

/// Structural evaluator interface; the paper-grade surrogate is replaced by
/// the analytic beam proxy below, behind the same signature.
class StructuralEvaluator : public Evaluator {
public:
  virtual StructuralReport structural_eval(const Design &design) const = 0;
  std::vector<std::string> output_names() const override {
    return {"frame_mass_kg", "planar_compliance", "transverse_compliance",
            "eccentric_compliance", "planar_safety_factor", "eccentric_safety_factor"};
  }
};

/// Analytic proxy: eight frame tubes (top, down, seat, head, paired chain
/// and seat stays), shell masses, L^3/(E*I) load-path compliances and
/// bending-stress safety factors. Throws EvalError on degenerate tubes
/// (wall >= d/2) or an unplaceable frame.
class BeamStructuralProxy : public StructuralEvaluator {
public:
  BeamStructuralProxy(const DesignSchema &schema, MaterialTable materials = MaterialTable::defaults(),
                      StructuralLoads loads = {}, GeometryConfig geo = {});
  std::string name() const override { return "beam-structural-proxy"; }
  StructuralReport structural_eval(const Design &design) const override;

private:
  const DesignSchema *schema_;
  BikeParams params_;
  MaterialTable materials_;
  StructuralLoads loads_;
  GeometryConfig geo_;
};

struct AeroConfig {
  double air_density_kgm3 = 1.225;
  double drag_coefficient = 0.9;
  double headwind_ms = 10.0;
  double limbs_head_area_m2 = 0.18; // constant add-on frontal area
};

class AeroEvaluator : public Evaluator {
public:
  virtual double drag_force(const Design &design, const RiderProfile &rider) const = 0;
  std::vector<std::string> output_names() const override { return {"drag_force_n"}; }
};

/// Frontal-area proxy: torso area from the solved torso inclination plus a
/// constant limb/head term, through the standard quadratic drag law.
class FrontalAreaAeroProxy : public AeroEvaluator {
public:
  FrontalAreaAeroProxy(const ErgonomicsSolver &ergo, AeroConfig cfg = {});
  std::string name() const override { return "frontal-area-aero-proxy"; }
  double drag_force(const Design &design, const RiderProfile &rider) const override;
  /// Drag for an explicit frontal area; exposed for direct verification.
  double drag_from_area(double area_m2) const;

private:
  const ErgonomicsSolver *ergo_;
  AeroConfig cfg_;
};

struct UsabilityWeights {
  double bias = -0.2;
  double bar_drop = -0.5;     // handlebar style 0
  double bar_mtb = 0.8;       // handlebar style 1
  double bar_bullhorn = -0.7; // handlebar style 2
  double front_fender = 0.3;
  double rear_fender = 0.3;
  double rack = 0.5;
  double wheel_per_mm = -0.002; // deviation from reference diameter
  double reference_wheel_mm = 660.0;
  double brightness = 0.4; // mean RGB scaled to [0,1]
};

class UsabilityEvaluator : public Evaluator {
public:
  /// Objective convention: 0 most usable, 1 least usable.
  virtual double usability_score(const Design &design) const = 0;
  std::vector<std::string> output_names() const override { return {"usability"}; }
};

/// Logistic proxy over interpretable features; the score is
/// 1 - sigmoid(w . features) so that lower is better.
class LogisticUsabilityProxy : public UsabilityEvaluator {
public:
  LogisticUsabilityProxy(const DesignSchema &schema, UsabilityWeights weights = {});
  std::string name() const override { return "logistic-usability-proxy"; }
  double usability_score(const Design &design) const override;
  /// Linear predictor before the sigmoid; fixed offsets per boolean flag.
  double logit(const Design &design) const;

private:
  BikeParams params_;
  UsabilityWeights weights_;
};

struct Embedding {
  std::vector<double> data;
  double norm = 0.0;

  static Embedding from(std::vector<double> values);
};

class Embedder : public Evaluator {
public:
  virtual std::size_t dim() const = 0;
  virtual Embedding embed(const Design &design) const = 0;
  std::vector<std::string> output_names() const override { return {"embedding"}; }
};

/// Default embedder: a fixed seeded random linear map applied to the
/// bounds-standardized one-hot encoding. Stands in for the trained
/// parametric-to-image-embedding model.
class LinearMapEmbedder : public Embedder {
public:
  LinearMapEmbedder(const DesignSchema &schema, std::size_t dim = 512,
                    std::uint64_t map_seed = 0x5eed);
  std::string name() const override { return "linear-map-embedder"; }
  std::size_t dim() const override { return dim_; }
  Embedding embed(const Design &design) const override;

private:
  const DesignSchema *schema_;
  std::size_t dim_;
  std::vector<double> matrix_; // dim_ x continuous_dim, row-major
  std::vector<double> mid_, half_;
};

/// Embeddings precomputed externally (CSV: one row per design, E columns),
/// keyed by the order designs are evaluated in.
class PrecomputedEmbedder : public Embedder {
public:
  PrecomputedEmbedder(std::vector<Embedding> rows, std::size_t dim);
  std::string name() const override { return "precomputed-embedder"; }
  bool is_proxy() const override { return false; }
  std::size_t dim() const override { return dim_; }
  Embedding embed(const Design &design) const override; // consumes rows by call index
  Embedding embed_row(std::size_t row) const;
  std::size_t rows() const { return rows_.size(); }

private:
  std::vector<Embedding> rows_;
  std::size_t dim_;
  mutable std::size_t cursor_ = 0;
};

Embedding embed_design(const Design &design, const Embedder &embedder);

/// Cosine distance 1 - cos(e, target), in [0, 2]. Throws EvalError when
/// either embedding has zero norm.
double aesthetic_distance(const Embedding &e, const Embedding &target);

/// Reads an embeddings CSV (one row per design, dim columns, no header).
std::vector<Embedding> read_embeddings_csv(const std::string &path);

} // namespace velo
