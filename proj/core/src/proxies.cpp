#include "velo/proxies.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "velo/csv.hpp"

namespace velo {

MaterialTable MaterialTable::defaults() {
  MaterialTable t;
  t.set("STEEL", {7850.0, 200000.0, 395.0});
  t.set("ALUMINIUM", {2700.0, 69000.0, 270.0});
  t.set("TITANIUM", {4500.0, 105000.0, 880.0});
  // Non-isotropic materials evaluate with steel properties.
  t.alias("CARBON", "STEEL");
  t.alias("BAMBOO", "STEEL");
  t.alias("OTHER", "STEEL");
  return t;
}

const MaterialProperties &MaterialTable::lookup(const std::string &label) const {
  auto alias = aliases_.find(label);
  const std::string &key = alias != aliases_.end() ? alias->second : label;
  auto it = table_.find(key);
  if (it == table_.end()) throw EvalError("material '" + label + "' not in the property table");
  return it->second;
}

void MaterialTable::set(const std::string &label, MaterialProperties props) {
  table_[label] = props;
}

void MaterialTable::alias(const std::string &label, const std::string &target) {
  aliases_[label] = target;
}

double tube_shell_mass_kg(double d_mm, double t_mm, double length_mm, double density_kgm3) {
  if (!(t_mm < d_mm / 2.0))
    throw EvalError("degenerate tube: wall " + std::to_string(t_mm) + " mm >= half of diameter " +
                    std::to_string(d_mm) + " mm");
  if (t_mm <= 0.0 || length_mm < 0.0) throw EvalError("degenerate tube dimensions");
  const double inner = d_mm - 2.0 * t_mm;
  const double area_mm2 = kPi / 4.0 * (d_mm * d_mm - inner * inner);
  return area_mm2 * length_mm * 1e-9 * density_kgm3;
}

namespace {

/// Second moment of area for a thin-wall circular tube, mm^4.
double tube_moment(double d_mm, double t_mm) {
  const double inner = d_mm - 2.0 * t_mm;
  return kPi / 64.0 * (d_mm * d_mm * d_mm * d_mm - inner * inner * inner * inner);
}

struct Tube {
  double d, t, len;
  double count = 1.0; // paired stays act in parallel
};

} // namespace

BeamStructuralProxy::BeamStructuralProxy(const DesignSchema &schema, MaterialTable materials,
                                         StructuralLoads loads, GeometryConfig geo)
    : schema_(&schema), params_(BikeParams::resolve(schema)), materials_(std::move(materials)),
      loads_(loads), geo_(geo) {}

StructuralReport BeamStructuralProxy::structural_eval(const Design &d) const {
  const BikeParams &p = params_;
  const FrameLayout frame = solve_frame(d, p, geo_);
  if (!frame.finite_inputs) throw EvalError("non-finite frame parameters");
  if (!frame.front_end_ok || !frame.rear_ok)
    throw EvalError("frame not constructible; structural proxy undefined");

  const std::string &material = schema_->param(p.material).categories[d.category(p.material)];
  const MaterialProperties &mat = materials_.lookup(material);

  const Tube top{d.real(p.ttd), d.real(p.wall_tt), frame.top_tube_length};
  const Tube down{d.real(p.dtd), d.real(p.wall_dt), d.real(p.dt_length)};
  const Tube seat{d.real(p.seat_tube_diameter), d.real(p.wall_st), d.real(p.seat_tube_length)};
  const Tube head{d.real(p.head_tube_diameter), d.real(p.wall_ht), d.real(p.head_tube_length)};
  const Tube chain{d.real(p.csd), d.real(p.wall_cs), d.real(p.cs), 2.0};
  const Tube stay{d.real(p.ssd), d.real(p.wall_ss), frame.seat_stay_length, 2.0};

  StructuralReport report;
  for (const Tube &tube : {top, down, seat, head, chain, stay})
    report.mass_kg += tube.count * tube_shell_mass_kg(tube.d, tube.t, tube.len, mat.density_kgm3);

  const double E = mat.modulus_mpa;
  auto bending_compliance = [&](const Tube &tube) {
    return tube.len * tube.len * tube.len / (E * tube_moment(tube.d, tube.t)) / tube.count;
  };

  // Planar path: the front triangle flexes under the in-plane loads.
  report.planar_compliance = bending_compliance(top) + bending_compliance(down) +
                             bending_compliance(seat) + bending_compliance(head);
  // Transverse path: out-of-plane bending of the paired stays.
  report.transverse_compliance = bending_compliance(chain) + bending_compliance(stay);
  // Eccentric path: offset saddle load works the seat tube, top tube and
  // both stay pairs.
  report.eccentric_compliance = bending_compliance(seat) + bending_compliance(top) +
                                bending_compliance(chain) + bending_compliance(stay);

  // Safety factors from peak bending stress sigma = F * L * (d/2) / I over
  // the loaded path; margins follow the 1.5-minus-safety-factor rule.
  auto bending_stress = [&](const Tube &tube, double load_n) {
    return load_n * tube.len * (tube.d / 2.0) / (tube_moment(tube.d, tube.t) * tube.count);
  };
  const double planar_stress =
      std::max({bending_stress(seat, loads_.planar_n), bending_stress(top, loads_.planar_n),
                bending_stress(down, loads_.planar_n), bending_stress(chain, loads_.planar_n)});
  const double ecc_load = loads_.eccentric_n * loads_.eccentric_amplification;
  const double eccentric_stress =
      std::max({bending_stress(seat, ecc_load), bending_stress(top, ecc_load),
                bending_stress(stay, ecc_load)});

  const double planar_sf = planar_stress > 0.0 ? mat.yield_mpa / planar_stress : 1e9;
  const double eccentric_sf = eccentric_stress > 0.0 ? mat.yield_mpa / eccentric_stress : 1e9;
  report.planar_sf_margin = loads_.target_safety_factor - planar_sf;
  report.eccentric_sf_margin = loads_.target_safety_factor - eccentric_sf;
  return report;
}

FrontalAreaAeroProxy::FrontalAreaAeroProxy(const ErgonomicsSolver &ergo, AeroConfig cfg)
    : ergo_(&ergo), cfg_(cfg) {}

double FrontalAreaAeroProxy::drag_from_area(double area_m2) const {
  const double v = cfg_.headwind_ms;
  return 0.5 * cfg_.air_density_kgm3 * cfg_.drag_coefficient * area_m2 * v * v;
}

double FrontalAreaAeroProxy::drag_force(const Design &design, const RiderProfile &rider) const {
  const InterfacePoints pts = ergo_->interface_points(design);
  const JointAngles angles = joint_angles(pts, rider);
  const double torso_rad = angles.torso_angle_deg * kDegToRad;
  const double torso_area_m2 =
      rider.torso_width * 1e-3 * (rider.torso * 1e-3) * std::sin(torso_rad);
  return drag_from_area(torso_area_m2 + cfg_.limbs_head_area_m2);
}

LogisticUsabilityProxy::LogisticUsabilityProxy(const DesignSchema &schema, UsabilityWeights weights)
    : params_(BikeParams::resolve(schema)), weights_(weights) {}

double LogisticUsabilityProxy::logit(const Design &d) const {
  const UsabilityWeights &w = weights_;
  double z = w.bias;
  switch (d.category(params_.handlebar_style)) {
  case 0: z += w.bar_drop; break;
  case 1: z += w.bar_mtb; break;
  default: z += w.bar_bullhorn; break;
  }
  if (d.boolean(params_.front_fender)) z += w.front_fender;
  if (d.boolean(params_.rear_fender)) z += w.rear_fender;
  if (d.boolean(params_.rack)) z += w.rack;
  const double wheel = d.real(params_.wheel_diameter_front);
  z += w.wheel_per_mm * std::fabs(wheel - w.reference_wheel_mm);
  const double brightness =
      (d.real(params_.color_r) + d.real(params_.color_g) + d.real(params_.color_b)) / (3.0 * 255.0);
  z += w.brightness * std::clamp(brightness, 0.0, 2.0);
  return z;
}

double LogisticUsabilityProxy::usability_score(const Design &d) const {
  const double rated_usable = 1.0 / (1.0 + std::exp(-logit(d)));
  return 1.0 - rated_usable; // objective: 0 most usable
}

Embedding Embedding::from(std::vector<double> values) {
  Embedding e;
  e.data = std::move(values);
  double sq = 0.0;
  for (double v : e.data) sq += v * v;
  e.norm = std::sqrt(sq);
  return e;
}

LinearMapEmbedder::LinearMapEmbedder(const DesignSchema &schema, std::size_t dim,
                                     std::uint64_t map_seed)
    : schema_(&schema), dim_(dim) {
  const std::size_t n = schema.continuous_dim();
  matrix_.resize(dim_ * n);
  std::mt19937_64 rng(map_seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
  for (double &m : matrix_) m = gauss(rng);

  mid_.resize(n);
  half_.resize(n);
  std::size_t slot = 0;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const ParameterSpec &p = schema.param(i);
    for (std::size_t k = 0; k < p.slot_width(); ++k, ++slot) {
      if (p.kind == ParamKind::continuous || p.kind == ParamKind::integer) {
        mid_[slot] = (p.lower + p.upper) / 2.0;
        half_[slot] = (p.upper - p.lower) / 2.0;
      } else {
        mid_[slot] = 0.5;
        half_[slot] = 0.5;
      }
    }
  }
}

Embedding LinearMapEmbedder::embed(const Design &design) const {
  const ContinuousVector x = encode_continuous(design, *schema_);
  const std::size_t n = x.size();
  std::vector<double> z(n);
  for (std::size_t j = 0; j < n; ++j) z[j] = (x[j] - mid_[j]) / half_[j];
  std::vector<double> out(dim_, 0.0);
  for (std::size_t r = 0; r < dim_; ++r) {
    const double *row = matrix_.data() + r * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * z[j];
    out[r] = acc;
  }
  return Embedding::from(std::move(out));
}

PrecomputedEmbedder::PrecomputedEmbedder(std::vector<Embedding> rows, std::size_t dim)
    : rows_(std::move(rows)), dim_(dim) {
  for (const Embedding &e : rows_)
    if (e.data.size() != dim_)
      throw IoError("precomputed embedding row has wrong dimension");
}

Embedding PrecomputedEmbedder::embed(const Design &) const {
  if (cursor_ >= rows_.size())
    throw EvalError("precomputed embedder exhausted after " + std::to_string(rows_.size()) +
                    " rows");
  return rows_[cursor_++];
}

Embedding PrecomputedEmbedder::embed_row(std::size_t row) const {
  if (row >= rows_.size()) throw EvalError("precomputed embedding row out of range");
  return rows_[row];
}

Embedding embed_design(const Design &design, const Embedder &embedder) {
  return embedder.embed(design);
}

double aesthetic_distance(const Embedding &e, const Embedding &target) {
  if (!(e.norm > 0.0) || !(target.norm > 0.0))
    throw EvalError("cosine distance undefined for zero-norm embedding");
  if (e.data.size() != target.data.size())
    throw EvalError("embedding dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < e.data.size(); ++i) dot += e.data[i] * target.data[i];
  return 1.0 - dot / (e.norm * target.norm);
}

std::vector<Embedding> read_embeddings_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings CSV '" + path + "'");
  std::vector<Embedding> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    std::vector<double> values;
    values.reserve(cells.size());
    for (const std::string &cell : cells) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception &) {
        throw IoError("embeddings CSV: cannot parse '" + cell + "'");
      }
    }
    rows.push_back(Embedding::from(std::move(values)));
  }
  return rows;
}

} // namespace velo
