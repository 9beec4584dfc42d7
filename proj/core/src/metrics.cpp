#include "velo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace velo {

namespace {

/// Normalized coordinates of the points that strictly dominate the
/// reference in every kept dimension, clamped at zero.
std::vector<std::vector<double>> normalize_by_reference(const std::vector<ObjectivePoint> &points,
                                                        const ReferencePoint &ref,
                                                        std::size_t *kept_dims_out) {
  std::vector<std::size_t> kept;
  for (std::size_t d = 0; d < ref.size(); ++d)
    if (std::isfinite(ref[d]) && ref[d] > 0.0) kept.push_back(d);
  if (kept_dims_out) *kept_dims_out = kept.size();

  std::vector<std::vector<double>> out;
  if (kept.empty()) return out;
  for (const ObjectivePoint &p : points) {
    if (p.size() != ref.size()) throw EvalError("hypervolume: dimension mismatch");
    std::vector<double> q(kept.size());
    bool inside = true;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const double v = p[kept[k]] / ref[kept[k]];
      if (!(v < 1.0)) { // outside or non-finite: contributes nothing
        inside = false;
        break;
      }
      q[k] = std::max(v, 0.0);
    }
    if (inside) out.push_back(std::move(q));
  }
  return out;
}

/// Drops points dominated by another point (<= in all dims). Duplicates
/// collapse to one representative.
std::vector<std::vector<double>> pareto_prune(std::vector<std::vector<double>> pts) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (i == j) continue;
      bool all_le = true;
      for (std::size_t d = 0; d < pts[i].size(); ++d)
        if (pts[j][d] > pts[i][d]) { all_le = false; break; }
      if (all_le) {
        if (pts[j] == pts[i]) dominated = j < i; // keep the first duplicate
        else dominated = true;
      }
    }
    if (!dominated) out.push_back(pts[i]);
  }
  return out;
}

double exact_hv(const std::vector<std::vector<double>> &pts) {
  // Inclusion-exclusion over dominated boxes: the box of a subset's
  // coordinate-wise max has volume prod(1 - max_i q_id).
  const std::size_t n = pts.size();
  if (n == 0) return 0.0;
  if (n > 24) throw EvalError("exact hypervolume limited to 24 points");
  const std::size_t dims = pts.front().size();
  double total = 0.0;
  for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
    double vol = 1.0;
    for (std::size_t d = 0; d < dims && vol > 0.0; ++d) {
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1ULL << i)) worst = std::max(worst, pts[i][d]);
      vol *= std::max(0.0, 1.0 - worst);
    }
    const int bits = __builtin_popcountll(mask);
    total += (bits % 2 == 1 ? 1.0 : -1.0) * vol;
  }
  return total;
}

double montecarlo_hv(const std::vector<std::vector<double>> &pts, std::size_t samples,
                     std::uint64_t seed) {
  if (pts.empty() || samples == 0) return 0.0;
  const std::size_t dims = pts.front().size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> u(dims);
  std::size_t dominated = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t d = 0; d < dims; ++d) u[d] = unit(rng);
    for (const auto &p : pts) {
      bool dom = true;
      for (std::size_t d = 0; d < dims; ++d)
        if (p[d] > u[d]) { dom = false; break; }
      if (dom) {
        ++dominated;
        break;
      }
    }
  }
  return static_cast<double>(dominated) / static_cast<double>(samples);
}

} // namespace

double hypervolume(const std::vector<ObjectivePoint> &points, const ReferencePoint &ref,
                   HypervolumeMode mode, std::size_t mc_samples, std::uint64_t seed) {
  std::size_t kept = 0;
  std::vector<std::vector<double>> pts = normalize_by_reference(points, ref, &kept);
  if (pts.empty()) return 0.0;
  pts = pareto_prune(std::move(pts));
  if (mode == HypervolumeMode::exact) return exact_hv(pts);
  return montecarlo_hv(pts, mc_samples, seed);
}

ReferencePoint reference_point(const std::vector<ObjectivePoint> &objective_rows) {
  if (objective_rows.empty()) throw EvalError("reference_point: empty input");
  ReferencePoint ref = objective_rows.front();
  for (const auto &row : objective_rows) {
    if (row.size() != ref.size()) throw EvalError("reference_point: dimension mismatch");
    for (std::size_t d = 0; d < ref.size(); ++d) ref[d] = std::max(ref[d], row[d]);
  }
  return ref;
}

double validity_rate(const std::vector<std::vector<double>> &constraint_rows) {
  if (constraint_rows.empty()) throw EvalError("validity_rate: empty report list");
  std::size_t feasible = 0;
  for (const auto &row : constraint_rows) {
    bool ok = true;
    for (double v : row)
      if (!(v <= 0.0)) { ok = false; break; }
    if (ok) ++feasible;
  }
  return static_cast<double>(feasible) / static_cast<double>(constraint_rows.size());
}

namespace {

double sq_distance(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double median_pairwise_distance(const std::vector<const std::vector<double> *> &pool) {
  std::vector<double> dists;
  dists.reserve(pool.size() * (pool.size() - 1) / 2);
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j)
      dists.push_back(std::sqrt(sq_distance(*pool[i], *pool[j])));
  if (dists.empty()) return 0.0;
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  return dists[mid];
}

} // namespace

namespace {

/// Lexicographically sorted views make the summation order canonical, so
/// the estimate is bit-identical under row permutations and argument
/// swaps.
std::vector<const std::vector<double> *> sorted_view(const std::vector<std::vector<double>> &rows) {
  std::vector<const std::vector<double> *> view;
  view.reserve(rows.size());
  for (const auto &r : rows) view.push_back(&r);
  std::sort(view.begin(), view.end(),
            [](const std::vector<double> *a, const std::vector<double> *b) { return *a < *b; });
  return view;
}

bool view_less(const std::vector<const std::vector<double> *> &a,
               const std::vector<const std::vector<double> *> &b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (*a[i] != *b[i]) return *a[i] < *b[i];
  }
  return false;
}

} // namespace

double mmd(const std::vector<std::vector<double>> &set_a,
           const std::vector<std::vector<double>> &set_b, const MmdOptions &options) {
  if (set_a.empty() || set_b.empty()) throw EvalError("mmd: both sets must be non-empty");
  const std::size_t dim = set_a.front().size();
  for (const auto &v : set_a)
    if (v.size() != dim) throw EvalError("mmd: dimension mismatch in first set");
  for (const auto &v : set_b)
    if (v.size() != dim) throw EvalError("mmd: dimension mismatch in second set");

  std::vector<const std::vector<double> *> xs = sorted_view(set_a);
  std::vector<const std::vector<double> *> ys = sorted_view(set_b);
  if (view_less(ys, xs)) std::swap(xs, ys); // canonical argument order

  double bandwidth = options.bandwidth;
  if (!(bandwidth > 0.0)) {
    std::vector<const std::vector<double> *> pool = xs;
    pool.insert(pool.end(), ys.begin(), ys.end());
    bandwidth = median_pairwise_distance(pool);
    if (!(bandwidth > 0.0))
      throw EvalError("mmd: zero median pairwise distance; pass an explicit bandwidth");
  }
  const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);

  auto kernel_mean = [&](const std::vector<const std::vector<double> *> &u,
                         const std::vector<const std::vector<double> *> &v) {
    double acc = 0.0;
    for (const auto *x : u)
      for (const auto *y : v) acc += std::exp(-gamma * sq_distance(*x, *y));
    return acc / (static_cast<double>(u.size()) * static_cast<double>(v.size()));
  };

  const double mmd_sq = kernel_mean(xs, xs) + kernel_mean(ys, ys) - 2.0 * kernel_mean(xs, ys);
  return std::sqrt(std::max(0.0, mmd_sq));
}

std::vector<ConsensusLabel> consensus_labels(const std::vector<RatingTally> &ratings) {
  std::vector<ConsensusLabel> labels;
  labels.reserve(ratings.size());
  for (const RatingTally &r : ratings) {
    if (r.total == 0) throw EvalError("consensus_labels: zero rating total");
    const double mean = static_cast<double>(r.yes) / static_cast<double>(r.total);
    if (mean >= 0.7) labels.push_back(ConsensusLabel::usable);
    else if (mean <= 0.3) labels.push_back(ConsensusLabel::unusable);
    else labels.push_back(ConsensusLabel::unlabeled);
  }
  return labels;
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>> &rows) {
  if (rows.empty()) throw EvalError("Standardizer: empty dataset");
  const std::size_t dim = rows.front().size();
  Standardizer s;
  s.mean.assign(dim, 0.0);
  s.std_dev.assign(dim, 0.0);
  for (const auto &row : rows)
    for (std::size_t d = 0; d < dim; ++d) s.mean[d] += row[d];
  for (double &m : s.mean) m /= static_cast<double>(rows.size());
  for (const auto &row : rows)
    for (std::size_t d = 0; d < dim; ++d) {
      const double delta = row[d] - s.mean[d];
      s.std_dev[d] += delta * delta;
    }
  for (double &v : s.std_dev) {
    v = std::sqrt(v / static_cast<double>(rows.size()));
    if (!(v > 0.0)) v = 1.0; // constant dimension: identity transform
  }
  return s;
}

std::vector<double> Standardizer::apply(const std::vector<double> &row) const {
  std::vector<double> out(row.size());
  for (std::size_t d = 0; d < row.size(); ++d) out[d] = (row[d] - mean[d]) / std_dev[d];
  return out;
}

std::vector<std::vector<double>> Standardizer::apply_all(
    const std::vector<std::vector<double>> &rows) const {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto &row : rows) out.push_back(apply(row));
  return out;
}

} // namespace velo
