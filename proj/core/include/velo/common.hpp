#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace velo {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

/// Raised when a schema file or schema definition violates its invariants.
class SchemaError : public std::runtime_error {
public:
  explicit SchemaError(const std::string &what) : std::runtime_error(what) {}
};

/// Raised when an evaluator cannot produce a value (degenerate geometry,
/// zero-norm embedding, degenerate tube section, ...).
class EvalError : public std::runtime_error {
public:
  explicit EvalError(const std::string &what) : std::runtime_error(what) {}
};

/// Raised on malformed input files (CSV/JSON designs, conditions, configs).
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string &what) : std::runtime_error(what) {}
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Angle between two vectors in degrees, clamped to [0, 180].
inline double angle_between_deg(Vec2 a, Vec2 b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

/// Worker count for parallel loops: VELOBENCH_WORKERS env var if set,
/// otherwise hardware concurrency. Results never depend on the value.
unsigned worker_count();

/// Static-partition parallel loop. fn(i) must only write to state owned by
/// index i; the partitioning is deterministic and the combined result is
/// identical to a sequential run.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

/// Deterministic stream-splitting for seeds: combines a base seed with a
/// stream index so sub-runs get independent, reproducible generators.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace velo
