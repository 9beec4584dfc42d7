#include "velo/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

namespace velo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBig = 1e32; // finite stand-in for failed evaluations

double sanitize(double v) { return std::isfinite(v) ? std::min(v, kBig) : kBig; }

/// a dominates b under constraint domination.
bool dominates(const ObjectivePoint &oa, double va, const ObjectivePoint &ob, double vb) {
  const bool fa = va <= 0.0, fb = vb <= 0.0;
  if (fa != fb) return fa;
  if (!fa) return va < vb;
  bool strictly_better = false;
  for (std::size_t d = 0; d < oa.size(); ++d) {
    if (oa[d] > ob[d]) return false;
    if (oa[d] < ob[d]) strictly_better = true;
  }
  return strictly_better;
}

} // namespace

std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<ObjectivePoint> &points,
                                                        const std::vector<double> &violations) {
  const std::size_t n = points.size();
  if (violations.size() != n) throw EvalError("nondominated_sort: length mismatch");

  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> domination_count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(points[i], violations[i], points[j], violations[j])) {
        dominated_by[i].push_back(j);
        ++domination_count[j];
      } else if (dominates(points[j], violations[j], points[i], violations[i])) {
        dominated_by[j].push_back(i);
        ++domination_count[i];
      }
    }
  }

  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i)
    if (domination_count[i] == 0) current.push_back(i);
  while (!current.empty()) {
    fronts.push_back(current);
    std::vector<std::size_t> next;
    for (std::size_t i : current)
      for (std::size_t j : dominated_by[i])
        if (--domination_count[j] == 0) next.push_back(j);
    std::sort(next.begin(), next.end());
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(const std::vector<ObjectivePoint> &front) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n == 0) return dist;
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), kInf);
    return dist;
  }
  const std::size_t dims = front.front().size();
  std::vector<std::size_t> order(n);
  for (std::size_t d = 0; d < dims; ++d) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return front[a][d] < front[b][d];
    });
    const double span = front[order.back()][d] - front[order.front()][d];
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    if (span <= 0.0) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (std::isinf(dist[order[k]])) continue;
      dist[order[k]] += (front[order[k + 1]][d] - front[order[k - 1]][d]) / span;
    }
  }
  return dist;
}

Member evaluate_member(const Problem &problem, Design design) {
  Member m;
  m.design = std::move(design);
  m.objectives.assign(problem.n_objectives, kBig);
  m.constraints.assign(problem.n_constraints, kBig);
  try {
    problem.evaluate(m.design, m.objectives, m.constraints);
  } catch (const std::exception &) {
    // failed evaluation: worst-case criteria already in place
  }
  for (double &v : m.objectives) v = sanitize(v);
  for (double &v : m.constraints) v = sanitize(v);
  m.violation = 0.0;
  for (std::size_t i = 0; i < m.constraints.size(); ++i)
    m.violation += std::max(0.0, m.constraints[i] / problem.weights.constraints[i]);
  m.aggregate = aggregate_quality(m.objectives, m.constraints, problem.weights, problem.penalty);
  return m;
}

namespace {

struct RankedPopulation {
  std::vector<std::size_t> rank;
  std::vector<double> crowding;
};

RankedPopulation rank_population(const std::vector<Member> &members) {
  std::vector<ObjectivePoint> pts;
  std::vector<double> vio;
  pts.reserve(members.size());
  vio.reserve(members.size());
  for (const Member &m : members) {
    pts.push_back(m.objectives);
    vio.push_back(m.violation);
  }
  const auto fronts = nondominated_sort(pts, vio);
  RankedPopulation out;
  out.rank.assign(members.size(), 0);
  out.crowding.assign(members.size(), 0.0);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    std::vector<ObjectivePoint> front_pts;
    front_pts.reserve(fronts[f].size());
    for (std::size_t idx : fronts[f]) front_pts.push_back(pts[idx]);
    const std::vector<double> cd = crowding_distance(front_pts);
    for (std::size_t k = 0; k < fronts[f].size(); ++k) {
      out.rank[fronts[f][k]] = f;
      out.crowding[fronts[f][k]] = cd[k];
    }
  }
  return out;
}

class MixedVariation {
public:
  MixedVariation(const DesignSchema &schema, const Nsga2Config &cfg)
      : schema_(schema), cfg_(cfg),
        mutation_rate_(cfg.mutation_rate > 0.0 ? cfg.mutation_rate
                                               : 1.0 / static_cast<double>(schema.size())) {}

  std::pair<Design, Design> crossover(const Design &a, const Design &b, std::mt19937_64 &rng) {
    Design c1 = a, c2 = b;
    if (unit_(rng) > cfg_.crossover_rate) return {c1, c2};
    for (std::size_t i = 0; i < schema_.size(); ++i) {
      const ParameterSpec &p = schema_.param(i);
      if (p.kind == ParamKind::continuous || p.kind == ParamKind::integer) {
        if (unit_(rng) < 0.5) sbx(p, a.raw(i), b.raw(i), c1, c2, i, rng);
      } else {
        if (unit_(rng) < 0.5) { // uniform crossover: swap genes
          c1.set_raw(i, b.raw(i));
          c2.set_raw(i, a.raw(i));
        }
      }
    }
    return {c1, c2};
  }

  void mutate(Design &d, std::mt19937_64 &rng) {
    for (std::size_t i = 0; i < schema_.size(); ++i) {
      if (unit_(rng) >= mutation_rate_) continue;
      const ParameterSpec &p = schema_.param(i);
      switch (p.kind) {
      case ParamKind::continuous:
        d.set_raw(i, polynomial(p, d.raw(i), rng));
        break;
      case ParamKind::integer:
        d.set_raw(i, std::clamp(std::round(polynomial(p, d.raw(i), rng)), p.lower, p.upper));
        break;
      case ParamKind::boolean:
        d.set_raw(i, d.raw(i) >= 0.5 ? 0.0 : 1.0);
        break;
      case ParamKind::categorical: {
        const std::size_t k = p.category_count();
        if (k < 2) break;
        std::uniform_int_distribution<std::size_t> pick(0, k - 2);
        std::size_t cat = pick(rng);
        if (cat >= d.category(i)) ++cat; // resample among the other labels
        d.set_raw(i, static_cast<double>(cat));
        break;
      }
      }
    }
  }

private:
  void sbx(const ParameterSpec &p, double x1, double x2, Design &c1, Design &c2, std::size_t i,
           std::mt19937_64 &rng) {
    const double u = unit_(rng);
    const double eta = cfg_.sbx_eta;
    const double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                                 : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
    double y1 = 0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2);
    double y2 = 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2);
    y1 = std::clamp(y1, p.lower, p.upper);
    y2 = std::clamp(y2, p.lower, p.upper);
    if (p.kind == ParamKind::integer) {
      y1 = std::clamp(std::round(y1), p.lower, p.upper);
      y2 = std::clamp(std::round(y2), p.lower, p.upper);
    }
    c1.set_raw(i, y1);
    c2.set_raw(i, y2);
  }

  double polynomial(const ParameterSpec &p, double x, std::mt19937_64 &rng) {
    const double range = p.upper - p.lower;
    if (range <= 0.0) return x;
    const double u = unit_(rng);
    const double eta = cfg_.mutation_eta;
    double delta;
    if (u < 0.5) {
      delta = std::pow(2.0 * u, 1.0 / (eta + 1.0)) - 1.0;
    } else {
      delta = 1.0 - std::pow(2.0 * (1.0 - u), 1.0 / (eta + 1.0));
    }
    return std::clamp(x + delta * range, p.lower, p.upper);
  }

  const DesignSchema &schema_;
  const Nsga2Config &cfg_;
  double mutation_rate_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

std::size_t tournament_pick(const RankedPopulation &ranked, std::mt19937_64 &rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const std::size_t a = pick(rng), b = pick(rng);
  if (ranked.rank[a] != ranked.rank[b]) return ranked.rank[a] < ranked.rank[b] ? a : b;
  if (ranked.crowding[a] != ranked.crowding[b])
    return ranked.crowding[a] > ranked.crowding[b] ? a : b;
  return a;
}

} // namespace

Population nsga2(const Problem &problem, const Nsga2Config &config) {
  if (!problem.schema || !problem.evaluate) throw EvalError("nsga2: incomplete problem");
  if (config.population < 2 || config.population % 2 != 0)
    throw EvalError("nsga2: population size must be even and at least 2");

  const DesignSchema &schema = *problem.schema;
  MixedVariation variation(schema, config);

  auto evaluate_all = [&](std::vector<Design> &&designs) {
    std::vector<Member> members(designs.size());
    parallel_for(designs.size(), [&](std::size_t i) {
      members[i] = evaluate_member(problem, std::move(designs[i]));
    });
    return members;
  };

  Population pop;
  pop.seed = config.seed;
  pop.generation = config.initial_generation;
  if (!config.initial_population.empty()) {
    if (config.initial_population.size() != config.population)
      throw EvalError("nsga2: initial population size does not match config");
    std::vector<Design> init = config.initial_population;
    pop.members = evaluate_all(std::move(init));
  } else {
    pop.members =
        evaluate_all(sample_uniform(schema, config.population, split_seed(config.seed, 1)));
  }

  // Incumbent: best feasible aggregate seen; survival never drops it.
  std::optional<Member> incumbent;
  auto update_incumbent = [&]() {
    for (const Member &m : pop.members)
      if (m.feasible() && (!incumbent || m.aggregate < incumbent->aggregate)) incumbent = m;
  };
  update_incumbent();
  if (config.on_generation) config.on_generation(pop);

  for (std::size_t gen = config.initial_generation + 1; gen <= config.generations; ++gen) {
    // Per-generation stream: variation depends only on (seed, gen) and the
    // current population, which makes checkpoint resume exact.
    std::mt19937_64 rng(split_seed(config.seed, 1000 + gen));
    const RankedPopulation ranked = rank_population(pop.members);

    std::vector<Design> offspring;
    offspring.reserve(config.population);
    while (offspring.size() < config.population) {
      const std::size_t pa = tournament_pick(ranked, rng, pop.members.size());
      const std::size_t pb = tournament_pick(ranked, rng, pop.members.size());
      auto [c1, c2] = variation.crossover(pop.members[pa].design, pop.members[pb].design, rng);
      variation.mutate(c1, rng);
      variation.mutate(c2, rng);
      offspring.push_back(std::move(c1));
      if (offspring.size() < config.population) offspring.push_back(std::move(c2));
    }

    std::vector<Member> combined = std::move(pop.members);
    std::vector<Member> children = evaluate_all(std::move(offspring));
    for (Member &m : children) combined.push_back(std::move(m));

    // (mu+lambda) survival by fronts, last front by crowding.
    std::vector<ObjectivePoint> pts;
    std::vector<double> vio;
    pts.reserve(combined.size());
    vio.reserve(combined.size());
    for (const Member &m : combined) {
      pts.push_back(m.objectives);
      vio.push_back(m.violation);
    }
    const auto fronts = nondominated_sort(pts, vio);
    std::vector<std::size_t> selected;
    selected.reserve(config.population);
    for (const auto &front : fronts) {
      if (selected.size() + front.size() <= config.population) {
        selected.insert(selected.end(), front.begin(), front.end());
      } else {
        std::vector<ObjectivePoint> front_pts;
        front_pts.reserve(front.size());
        for (std::size_t idx : front) front_pts.push_back(pts[idx]);
        const std::vector<double> cd = crowding_distance(front_pts);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
        for (std::size_t k = 0; selected.size() < config.population; ++k)
          selected.push_back(front[order[k]]);
      }
      if (selected.size() >= config.population) break;
    }

    std::vector<Member> next;
    next.reserve(config.population);
    for (std::size_t idx : selected) next.push_back(std::move(combined[idx]));

    if (incumbent) {
      bool covered = false;
      for (const Member &m : next)
        if (m.feasible() && m.aggregate <= incumbent->aggregate) { covered = true; break; }
      if (!covered) next.back() = *incumbent;
    }

    pop.members = std::move(next);
    pop.generation = gen;
    update_incumbent();
    if (config.on_generation) config.on_generation(pop);
  }
  return pop;
}

namespace {

double penalty_loss(const BoxObjective &obj, std::span<const double> x, double penalty_weight,
                    std::vector<double> &obj_buf, std::vector<double> &con_buf, bool *feasible) {
  obj.evaluate(x, obj_buf, con_buf);
  double loss = 0.0;
  for (double v : obj_buf) loss += v;
  bool ok = true;
  for (double v : con_buf) {
    const double h = std::max(0.0, v);
    loss += penalty_weight * h * h;
    ok = ok && v <= 0.0;
  }
  if (feasible) *feasible = ok;
  return loss;
}

} // namespace

GradResult grad_penalty_descent(const BoxObjective &objective, const GradConfig &config) {
  if (!objective.evaluate || objective.dim == 0)
    throw EvalError("grad_penalty_descent: incomplete objective");
  const std::size_t dim = objective.dim;

  GradResult result;
  result.points.resize(config.starts);
  result.losses.assign(config.starts, kInf);
  std::vector<std::size_t> restart_counts(config.starts, 0);

  // A quadratic hinge settles a hair outside the boundary, so each chain
  // also remembers its best iterate with feasibility taking precedence
  // over loss. With a zero penalty weight the run is explicitly
  // unconstrained and the preference is dropped.
  const bool prefer_feasible = config.penalty_weight > 0.0;

  parallel_for(config.starts, [&](std::size_t chain) {
    std::vector<double> obj_buf(objective.n_objectives), con_buf(objective.n_constraints);
    auto to_x = [&](const std::vector<double> &u) {
      std::vector<double> x(dim);
      for (std::size_t i = 0; i < dim; ++i)
        x[i] = objective.lower[i] + u[i] * (objective.upper[i] - objective.lower[i]);
      return x;
    };
    auto loss_at = [&](const std::vector<double> &u, bool *feasible = nullptr) {
      return penalty_loss(objective, to_x(u), config.penalty_weight, obj_buf, con_buf, feasible);
    };

    for (std::size_t attempt = 0;; ++attempt) {
      std::mt19937_64 rng(split_seed(config.seed, chain + attempt * 7919));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<double> u(dim);
      for (double &v : u) v = unit(rng);

      bool feasible = false;
      double loss = loss_at(u, &feasible);
      if (!std::isfinite(loss)) {
        if (attempt >= 8) { // give up on a pathological chain
          result.points[chain] = u;
          result.losses[chain] = loss;
          break;
        }
        ++restart_counts[chain];
        continue;
      }
      if (config.on_step) config.on_step(chain, 0, loss);

      bool best_feasible = feasible;
      double best_loss = loss;
      std::vector<double> best_u = u;
      auto consider = [&](const std::vector<double> &point, double point_loss, bool point_ok) {
        const bool better = prefer_feasible && point_ok != best_feasible
                                ? point_ok
                                : point_loss < best_loss;
        if (better) {
          best_feasible = point_ok;
          best_loss = point_loss;
          best_u = point;
        }
      };

      std::vector<double> grad(dim), candidate(dim);
      bool diverged = false;
      // Line-search memory: the accepted step scale carries over and is
      // allowed to grow back, so stiff penalty regions do not pin the
      // whole run to a tiny step.
      double t_start = config.learning_rate;
      for (std::size_t step = 0; step < config.steps; ++step) {
        double grad_norm_sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          const double u0 = u[i];
          const double up = std::min(1.0, u0 + config.fd_step);
          const double dn = std::max(0.0, u0 - config.fd_step);
          if (up == dn) { grad[i] = 0.0; continue; }
          u[i] = up;
          const double f_up = loss_at(u);
          u[i] = dn;
          const double f_dn = loss_at(u);
          u[i] = u0;
          if (!std::isfinite(f_up) || !std::isfinite(f_dn)) { diverged = true; break; }
          grad[i] = (f_up - f_dn) / (up - dn);
          grad_norm_sq += grad[i] * grad[i];
        }
        if (diverged || grad_norm_sq == 0.0) break;

        double t = t_start;
        bool accepted = false;
        for (std::size_t bt = 0; bt < config.max_backtracks; ++bt) {
          for (std::size_t i = 0; i < dim; ++i)
            candidate[i] = std::clamp(u[i] - t * grad[i], 0.0, 1.0);
          bool cand_ok = false;
          const double cand_loss = loss_at(candidate, &cand_ok);
          if (std::isfinite(cand_loss) &&
              cand_loss <= loss - config.armijo_c * t * grad_norm_sq) {
            u = candidate;
            loss = cand_loss;
            consider(u, loss, cand_ok);
            accepted = true;
            break;
          }
          t *= 0.5;
        }
        if (!accepted) break; // no descent direction at this scale
        t_start = std::min(config.learning_rate, t * 2.0);
        if (config.on_step) config.on_step(chain, step + 1, loss);
      }

      if (diverged && attempt < 8) {
        ++restart_counts[chain];
        continue;
      }
      result.points[chain] = to_x(best_u);
      result.losses[chain] = best_loss;
      break;
    }
  });

  for (std::size_t c : restart_counts) result.restarts += c;
  return result;
}

std::vector<Design> grad_penalty_descent(const Problem &problem, const GradConfig &config) {
  if (!problem.schema || !problem.evaluate)
    throw EvalError("grad_penalty_descent: incomplete problem");
  const DesignSchema &schema = *problem.schema;

  BoxObjective box;
  box.dim = schema.continuous_dim();
  box.n_objectives = problem.n_objectives;
  box.n_constraints = problem.n_constraints;
  box.lower.assign(box.dim, 0.0);
  box.upper.assign(box.dim, 1.0);
  std::size_t slot = 0;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const ParameterSpec &p = schema.param(i);
    for (std::size_t k = 0; k < p.slot_width(); ++k, ++slot) {
      if (p.kind == ParamKind::continuous || p.kind == ParamKind::integer) {
        box.lower[slot] = p.lower;
        box.upper[slot] = p.upper;
      }
    }
  }
  box.evaluate = [&problem, &schema](std::span<const double> x, std::span<double> objs,
                                     std::span<double> cons) {
    ContinuousVector vec(x.begin(), x.end());
    const Design design = decode_continuous(vec, schema);
    std::vector<double> raw_obj(problem.n_objectives), raw_con(problem.n_constraints);
    problem.evaluate(design, raw_obj, raw_con);
    for (std::size_t i = 0; i < raw_obj.size(); ++i)
      objs[i] = raw_obj[i] / problem.weights.objectives[i];
    for (std::size_t i = 0; i < raw_con.size(); ++i)
      cons[i] = raw_con[i] / problem.weights.constraints[i];
  };

  const GradResult result = grad_penalty_descent(box, config);
  std::vector<Design> designs;
  designs.reserve(result.points.size());
  for (const auto &x : result.points)
    designs.push_back(decode_continuous(ContinuousVector(x.begin(), x.end()), schema));
  return designs;
}

} // namespace velo
