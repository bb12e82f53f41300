#include "manifold/iterative.hpp"

#include "manifold/distance.hpp"
#include "manifold/io.hpp"
#include "manifold/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>

namespace manifold {

namespace {

constexpr double kDistanceFloor = 1e-12;

void require_raw(const DistanceMatrix& dx) {
  if (dx.scale() != DistanceScale::Raw) {
    throw Error(ErrorCode::ScaleMismatch, "stress functions expect RAW input distances");
  }
}

void require_conforming(const DistanceMatrix& dx, const MatrixXd& y) {
  if (y.cols() != dx.size()) {
    throw Error(ErrorCode::ShapeError, "embedding has " + std::to_string(y.cols()) +
                                           " points, distances have " +
                                           std::to_string(dx.size()));
  }
}

}  // namespace

void write_stress_csv(std::ostream& out, const StressReport& report) {
  out << "iteration,stress,step_scale\n";
  for (std::size_t i = 0; i < report.stress.size(); ++i) {
    const double scale = i < report.step_scale.size() ? report.step_scale[i] : 0.0;
    out << i << ',' << format_double(report.stress[i]) << ',' << format_double(scale) << '\n';
  }
}

double metric_stress(const DistanceMatrix& dx, const Embedding& y, bool normalized) {
  require_raw(dx);
  require_conforming(dx, y.coordinates());
  const MatrixXd& c = y.coordinates();
  double num = 0.0;
  double den = 0.0;
  for (Index i = 1; i < dx.size(); ++i) {
    for (Index j = 0; j < i; ++j) {
      const double d = dx(i, j);
      const double e = d - (c.col(i) - c.col(j)).norm();
      num += e * e;
      den += d * d;
    }
  }
  if (!normalized) return std::sqrt(num);
  if (den == 0.0) {
    throw Error(ErrorCode::DegenerateInput, "normalized stress undefined for all-zero distances");
  }
  return std::sqrt(num / den);
}

StressObjective::StressObjective(const DistanceMatrix& dx, Kind kind, std::optional<int> neighbors)
    : kind_(kind), dx_(dx.values()) {
  require_raw(dx);
  const Index n = dx.size();
  MatrixXd mult = MatrixXd::Zero(n, n);
  if (neighbors) {
    const int k = *neighbors;
    if (k < 1 || k > n - 1) {
      throw Error(ErrorCode::InvalidK, "neighbor count " + std::to_string(k) + " outside [1, " +
                                           std::to_string(n - 1) + "]");
    }
    for (Index i = 0; i < n; ++i) {
      for (Index j : nearest_indices(dx_.col(i), k, i)) {
        mult(i, j) += 1.0;
        mult(j, i) += 1.0;
      }
    }
  } else {
    mult.setOnes();
    mult.diagonal().setZero();
  }

  double a = 0.0;
  coeff_ = MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double m = mult(i, j);
      if (m == 0.0) continue;
      const double d = dx_(i, j);
      double w = 1.0;
      switch (kind_) {
        case Kind::Sammon:
          if (d == 0.0) {
            throw Error(ErrorCode::DegenerateInput,
                        "coincident input points " + std::to_string(j) + " and " +
                            std::to_string(i) + " (Sammon weight 1/d undefined)");
          }
          w = 1.0 / d;
          a += m * d;
          break;
        case Kind::MetricNormalized:
          a += m * d * d;
          break;
        case Kind::MetricRaw:
          break;
      }
      coeff_(i, j) = m * w;
      coeff_(j, i) = m * w;
    }
  }
  if (kind_ == Kind::MetricRaw) a = 1.0;
  if (a == 0.0) {
    throw Error(ErrorCode::DegenerateInput, "all input distances are zero");
  }
  coeff_ /= a;
}

double StressObjective::cost(const MatrixXd& y) const {
  if (y.cols() != size()) throw Error(ErrorCode::ShapeError, "embedding size mismatch");
  const Index n = size();
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double c = coeff_(i, j);
      if (c == 0.0) continue;
      const double e = dx_(i, j) - (y.col(i) - y.col(j)).norm();
      total += c * e * e;
    }
  }
  return total;
}

double StressObjective::stress_from_cost(double cost) const {
  return kind_ == Kind::Sammon ? cost : std::sqrt(cost);
}

MatrixXd StressObjective::gradient(const MatrixXd& y) const {
  if (y.cols() != size()) throw Error(ErrorCode::ShapeError, "embedding size mismatch");
  const Index n = size();
  MatrixXd g = MatrixXd::Zero(y.rows(), n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double c = coeff_(i, j);
      if (c == 0.0) continue;
      const VectorXd diff = y.col(i) - y.col(j);
      const double dy = diff.norm();
      const double f = -2.0 * c * (dx_(i, j) - dy) / std::max(dy, kDistanceFloor);
      g.col(i) += f * diff;
      g.col(j) -= f * diff;
    }
  }
  return g;
}

MatrixXd StressObjective::hessian_diag(const MatrixXd& y) const {
  if (y.cols() != size()) throw Error(ErrorCode::ShapeError, "embedding size mismatch");
  const Index n = size();
  MatrixXd h = MatrixXd::Zero(y.rows(), n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double c = coeff_(i, j);
      if (c == 0.0) continue;
      const VectorXd diff = y.col(i) - y.col(j);
      const double dy = diff.norm();
      const double dyf = std::max(dy, kDistanceFloor);
      const double d = dx_(i, j);
      const double base = (d - dy) / dyf;
      const double curv = d / (dyf * dyf * dyf);
      for (Index k = 0; k < y.rows(); ++k) {
        const double term = -2.0 * c * (base - curv * diff(k) * diff(k));
        h(k, i) += term;
        h(k, j) += term;
      }
    }
  }
  return h;
}

double sammon_cost(const DistanceMatrix& dx, const Embedding& y) {
  require_conforming(dx, y.coordinates());
  return StressObjective(dx, StressObjective::Kind::Sammon).cost(y.coordinates());
}

MatrixXd sammon_gradient(const DistanceMatrix& dx, const Embedding& y) {
  require_conforming(dx, y.coordinates());
  return StressObjective(dx, StressObjective::Kind::Sammon).gradient(y.coordinates());
}

MatrixXd sammon_hessian_diag(const DistanceMatrix& dx, const Embedding& y) {
  require_conforming(dx, y.coordinates());
  return StressObjective(dx, StressObjective::Kind::Sammon).hessian_diag(y.coordinates());
}

std::vector<double> isotonic_regression(std::span<const double> values) {
  struct Block {
    double sum;
    double count;
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (double v : values) {
    blocks.push_back({v, 1.0});
    while (blocks.size() > 1) {
      const Block& last = blocks.back();
      const Block& prev = blocks[blocks.size() - 2];
      if (prev.sum / prev.count <= last.sum / last.count) break;
      const Block merged{prev.sum + last.sum, prev.count + last.count};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) {
    const double mean = b.sum / b.count;
    for (int i = 0; i < static_cast<int>(b.count); ++i) out.push_back(mean);
  }
  return out;
}

namespace {

struct Problem {
  std::function<double(const MatrixXd&)> cost;
  std::function<double(double)> stress_from_cost;
  /// Proposed (unscaled) step for the current configuration.
  std::function<MatrixXd(const MatrixXd&)> step;
  /// Applied to every accepted configuration; must not change the cost.
  std::function<void(MatrixXd&)> normalize;
};

IterativeFit descend(const Problem& problem, MatrixXd y, const IterConfig& cfg) {
  if (cfg.max_iters < 1) throw Error(ErrorCode::InvalidConfig, "max_iters must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "learning rate must be > 0");

  StressReport report;
  double cost = problem.cost(y);
  report.stress.push_back(problem.stress_from_cost(cost));
  report.step_scale.push_back(0.0);

  for (int it = 0; it < cfg.max_iters; ++it) {
    if (cost == 0.0) {
      report.converged = true;
      break;
    }
    const MatrixXd step = problem.step(y);
    if (!step.allFinite() || step.cwiseAbs().maxCoeff() == 0.0) {
      report.converged = step.allFinite();
      break;
    }
    double scale = 1.0;
    bool accepted = false;
    MatrixXd candidate;
    double candidate_cost = cost;
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      candidate = y + scale * step;
      candidate_cost = problem.cost(candidate);
      if (std::isfinite(candidate_cost) && candidate_cost <= cost) {
        accepted = true;
        break;
      }
      scale *= 0.5;
      ++report.halvings;
    }
    if (!accepted) break;

    if (problem.normalize) problem.normalize(candidate);
    const double rel = (cost - candidate_cost) / cost;
    y = std::move(candidate);
    cost = candidate_cost;
    ++report.iterations;
    report.stress.push_back(problem.stress_from_cost(cost));
    report.step_scale.push_back(scale);
    if (rel < cfg.tolerance) {
      report.converged = true;
      break;
    }
  }
  report.final_stress = report.stress.back();
  return {Embedding(std::move(y)), std::move(report)};
}

MatrixXd random_configuration(Index p, Index n, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, spread > 0.0 ? spread : 1e-2);
  MatrixXd y(p, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < p; ++k) y(k, j) = normal(rng);
  }
  return y;
}

MatrixXd initial_configuration(const DistanceMatrix& dx, Index p, const IterConfig& cfg,
                               const std::optional<Embedding>& init) {
  const Index n = dx.size();
  if (p < 1 || p > n) {
    throw Error(ErrorCode::InvalidDimension, "embedding dimension " + std::to_string(p) +
                                                 " outside [1, " + std::to_string(n) + "]");
  }
  if (init) {
    if (init->dim() != p || init->size() != n) {
      throw Error(ErrorCode::ShapeError, "initial configuration has the wrong shape");
    }
    return init->coordinates();
  }
  const double spread = 1e-2 * std::sqrt(dx.values().array().square().mean());
  try {
    MatrixXd y = classical_mds_from_distances(dx, p).coordinates();
    if (y.cwiseAbs().maxCoeff() > 0.0) return y;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NumericalFailure && e.code() != ErrorCode::InvalidMatrix) throw;
  }
  return random_configuration(p, n, spread, cfg.seed);
}

IterativeFit fit_weighted(const DistanceMatrix& dx, Index p, const IterConfig& cfg,
                          StressObjective::Kind kind, const std::optional<Embedding>& init) {
  const StressObjective objective(dx, kind, cfg.neighbors);
  MatrixXd y = initial_configuration(dx, p, cfg, init);

  Problem problem;
  problem.cost = [&](const MatrixXd& c) { return objective.cost(c); };
  problem.stress_from_cost = [&](double c) { return objective.stress_from_cost(c); };
  problem.step = [&](const MatrixXd& c) -> MatrixXd {
    const MatrixXd g = objective.gradient(c);
    if (cfg.optimizer == Optimizer::GradientDescent) return -cfg.learning_rate * g;
    MatrixXd h = objective.hessian_diag(c).cwiseAbs();
    const double floor = std::max(1e-12 * h.maxCoeff(), 1e-300);
    h = h.cwiseMax(floor);
    return -cfg.learning_rate * g.cwiseQuotient(h);
  };
  return descend(problem, std::move(y), cfg);
}

}  // namespace

IterativeFit fit_sammon(const DistanceMatrix& dx, Index p, const IterConfig& cfg,
                        const std::optional<Embedding>& init) {
  return fit_weighted(dx, p, cfg, StressObjective::Kind::Sammon, init);
}

IterativeFit fit_sammon(const DataMatrix& x, Index p, const IterConfig& cfg) {
  const DistanceMatrix dx = pairwise_euclidean(x, DistanceScale::Raw);
  std::optional<Embedding> init;
  if (p <= x.size()) {
    try {
      auto fit = fit_classical_mds(x, p);
      if (fit.second.coordinates().cwiseAbs().maxCoeff() > 0.0) init = std::move(fit.second);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NumericalFailure) throw;
    }
  }
  return fit_sammon(dx, p, cfg, init);
}

IterativeFit fit_metric_mds(const DistanceMatrix& dx, Index p, const IterConfig& cfg,
                            bool normalized, const std::optional<Embedding>& init) {
  return fit_weighted(dx, p, cfg,
                      normalized ? StressObjective::Kind::MetricNormalized
                                 : StressObjective::Kind::MetricRaw,
                      init);
}

namespace {

struct PairSet {
  std::vector<Index> first;
  std::vector<Index> second;
  std::vector<double> dx;
};

PairSet all_pairs(const DistanceMatrix& dx) {
  PairSet pairs;
  const Index n = dx.size();
  for (Index i = 1; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      pairs.first.push_back(i);
      pairs.second.push_back(j);
      pairs.dx.push_back(dx(i, j));
    }
  }
  return pairs;
}

struct NonmetricState {
  double raw_stress = 0.0;  // S = sum (dy - dhat)^2 / sum dy^2
  std::vector<double> dy;
  std::vector<double> disparity;
};

NonmetricState evaluate_nonmetric(const PairSet& pairs, const MatrixXd& y) {
  const std::size_t count = pairs.dx.size();
  NonmetricState state;
  state.dy.resize(count);
  for (std::size_t q = 0; q < count; ++q) {
    state.dy[q] = (y.col(pairs.first[q]) - y.col(pairs.second[q])).norm();
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // ties in dx are ordered by dy so they never count as violations
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pairs.dx[a] != pairs.dx[b]) return pairs.dx[a] < pairs.dx[b];
    if (state.dy[a] != state.dy[b]) return state.dy[a] < state.dy[b];
    return a < b;
  });
  std::vector<double> sorted(count);
  for (std::size_t q = 0; q < count; ++q) sorted[q] = state.dy[order[q]];
  const std::vector<double> fitted = isotonic_regression(sorted);
  state.disparity.resize(count);
  for (std::size_t q = 0; q < count; ++q) state.disparity[order[q]] = fitted[q];

  double num = 0.0;
  double den = 0.0;
  for (std::size_t q = 0; q < count; ++q) {
    const double e = state.dy[q] - state.disparity[q];
    num += e * e;
    den += state.dy[q] * state.dy[q];
  }
  state.raw_stress = den > 0.0 ? num / den : 1.0;
  return state;
}

}  // namespace

double nonmetric_stress(const DistanceMatrix& dx, const Embedding& y) {
  require_raw(dx);
  require_conforming(dx, y.coordinates());
  return std::sqrt(evaluate_nonmetric(all_pairs(dx), y.coordinates()).raw_stress);
}

IterativeFit fit_nonmetric_mds(const DistanceMatrix& dx, Index p, const IterConfig& cfg,
                               const std::optional<Embedding>& init) {
  require_raw(dx);
  const PairSet pairs = all_pairs(dx);
  double target_scale = 0.0;
  for (double d : pairs.dx) target_scale += d * d;
  if (target_scale == 0.0) {
    throw Error(ErrorCode::DegenerateInput, "all input distances are zero");
  }
  MatrixXd y = initial_configuration(dx, p, cfg, init);

  Problem problem;
  problem.cost = [&](const MatrixXd& c) { return evaluate_nonmetric(pairs, c).raw_stress; };
  problem.stress_from_cost = [](double c) { return std::sqrt(c); };
  problem.step = [&](const MatrixXd& c) -> MatrixXd {
    const NonmetricState state = evaluate_nonmetric(pairs, c);
    double total = 0.0;
    for (double d : state.dy) total += d * d;
    if (total == 0.0) return MatrixXd::Zero(c.rows(), c.cols());
    MatrixXd g = MatrixXd::Zero(c.rows(), c.cols());
    for (std::size_t q = 0; q < state.dy.size(); ++q) {
      const Index i = pairs.first[q];
      const Index j = pairs.second[q];
      const VectorXd diff = c.col(i) - c.col(j);
      const double dy = std::max(state.dy[q], kDistanceFloor);
      // d/dy_i of (sum (dy - dhat)^2 - S sum dy^2) / sum dy^2, dhat held fixed
      const double f =
          2.0 * ((state.dy[q] - state.disparity[q]) / dy - state.raw_stress) / total;
      g.col(i) += f * diff;
      g.col(j) -= f * diff;
    }
    const double gnorm = g.norm();
    if (gnorm == 0.0) return g;
    return (-cfg.learning_rate * c.norm() / gnorm) * g;
  };
  problem.normalize = [&](MatrixXd& c) {
    c.colwise() -= c.rowwise().mean();
    double current = 0.0;
    for (std::size_t q = 0; q < pairs.dx.size(); ++q) {
      current += (c.col(pairs.first[q]) - c.col(pairs.second[q])).squaredNorm();
    }
    if (current > 0.0) c *= std::sqrt(target_scale / current);
  };
  return descend(problem, std::move(y), cfg);
}

}  // namespace manifold
