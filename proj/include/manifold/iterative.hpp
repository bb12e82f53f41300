#pragma once

#include "manifold/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace manifold {

enum class Optimizer { GradientDescent, DiagonalQuasiNewton };

struct IterConfig {
  int max_iters = 500;
  /// Sammon's "magic factor".
  double learning_rate = 0.3;
  Optimizer optimizer = Optimizer::DiagonalQuasiNewton;
  /// Stop when the relative stress decrease of an accepted step drops below this.
  double tolerance = 1e-7;
  std::uint64_t seed = 0;
  /// Restrict pair sums to each point's k nearest input neighbors.
  std::optional<int> neighbors;
  int max_halvings = 20;
};

struct StressReport {
  /// stress[0] is the initial configuration; one entry per accepted step after.
  std::vector<double> stress;
  /// Step multiplier that was accepted (1 = full step, 0.5^h after h halvings).
  std::vector<double> step_scale;
  double final_stress = 0.0;
  int iterations = 0;
  int halvings = 0;
  bool converged = false;
};

void write_stress_csv(std::ostream& out, const StressReport& report);

/// Normalized: sqrt(sum (dx-dy)^2 / sum dx^2); otherwise sqrt(sum (dx-dy)^2).
/// Sums run over pairs j < i.
double metric_stress(const DistanceMatrix& dx, const Embedding& y, bool normalized);

double sammon_cost(const DistanceMatrix& dx, const Embedding& y);
MatrixXd sammon_gradient(const DistanceMatrix& dx, const Embedding& y);
MatrixXd sammon_hessian_diag(const DistanceMatrix& dx, const Embedding& y);

/// Weighted distance-mismatch objective
///   (1/a) sum_pairs m_ij w_ij (dx_ij - dy_ij)^2
/// shared by Sammon mapping (w = 1/dx, a = sum dx) and metric MDS (w = 1,
/// a = sum dx^2 or 1). With a neighbor count k, the pairs are the ordered
/// (i, j in kNN(i)) pairs and a is summed over the same set.
class StressObjective {
 public:
  enum class Kind { Sammon, MetricNormalized, MetricRaw };

  StressObjective(const DistanceMatrix& dx, Kind kind, std::optional<int> neighbors = {});

  Kind kind() const noexcept { return kind_; }
  Index size() const noexcept { return dx_.rows(); }

  double cost(const MatrixXd& y) const;
  /// Reported stress for a cost value: the cost itself for Sammon, its
  /// square root for metric MDS.
  double stress_from_cost(double cost) const;
  MatrixXd gradient(const MatrixXd& y) const;
  MatrixXd hessian_diag(const MatrixXd& y) const;

 private:
  Kind kind_;
  MatrixXd dx_;
  /// m_ij w_ij / a, zero on the diagonal and on inactive pairs.
  MatrixXd coeff_;
};

/// Nondecreasing least-squares fit by pool-adjacent-violators.
std::vector<double> isotonic_regression(std::span<const double> values);

using IterativeFit = std::pair<Embedding, StressReport>;

IterativeFit fit_sammon(const DistanceMatrix& dx, Index p, const IterConfig& cfg,
                        const std::optional<Embedding>& init = {});
IterativeFit fit_sammon(const DataMatrix& x, Index p, const IterConfig& cfg);

IterativeFit fit_metric_mds(const DistanceMatrix& dx, Index p, const IterConfig& cfg,
                            bool normalized = true, const std::optional<Embedding>& init = {});

/// Kruskal stress-1 of a configuration: disparities are the isotonic fit of
/// the embedded distances taken in increasing input-distance order.
double nonmetric_stress(const DistanceMatrix& dx, const Embedding& y);

IterativeFit fit_nonmetric_mds(const DistanceMatrix& dx, Index p, const IterConfig& cfg,
                               const std::optional<Embedding>& init = {});

}  // namespace manifold
