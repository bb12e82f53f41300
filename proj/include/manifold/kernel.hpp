#pragma once

#include "manifold/core.hpp"

namespace manifold {

enum class KernelKind { Linear, Cosine, Rbf, Geodesic };

const char* to_string(KernelKind kind);

struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  /// RBF width sigma; <= 0 means "use the median pairwise distance".
  double bandwidth = 0.0;
  /// kNN size for GEODESIC.
  int k = 0;

  static KernelSpec linear() { return {KernelKind::Linear, 0.0, 0}; }
  static KernelSpec cosine() { return {KernelKind::Cosine, 0.0, 0}; }
  static KernelSpec rbf(double sigma = 0.0) { return {KernelKind::Rbf, sigma, 0}; }
  static KernelSpec geodesic(int k) { return {KernelKind::Geodesic, 0.0, k}; }
};

struct IsomapCorrection {
  double c_star = 0.0;
  double c_used = 0.0;
};

/// Median of the off-diagonal RAW pairwise distances.
double median_pairwise_distance(const DataMatrix& x);

/// LINEAR: Gram matrix of the centered points. COSINE: normalized inner
/// products. RBF: exp(-|xi-xj|^2 / (2 sigma^2)). GEODESIC: -1/2 H (D^g)^2 H.
KernelMatrix build_kernel(const DataMatrix& x, const KernelSpec& spec);

/// Kernel between training columns (rows of the result) and query columns.
/// LINEAR uses the raw inner product; callers center points first if needed.
/// GEODESIC is not supported here (needs graph state).
MatrixXd cross_kernel(const MatrixXd& train, const MatrixXd& query, const KernelSpec& spec);

/// Largest real part among the eigenvalues of
///   [[0, 2 K(D^2)], [-I, -4 K(D)]]
/// and the shift actually applied, c_star + 1e-6 |c_star|.
IsomapCorrection kernel_isomap_cstar(const KernelMatrix& k_d2, const KernelMatrix& k_d);

/// K' = K(D^2) + 2c K(D) + c^2/2 H with c = corr.c_used.
KernelMatrix kernel_isomap_correct(const KernelMatrix& k_d2, const KernelMatrix& k_d,
                                   const IsomapCorrection& corr);

namespace detail {
/// K' for an arbitrary shift c, no c >= c* check.
KernelMatrix apply_isomap_shift(const KernelMatrix& k_d2, const KernelMatrix& k_d, double c);
}  // namespace detail

/// Centers a train-vs-test kernel K_t (n x n_t) against the training kernel K:
///   K_t - 1/n 1 1^T K_t - 1/n K 1 1^T + 1/n^2 1 1^T K 1 1^T
MatrixXd center_oos_kernel(const KernelMatrix& k, const MatrixXd& k_t);
MatrixXd center_oos_kernel(const MatrixXd& k, const MatrixXd& k_t);

}  // namespace manifold
