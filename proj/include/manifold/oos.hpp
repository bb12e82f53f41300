#pragma once

#include "manifold/core.hpp"
#include "manifold/spectral.hpp"

namespace manifold {

struct OosOptions {
  /// Let other test points act as intermediate nodes on geodesic paths
  /// (graph over train + test). Off: paths run through training points only.
  bool test_intermediates = false;
};

/// RAW geodesic distances from every training point (rows) to every test
/// point (columns) for an Isomap-family model.
MatrixXd test_geodesics(const SpectralModel& model, const DataMatrix& x_t,
                        const OosOptions& options = {});

/// Uncentered train-vs-test kernel matching `model.reference_kernel`.
MatrixXd oos_kernel(const SpectralModel& model, const DataMatrix& x_t,
                    const OosOptions& options = {});

/// y_k(x) = delta_k^{-1/2} sum_i v_ki K_t(i, x) with K_t centered against the
/// training kernel.
Embedding oos_embed_eigen(const SpectralModel& model, const DataMatrix& x_t,
                          const OosOptions& options = {});

/// y_k(x) = 1/(2 sqrt(delta_k)) sum_i v_ki (Davg_i - Dt(i, x)^2), where Davg_i
/// is the mean squared geodesic from training point i. Isomap models only.
Embedding oos_embed_isomap_landmark_formula(const SpectralModel& model, const DataMatrix& x_t,
                                            const OosOptions& options = {});

/// Normalized Gaussian regression from inputs to embedded coordinates.
struct KernelMap {
  MatrixXd coefficients;  // n x p
  VectorXd bandwidths;    // sigma_j, length n
  double gamma = 0.5;
  MatrixXd training_points;  // d x n
  MatrixXd training_embedding;  // p x n
  /// 2-norm condition number of the training K''.
  double condition = 0.0;

  Index size() const noexcept { return training_points.cols(); }
  Index dim() const noexcept { return coefficients.cols(); }
};

/// Row-normalized kernel between query columns (rows) and the training points.
/// Rows whose kernel values all underflow are left zero and reported in
/// `underflow` when given.
MatrixXd normalized_map_kernel(const KernelMap& map, const MatrixXd& query,
                               std::vector<Index>* underflow = nullptr);

/// sigma_j = gamma * min_{i != j} |x_j - x_i|; A = pinv(K'') Y^T.
KernelMap kernel_map_fit(const DataMatrix& x, const Embedding& y, double gamma = 0.5);

/// Y_t = (K''_t A)^T. A test point whose kernel row underflows to zero takes
/// the embedding of its nearest training point; a warning is recorded.
Embedding kernel_map_apply(const KernelMap& map, const DataMatrix& x_t,
                           Diagnostics* diagnostics = nullptr);

}  // namespace manifold
