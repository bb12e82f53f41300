#pragma once

#include "manifold/core.hpp"
#include "manifold/kernel.hpp"

#include <optional>
#include <utility>

namespace manifold {

enum class SpectralMethod { ClassicalMds, KernelMds, Isomap, KernelIsomap };

const char* to_string(SpectralMethod method);

/// Everything needed to reproduce a spectral embedding and to embed new
/// points. Immutable after fit.
struct SpectralModel {
  SpectralMethod method = SpectralMethod::ClassicalMds;
  /// LINEAR for classical MDS, GEODESIC(k) for the Isomap family. RBF
  /// bandwidth is stored resolved.
  KernelSpec kernel;
  /// Additive distance shift c used by kernel Isomap, 0 otherwise.
  double shift = 0.0;
  double c_star = 0.0;

  VectorXd eigenvalues;   // length n, descending
  MatrixXd eigenvectors;  // n x n
  /// Uncentered training kernel: the K that out-of-sample centering refers
  /// to. Double-centering it gives the matrix that was eigendecomposed.
  MatrixXd reference_kernel;
  /// Training points, d x n. For classical MDS these are the raw (uncentered)
  /// inputs; `center` holds their mean.
  MatrixXd training_points;
  VectorXd center;
  /// RAW geodesic distances between training points (Isomap family only).
  MatrixXd geodesics;

  Index p = 0;
  int clamped_count = 0;

  Index size() const noexcept { return eigenvalues.size(); }
  bool uses_geodesics() const noexcept { return kernel.kind == KernelKind::Geodesic; }
  /// Training embedding recomputed from the stored eigenpairs.
  Embedding embedding() const;
};

using SpectralFit = std::pair<SpectralModel, Embedding>;

SpectralFit fit_classical_mds(const DataMatrix& x, Index p);

/// Classical scaling of a distance matrix alone (no model state).
Embedding classical_mds_from_distances(const DistanceMatrix& d, Index p);

SpectralFit fit_kernel_mds(const DataMatrix& x, const KernelSpec& spec, Index p);

SpectralFit fit_isomap(const DataMatrix& x, int k, Index p);

struct KernelIsomapOptions {
  /// Replaces the computed shift without the c >= c* check. Test seam.
  std::optional<double> forced_shift;
};

SpectralFit fit_kernel_isomap(const DataMatrix& x, int k, Index p,
                              const KernelIsomapOptions& options = {});

/// Centered data scaled along its right singular vectors (S V^T, top p rows).
Embedding fit_pca(const DataMatrix& x, Index p);

}  // namespace manifold
