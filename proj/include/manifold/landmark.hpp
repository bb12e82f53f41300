#pragma once

#include "manifold/core.hpp"

#include <cstdint>
#include <vector>

namespace manifold {

/// Landmark blocks of an n x n kernel: A (landmarks x landmarks) and B
/// (landmarks x others). `landmarks` is ascending; "others" are the remaining
/// indices in ascending order.
struct NystromParts {
  MatrixXd a;
  MatrixXd b;
  std::vector<Index> landmarks;
  Index n = 0;

  Index m() const noexcept { return static_cast<Index>(landmarks.size()); }
  std::vector<Index> others() const;
  /// Throws InvalidMatrix / ShapeError / InvalidM on inconsistent blocks.
  void validate() const;
};

/// m distinct indices drawn uniformly from [0, n), sorted. For a fixed seed
/// the selection for m is a subset of the selection for m + 1.
std::vector<Index> select_landmarks(Index n, Index m, std::uint64_t seed);

/// Splits a full kernel into Nystrom blocks for the given landmarks.
NystromParts partition_kernel(const MatrixXd& k, std::vector<Index> landmarks);

/// [[A, B], [B^T, B^T A^-1 B]] in original index order. A singular A falls
/// back to its spectral pseudo-inverse (with a warning) unless
/// `allow_pseudo_inverse` is false.
KernelMatrix nystrom_complete(const NystromParts& parts, bool allow_pseudo_inverse = true,
                              Diagnostics* diagnostics = nullptr);

/// Landmarks at Sigma^{1/2} U^T, the rest at Sigma^{-1/2} U^T B, top p rows.
Embedding landmark_embed(const NystromParts& parts, Index p);

/// Kernel blocks from SQUARED landmark distances E (m x m) and SQUARED
/// landmark-to-other distances F (m x (n-m)), centering with landmark means.
NystromParts kernel_parts_from_distance_parts(const DistanceMatrix& e, const MatrixXd& f,
                                              std::vector<Index> landmarks);

Embedding fit_landmark_mds(const DataMatrix& x, Index m, Index p, std::uint64_t seed);
Embedding fit_landmark_isomap(const DataMatrix& x, Index m, int k, Index p, std::uint64_t seed);

}  // namespace manifold
