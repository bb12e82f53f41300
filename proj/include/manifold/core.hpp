#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace manifold {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class ErrorCode {
  InvalidMatrix,
  ScaleMismatch,
  ShapeError,
  InvalidK,
  InvalidM,
  InvalidDimension,
  InvalidCorrection,
  DegenerateInput,
  Disconnected,
  NumericalFailure,
  NonEmbeddableDirection,
  SingularLandmarkBlock,
  ParseError,
  EmptyInput,
  InvalidConfig,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Collects non-fatal conditions (pseudo-inverse fallbacks, clamped
/// eigenvalues, kernel underflow) so callers can surface them.
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

/// d x n point set, one column per point.
class DataMatrix {
 public:
  explicit DataMatrix(MatrixXd values);

  const MatrixXd& values() const noexcept { return values_; }
  Index dim() const noexcept { return values_.rows(); }
  Index size() const noexcept { return values_.cols(); }
  auto point(Index i) const { return values_.col(i); }

 private:
  MatrixXd values_;
};

enum class DistanceScale { Raw, Squared };

/// Symmetric, nonnegative, zero-diagonal n x n matrix tagged with whether
/// it holds plain or squared distances.
class DistanceMatrix {
 public:
  DistanceMatrix(MatrixXd values, DistanceScale scale);

  const MatrixXd& values() const noexcept { return values_; }
  DistanceScale scale() const noexcept { return scale_; }
  Index size() const noexcept { return values_.rows(); }
  double operator()(Index i, Index j) const { return values_(i, j); }

  /// Entry-wise square of a RAW matrix; returns a copy if already SQUARED.
  DistanceMatrix squared() const;

 private:
  MatrixXd values_;
  DistanceScale scale_;
};

class KernelMatrix {
 public:
  explicit KernelMatrix(MatrixXd values);

  const MatrixXd& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.rows(); }
  double operator()(Index i, Index j) const { return values_(i, j); }

 private:
  MatrixXd values_;
};

/// Eigenvalues sorted descending; column k of `vectors` pairs with value k.
struct EigenSystem {
  VectorXd values;
  MatrixXd vectors;
};

/// p x n embedded coordinates.
class Embedding {
 public:
  explicit Embedding(MatrixXd coordinates);

  const MatrixXd& coordinates() const noexcept { return coordinates_; }
  Index dim() const noexcept { return coordinates_.rows(); }
  Index size() const noexcept { return coordinates_.cols(); }

 private:
  MatrixXd coordinates_;
};

bool all_finite(const MatrixXd& m);

/// Symmetric eigendecomposition, descending order, each eigenvector signed so
/// its largest-magnitude entry is positive.
EigenSystem sym_eig(const KernelMatrix& k);
EigenSystem sym_eig(const MatrixXd& k);

/// Moore-Penrose pseudo-inverse via SVD; singular values below
/// 1e-12 * sigma_max are treated as zero.
MatrixXd pseudo_inverse(const MatrixXd& m);

/// K = -1/2 H D H for a SQUARED distance matrix, by mean subtraction.
KernelMatrix double_center(const DistanceMatrix& squared);

/// H K H for an arbitrary square kernel.
MatrixXd center_kernel(const MatrixXd& k);

/// Eigenvalues with |delta| below this are treated as exact zeros when
/// embedding. Relative to the largest magnitude eigenvalue.
inline constexpr double kNullEigenvalueTolerance = 1e-10;

double null_eigenvalue_threshold(const VectorXd& eigenvalues);

struct SpectralCoordinates {
  Embedding embedding;
  int clamped_count = 0;
};

/// Y = Delta^{1/2} V^T truncated to the top p rows. Negative eigenvalues are
/// clamped to zero and counted.
SpectralCoordinates embed_from_eigensystem(const EigenSystem& eig, Index p);

}  // namespace manifold
