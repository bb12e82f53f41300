#include "manifold/core.hpp"

#include <algorithm>
#include <cmath>

namespace manifold {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::ScaleMismatch: return "ScaleMismatch";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidM: return "InvalidM";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::InvalidCorrection: return "InvalidCorrection";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::NonEmbeddableDirection: return "NonEmbeddableDirection";
    case ErrorCode::SingularLandmarkBlock: return "SingularLandmarkBlock";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

bool all_finite(const MatrixXd& m) { return m.allFinite(); }

DataMatrix::DataMatrix(MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorCode::EmptyInput, "data matrix needs at least one feature and one point");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::InvalidMatrix, "data matrix has non-finite entries");
  }
}

DistanceMatrix::DistanceMatrix(MatrixXd values, DistanceScale scale)
    : values_(std::move(values)), scale_(scale) {
  const Index n = values_.rows();
  if (values_.cols() != n) {
    throw Error(ErrorCode::ShapeError, "distance matrix must be square");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::InvalidMatrix, "distance matrix has non-finite entries");
  }
  for (Index j = 0; j < n; ++j) {
    if (values_(j, j) != 0.0) {
      throw Error(ErrorCode::InvalidMatrix, "distance matrix diagonal must be zero");
    }
    for (Index i = 0; i < j; ++i) {
      const double a = values_(i, j);
      const double b = values_(j, i);
      if (a < 0.0 || b < 0.0) {
        throw Error(ErrorCode::InvalidMatrix, "distance matrix has negative entries");
      }
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
        throw Error(ErrorCode::InvalidMatrix, "distance matrix is not symmetric");
      }
    }
  }
}

DistanceMatrix DistanceMatrix::squared() const {
  if (scale_ == DistanceScale::Squared) return *this;
  return DistanceMatrix(values_.array().square().matrix(), DistanceScale::Squared);
}

KernelMatrix::KernelMatrix(MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    throw Error(ErrorCode::ShapeError, "kernel matrix must be square");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::InvalidMatrix, "kernel matrix has non-finite entries");
  }
  const double scale = std::max(1.0, values_.cwiseAbs().maxCoeff());
  if ((values_ - values_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::InvalidMatrix, "kernel matrix is not symmetric");
  }
}

Embedding::Embedding(MatrixXd coordinates) : coordinates_(std::move(coordinates)) {
  if (!coordinates_.allFinite()) {
    throw Error(ErrorCode::NumericalFailure, "embedding has non-finite coordinates");
  }
}

EigenSystem sym_eig(const KernelMatrix& k) { return sym_eig(k.values()); }

EigenSystem sym_eig(const MatrixXd& k) {
  if (k.rows() != k.cols()) {
    throw Error(ErrorCode::ShapeError, "sym_eig needs a square matrix");
  }
  if (!k.allFinite()) {
    throw Error(ErrorCode::InvalidMatrix, "sym_eig input has non-finite entries");
  }
  const Index n = k.rows();
  const MatrixXd sym = 0.5 * (k + k.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "symmetric eigensolver did not converge");
  }

  // Eigen returns ascending order.
  EigenSystem out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();

  for (Index c = 0; c < n; ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index r = 0; r < n; ++r) {
      const double mag = std::abs(out.vectors(r, c));
      if (mag > best * (1.0 + 1e-12)) {
        best = mag;
        arg = r;
      }
    }
    if (out.vectors(arg, c) < 0.0) out.vectors.col(c) *= -1.0;
  }
  return out;
}

MatrixXd pseudo_inverse(const MatrixXd& m) {
  if (m.size() == 0) return MatrixXd(m.cols(), m.rows());
  Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& s = svd.singularValues();
  const double cutoff = 1e-12 * (s.size() > 0 ? s(0) : 0.0);
  VectorXd inv = VectorXd::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

MatrixXd center_kernel(const MatrixXd& k) {
  if (k.rows() != k.cols()) {
    throw Error(ErrorCode::ShapeError, "centering needs a square matrix");
  }
  const VectorXd row_mean = k.rowwise().mean();
  const Eigen::RowVectorXd col_mean = k.colwise().mean();
  const double grand = k.mean();
  MatrixXd out = k;
  out.colwise() -= row_mean;
  out.rowwise() -= col_mean;
  out.array() += grand;
  return out;
}

KernelMatrix double_center(const DistanceMatrix& squared) {
  if (squared.scale() != DistanceScale::Squared) {
    throw Error(ErrorCode::ScaleMismatch, "double_center expects SQUARED distances");
  }
  MatrixXd k = -0.5 * center_kernel(squared.values());
  // exact symmetry
  k = 0.5 * (k + k.transpose()).eval();
  return KernelMatrix(std::move(k));
}

double null_eigenvalue_threshold(const VectorXd& eigenvalues) {
  if (eigenvalues.size() == 0) return 0.0;
  return kNullEigenvalueTolerance * eigenvalues.cwiseAbs().maxCoeff();
}

SpectralCoordinates embed_from_eigensystem(const EigenSystem& eig, Index p) {
  const Index n = eig.values.size();
  if (p < 1 || p > n) {
    throw Error(ErrorCode::InvalidDimension,
                "embedding dimension " + std::to_string(p) + " outside [1, " +
                    std::to_string(n) + "]");
  }
  const double null_tol = null_eigenvalue_threshold(eig.values);
  MatrixXd y(p, n);
  int clamped = 0;
  for (Index k = 0; k < p; ++k) {
    double delta = eig.values(k);
    if (delta < -null_tol) ++clamped;
    if (delta <= null_tol) delta = 0.0;
    y.row(k) = std::sqrt(delta) * eig.vectors.col(k).transpose();
  }
  return {Embedding(std::move(y)), clamped};
}

}  // namespace manifold
