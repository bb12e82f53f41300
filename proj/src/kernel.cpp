#include "manifold/kernel.hpp"

#include "manifold/distance.hpp"

#include <algorithm>
#include <cmath>

namespace manifold {

const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Cosine: return "cosine";
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Geodesic: return "geodesic";
  }
  return "unknown";
}

double median_pairwise_distance(const DataMatrix& x) {
  const Index n = x.size();
  std::vector<double> d;
  d.reserve(static_cast<size_t>(n * (n - 1) / 2));
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) d.push_back((x.point(i) - x.point(j)).norm());
  }
  if (d.empty()) return 0.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  if (d.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(d.begin(), mid);
  return 0.5 * (lower + upper);
}

namespace {

void require_nonzero_columns(const MatrixXd& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    if (m.col(j).norm() == 0.0) {
      throw Error(ErrorCode::DegenerateInput,
                  "cosine kernel undefined for zero-norm point " + std::to_string(j));
    }
  }
}

double resolve_bandwidth(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidConfig, "RBF bandwidth must be positive");
  }
  return sigma;
}

}  // namespace

MatrixXd cross_kernel(const MatrixXd& train, const MatrixXd& query, const KernelSpec& spec) {
  if (train.rows() != query.rows()) throw Error(ErrorCode::ShapeError, "point dimensions differ");
  switch (spec.kind) {
    case KernelKind::Linear:
      return train.transpose() * query;
    case KernelKind::Cosine: {
      require_nonzero_columns(train);
      require_nonzero_columns(query);
      const VectorXd tn = train.colwise().norm().transpose();
      const VectorXd qn = query.colwise().norm().transpose();
      MatrixXd k = train.transpose() * query;
      k.array().colwise() /= tn.array();
      k.array().rowwise() /= qn.transpose().array();
      return k;
    }
    case KernelKind::Rbf: {
      const double sigma = resolve_bandwidth(spec.bandwidth);
      MatrixXd sq = cross_distances(train, query, DistanceScale::Squared);
      return (-sq.array() / (2.0 * sigma * sigma)).exp().matrix();
    }
    case KernelKind::Geodesic:
      break;
  }
  throw Error(ErrorCode::InvalidConfig, "geodesic cross kernel needs graph state");
}

KernelMatrix build_kernel(const DataMatrix& x, const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::Linear: {
      MatrixXd centered = x.values();
      centered.colwise() -= x.values().rowwise().mean();
      MatrixXd g = centered.transpose() * centered;
      return KernelMatrix(0.5 * (g + g.transpose()));
    }
    case KernelKind::Cosine: {
      MatrixXd k = cross_kernel(x.values(), x.values(), spec);
      return KernelMatrix(0.5 * (k + k.transpose()));
    }
    case KernelKind::Rbf: {
      KernelSpec resolved = spec;
      if (!(resolved.bandwidth > 0.0)) resolved.bandwidth = median_pairwise_distance(x);
      if (!(resolved.bandwidth > 0.0)) {
        // all points coincide
        return KernelMatrix(MatrixXd::Ones(x.size(), x.size()));
      }
      MatrixXd k = cross_kernel(x.values(), x.values(), resolved);
      return KernelMatrix(0.5 * (k + k.transpose()));
    }
    case KernelKind::Geodesic: {
      const DistanceMatrix raw = pairwise_euclidean(x, DistanceScale::Raw);
      const DistanceMatrix geo = geodesic_distances(knn_graph(raw, spec.k));
      return double_center(geo.squared());
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown kernel kind");
}

IsomapCorrection kernel_isomap_cstar(const KernelMatrix& k_d2, const KernelMatrix& k_d) {
  const Index n = k_d2.size();
  if (k_d.size() != n) throw Error(ErrorCode::ShapeError, "K(D^2) and K(D) sizes differ");
  MatrixXd block = MatrixXd::Zero(2 * n, 2 * n);
  block.topRightCorner(n, n) = 2.0 * k_d2.values();
  block.bottomLeftCorner(n, n) = -MatrixXd::Identity(n, n);
  block.bottomRightCorner(n, n) = -4.0 * k_d.values();

  Eigen::EigenSolver<MatrixXd> solver(block, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "general eigensolver failed on the c* block matrix");
  }
  const double c_star = solver.eigenvalues().real().maxCoeff();
  return {c_star, c_star + 1e-6 * std::abs(c_star)};
}

KernelMatrix kernel_isomap_correct(const KernelMatrix& k_d2, const KernelMatrix& k_d,
                                   const IsomapCorrection& corr) {
  const Index n = k_d2.size();
  if (k_d.size() != n) throw Error(ErrorCode::ShapeError, "K(D^2) and K(D) sizes differ");
  if (corr.c_used < corr.c_star) {
    throw Error(ErrorCode::InvalidCorrection, "c_used is below c_star; K' may be indefinite");
  }
  return detail::apply_isomap_shift(k_d2, k_d, corr.c_used);
}

KernelMatrix detail::apply_isomap_shift(const KernelMatrix& k_d2, const KernelMatrix& k_d,
                                        double c) {
  const Index n = k_d2.size();
  if (k_d.size() != n) throw Error(ErrorCode::ShapeError, "K(D^2) and K(D) sizes differ");
  MatrixXd h = MatrixXd::Identity(n, n);
  h.array() -= 1.0 / static_cast<double>(n);
  MatrixXd k = k_d2.values() + 2.0 * c * k_d.values() + 0.5 * c * c * h;
  return KernelMatrix(0.5 * (k + k.transpose()));
}

MatrixXd center_oos_kernel(const KernelMatrix& k, const MatrixXd& k_t) {
  return center_oos_kernel(k.values(), k_t);
}

MatrixXd center_oos_kernel(const MatrixXd& k, const MatrixXd& k_t) {
  const Index n = k.rows();
  if (k.cols() != n || k_t.rows() != n) {
    throw Error(ErrorCode::ShapeError, "out-of-sample kernel must have one row per training point");
  }
  const VectorXd train_row_mean = k.rowwise().mean();
  const Eigen::RowVectorXd test_col_mean = k_t.colwise().mean();
  const double grand = k.mean();
  MatrixXd out = k_t;
  out.rowwise() -= test_col_mean;
  out.colwise() -= train_row_mean;
  out.array() += grand;
  return out;
}

}  // namespace manifold
