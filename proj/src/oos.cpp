#include "manifold/oos.hpp"

#include "manifold/distance.hpp"
#include "manifold/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace manifold {

namespace {

void require_dimension(const MatrixXd& train, const DataMatrix& x_t) {
  if (x_t.dim() != train.rows()) {
    throw Error(ErrorCode::ShapeError, "test points have dimension " + std::to_string(x_t.dim()) +
                                           ", model expects " + std::to_string(train.rows()));
  }
}

/// Per-point radius of the k-th nearest training neighbor.
VectorXd knn_radii(const MatrixXd& train, int k) {
  const Index n = train.cols();
  VectorXd radii(n);
  for (Index j = 0; j < n; ++j) {
    const VectorXd row = (train.colwise() - train.col(j)).colwise().norm().transpose();
    const auto nn = nearest_indices(row, k, j);
    radii(j) = row(nn.back());
  }
  return radii;
}

MatrixXd geodesics_through_training(const SpectralModel& model, const DataMatrix& x_t) {
  const MatrixXd& train = model.training_points;
  const Index n = train.cols();
  const int k = model.kernel.k;
  const VectorXd radii = knn_radii(train, k);
  const MatrixXd e = cross_distances(train, x_t.values(), DistanceScale::Raw);
  MatrixXd out(n, x_t.size());
  for (Index t = 0; t < x_t.size(); ++t) {
    const VectorXd col = e.col(t);
    std::vector<Index> hops = nearest_indices(col, static_cast<int>(std::min<Index>(k, n)));
    for (Index j = 0; j < n; ++j) {
      if (col(j) <= radii(j)) hops.push_back(j);
    }
    std::sort(hops.begin(), hops.end());
    hops.erase(std::unique(hops.begin(), hops.end()), hops.end());
    VectorXd best = VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    for (Index j : hops) {
      best = best.cwiseMin((model.geodesics.col(j).array() + col(j)).matrix());
    }
    out.col(t) = best;
  }
  return out;
}

MatrixXd geodesics_with_test_nodes(const SpectralModel& model, const DataMatrix& x_t) {
  const Index n = model.training_points.cols();
  MatrixXd all(model.training_points.rows(), n + x_t.size());
  all << model.training_points, x_t.values();
  const DistanceMatrix raw = pairwise_euclidean(DataMatrix(all), DistanceScale::Raw);
  const NeighborGraph g = knn_graph(raw, model.kernel.k);
  std::vector<Index> sources;
  for (Index t = 0; t < x_t.size(); ++t) sources.push_back(n + t);
  const MatrixXd rows = geodesic_rows(g, sources);
  return rows.leftCols(n).transpose();
}

}  // namespace

MatrixXd test_geodesics(const SpectralModel& model, const DataMatrix& x_t,
                        const OosOptions& options) {
  if (!model.uses_geodesics() || model.geodesics.size() == 0) {
    throw Error(ErrorCode::InvalidConfig, "model has no geodesic graph");
  }
  require_dimension(model.training_points, x_t);
  return options.test_intermediates ? geodesics_with_test_nodes(model, x_t)
                                    : geodesics_through_training(model, x_t);
}

MatrixXd oos_kernel(const SpectralModel& model, const DataMatrix& x_t, const OosOptions& options) {
  require_dimension(model.training_points, x_t);
  switch (model.kernel.kind) {
    case KernelKind::Linear: {
      MatrixXd train = model.training_points;
      train.colwise() -= model.center;
      MatrixXd test = x_t.values();
      test.colwise() -= model.center;
      return train.transpose() * test;
    }
    case KernelKind::Cosine:
    case KernelKind::Rbf:
      return cross_kernel(model.training_points, x_t.values(), model.kernel);
    case KernelKind::Geodesic: {
      MatrixXd d = test_geodesics(model, x_t, options);
      if (model.shift != 0.0) {
        d = (d.array() > 0.0).select(d.array() + model.shift, d);
      }
      return -0.5 * d.array().square().matrix();
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown kernel kind");
}

namespace {

void require_embeddable(const SpectralModel& model) {
  const double tol = null_eigenvalue_threshold(model.eigenvalues);
  for (Index k = 0; k < model.p; ++k) {
    if (!(model.eigenvalues(k) > tol)) {
      throw Error(ErrorCode::NonEmbeddableDirection,
                  "eigenvalue " + std::to_string(k) + " is not positive; direction cannot be "
                  "extended out of sample");
    }
  }
}

}  // namespace

Embedding oos_embed_eigen(const SpectralModel& model, const DataMatrix& x_t,
                          const OosOptions& options) {
  require_embeddable(model);
  const MatrixXd centered = center_oos_kernel(model.reference_kernel, oos_kernel(model, x_t, options));
  const Index p = model.p;
  MatrixXd y = model.eigenvectors.leftCols(p).transpose() * centered;
  for (Index k = 0; k < p; ++k) y.row(k) /= std::sqrt(model.eigenvalues(k));
  return Embedding(std::move(y));
}

Embedding oos_embed_isomap_landmark_formula(const SpectralModel& model, const DataMatrix& x_t,
                                            const OosOptions& options) {
  if (model.method != SpectralMethod::Isomap) {
    throw Error(ErrorCode::InvalidConfig, "landmark-formula route needs an Isomap model");
  }
  require_embeddable(model);
  const MatrixXd dt = test_geodesics(model, x_t, options);
  const VectorXd avg = model.geodesics.array().square().rowwise().mean();
  MatrixXd diff = -dt.array().square().matrix();
  diff.colwise() += avg;
  const Index p = model.p;
  MatrixXd y = model.eigenvectors.leftCols(p).transpose() * diff;
  for (Index k = 0; k < p; ++k) y.row(k) /= 2.0 * std::sqrt(model.eigenvalues(k));
  return Embedding(std::move(y));
}

MatrixXd normalized_map_kernel(const KernelMap& map, const MatrixXd& query,
                               std::vector<Index>* underflow) {
  if (query.rows() != map.training_points.rows()) {
    throw Error(ErrorCode::ShapeError, "query dimension does not match the kernel map");
  }
  const MatrixXd sq = cross_distances(query, map.training_points, DistanceScale::Squared);
  MatrixXd k(sq.rows(), sq.cols());
  for (Index j = 0; j < sq.cols(); ++j) {
    const double s = map.bandwidths(j);
    k.col(j) = (-sq.col(j).array() / (2.0 * s * s)).exp().matrix();
  }
  for (Index i = 0; i < k.rows(); ++i) {
    const double total = k.row(i).sum();
    if (total > 0.0) {
      k.row(i) /= total;
    } else {
      k.row(i).setZero();
      if (underflow) underflow->push_back(i);
    }
  }
  return k;
}

KernelMap kernel_map_fit(const DataMatrix& x, const Embedding& y, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidConfig, "gamma must be a positive number");
  }
  const Index n = x.size();
  if (n < 2) throw Error(ErrorCode::DegenerateInput, "kernel mapping needs at least 2 points");
  if (y.size() != n) throw Error(ErrorCode::ShapeError, "embedding and data sizes differ");

  const DistanceMatrix d = pairwise_euclidean(x, DistanceScale::Raw);
  KernelMap map;
  map.gamma = gamma;
  map.training_points = x.values();
  map.training_embedding = y.coordinates();
  map.bandwidths.resize(n);
  for (Index j = 0; j < n; ++j) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (i != j) nearest = std::min(nearest, d(i, j));
    }
    if (!(nearest > 0.0)) {
      throw Error(ErrorCode::DegenerateInput,
                  "point " + std::to_string(j) + " has a duplicate; bandwidth would be zero");
    }
    map.bandwidths(j) = gamma * nearest;
  }
  const MatrixXd k = normalized_map_kernel(map, x.values());
  const Eigen::BDCSVD<MatrixXd> svd(k);
  const VectorXd& s = svd.singularValues();
  map.condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1)
                                        : std::numeric_limits<double>::infinity();
  map.coefficients = pseudo_inverse(k) * y.coordinates().transpose();
  if (!map.coefficients.allFinite()) {
    throw Error(ErrorCode::NumericalFailure, "kernel map coefficients are not finite");
  }
  return map;
}

Embedding kernel_map_apply(const KernelMap& map, const DataMatrix& x_t, Diagnostics* diagnostics) {
  std::vector<Index> underflow;
  const MatrixXd k = normalized_map_kernel(map, x_t.values(), &underflow);
  MatrixXd y = (k * map.coefficients).transpose();
  for (Index t : underflow) {
    const VectorXd dist =
        (map.training_points.colwise() - x_t.point(t)).colwise().norm().transpose();
    Index nearest = 0;
    dist.minCoeff(&nearest);
    y.col(t) = map.training_embedding.col(nearest);
    if (diagnostics) {
      diagnostics->warn("kernel row of test point " + std::to_string(t) +
                        " underflowed; using nearest training point " + std::to_string(nearest));
    }
  }
  return Embedding(std::move(y));
}

}  // namespace manifold
