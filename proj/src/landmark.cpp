#include "manifold/landmark.hpp"

#include "manifold/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace manifold {

std::vector<Index> NystromParts::others() const {
  std::vector<Index> rest;
  rest.reserve(static_cast<std::size_t>(n - m()));
  std::size_t next = 0;
  for (Index i = 0; i < n; ++i) {
    if (next < landmarks.size() && landmarks[next] == i) {
      ++next;
    } else {
      rest.push_back(i);
    }
  }
  return rest;
}

void NystromParts::validate() const {
  const Index count = m();
  if (count < 1 || count > n) {
    throw Error(ErrorCode::InvalidM, "landmark count " + std::to_string(count) +
                                         " outside [1, " + std::to_string(n) + "]");
  }
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    if (landmarks[i] < 0 || landmarks[i] >= n || (i > 0 && landmarks[i] <= landmarks[i - 1])) {
      throw Error(ErrorCode::InvalidM, "landmark indices must be distinct, sorted and in range");
    }
  }
  if (a.rows() != count || a.cols() != count || b.rows() != count || b.cols() != n - count) {
    throw Error(ErrorCode::ShapeError, "Nystrom block shapes do not match the landmark count");
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw Error(ErrorCode::InvalidMatrix, "Nystrom blocks contain non-finite values");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::InvalidMatrix, "landmark block A is not symmetric");
  }
}

std::vector<Index> select_landmarks(Index n, Index m, std::uint64_t seed) {
  if (m < 1 || m > n) {
    throw Error(ErrorCode::InvalidM, "landmark count " + std::to_string(m) + " outside [1, " +
                                         std::to_string(n) + "]");
  }
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  // rejection sampling keeps the draw identical across standard libraries
  auto bounded = [&rng](std::uint64_t range) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t v;
    do {
      v = rng();
    } while (v >= limit);
    return v % range;
  };
  for (Index i = 0; i < m; ++i) {
    const auto j = i + static_cast<Index>(bounded(static_cast<std::uint64_t>(n - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> out(perm.begin(), perm.begin() + m);
  std::sort(out.begin(), out.end());
  return out;
}

NystromParts partition_kernel(const MatrixXd& k, std::vector<Index> landmarks) {
  if (k.rows() != k.cols()) throw Error(ErrorCode::ShapeError, "kernel must be square");
  NystromParts parts;
  parts.n = k.rows();
  parts.landmarks = std::move(landmarks);
  const std::vector<Index> rest = parts.others();
  parts.a = k(parts.landmarks, parts.landmarks);
  parts.b = k(parts.landmarks, rest);
  parts.validate();
  return parts;
}

namespace {

struct SpectralInverse {
  EigenSystem eig;
  VectorXd inverse_values;
  bool singular = false;
};

SpectralInverse invert_landmark_block(const MatrixXd& a) {
  SpectralInverse out;
  out.eig = sym_eig(a);
  const double tol = null_eigenvalue_threshold(out.eig.values);
  out.inverse_values = VectorXd::Zero(out.eig.values.size());
  for (Index i = 0; i < out.eig.values.size(); ++i) {
    const double v = out.eig.values(i);
    if (std::abs(v) > tol && v != 0.0) {
      out.inverse_values(i) = 1.0 / v;
    } else {
      out.singular = true;
    }
  }
  return out;
}

}  // namespace

KernelMatrix nystrom_complete(const NystromParts& parts, bool allow_pseudo_inverse,
                              Diagnostics* diagnostics) {
  parts.validate();
  const SpectralInverse inv = invert_landmark_block(parts.a);
  if (inv.singular) {
    if (!allow_pseudo_inverse) {
      throw Error(ErrorCode::SingularLandmarkBlock, "landmark block A is numerically singular");
    }
    if (diagnostics) diagnostics->warn("landmark block A is singular; using its pseudo-inverse");
  }
  const MatrixXd ub = inv.eig.vectors.transpose() * parts.b;
  const MatrixXd c = ub.transpose() * inv.inverse_values.asDiagonal() * ub;

  const std::vector<Index> rest = parts.others();
  MatrixXd full(parts.n, parts.n);
  full(parts.landmarks, parts.landmarks) = parts.a;
  full(parts.landmarks, rest) = parts.b;
  full(rest, parts.landmarks) = parts.b.transpose();
  full(rest, rest) = 0.5 * (c + c.transpose());
  return KernelMatrix(std::move(full));
}

Embedding landmark_embed(const NystromParts& parts, Index p) {
  parts.validate();
  if (p < 1 || p > parts.m()) {
    throw Error(ErrorCode::InvalidDimension, "embedding dimension " + std::to_string(p) +
                                                 " outside [1, " + std::to_string(parts.m()) + "]");
  }
  const EigenSystem eig = sym_eig(parts.a);
  const double tol = null_eigenvalue_threshold(eig.values);
  for (Index k = 0; k < p; ++k) {
    if (!(eig.values(k) > tol)) {
      throw Error(ErrorCode::NonEmbeddableDirection,
                  "landmark eigenvalue " + std::to_string(k) + " is not positive");
    }
  }
  const MatrixXd ut = eig.vectors.leftCols(p).transpose();
  const VectorXd root = eig.values.head(p).cwiseSqrt();
  MatrixXd y(p, parts.n);
  y(Eigen::all, parts.landmarks) = root.asDiagonal() * ut;
  y(Eigen::all, parts.others()) = root.cwiseInverse().asDiagonal() * (ut * parts.b);
  return Embedding(std::move(y));
}

NystromParts kernel_parts_from_distance_parts(const DistanceMatrix& e, const MatrixXd& f,
                                              std::vector<Index> landmarks) {
  if (e.scale() != DistanceScale::Squared) {
    throw Error(ErrorCode::ScaleMismatch, "landmark distance block must be SQUARED");
  }
  const Index m = e.size();
  if (f.rows() != m || static_cast<Index>(landmarks.size()) != m) {
    throw Error(ErrorCode::ShapeError, "distance blocks disagree on the landmark count");
  }
  if (!f.allFinite() || (f.size() > 0 && f.minCoeff() < 0.0)) {
    throw Error(ErrorCode::InvalidMatrix, "cross distances must be finite and nonnegative");
  }
  NystromParts parts;
  parts.n = m + f.cols();
  parts.landmarks = std::move(landmarks);
  parts.a = double_center(e).values();
  const VectorXd landmark_mean = e.values().rowwise().mean();
  MatrixXd b = f;
  b.rowwise() -= f.colwise().mean();
  b.colwise() -= landmark_mean;
  parts.b = -0.5 * b;
  parts.validate();
  return parts;
}

namespace {

Embedding embed_from_landmark_distances(const MatrixXd& rows, std::vector<Index> landmarks,
                                        Index n, Index p) {
  // rows: RAW distances from each landmark to every point
  NystromParts skeleton;
  skeleton.n = n;
  skeleton.landmarks = landmarks;
  const std::vector<Index> rest = skeleton.others();
  const MatrixXd sq = rows.array().square().matrix();
  MatrixXd e = sq(Eigen::all, landmarks);
  e = 0.5 * (e + e.transpose()).eval();
  e.diagonal().setZero();
  const MatrixXd f = sq(Eigen::all, rest);
  return landmark_embed(
      kernel_parts_from_distance_parts(DistanceMatrix(e, DistanceScale::Squared), f,
                                       std::move(landmarks)),
      p);
}

}  // namespace

Embedding fit_landmark_mds(const DataMatrix& x, Index m, Index p, std::uint64_t seed) {
  std::vector<Index> landmarks = select_landmarks(x.size(), m, seed);
  const MatrixXd anchors = x.values()(Eigen::all, landmarks);
  const MatrixXd rows = cross_distances(anchors, x.values(), DistanceScale::Raw);
  return embed_from_landmark_distances(rows, std::move(landmarks), x.size(), p);
}

Embedding fit_landmark_isomap(const DataMatrix& x, Index m, int k, Index p, std::uint64_t seed) {
  std::vector<Index> landmarks = select_landmarks(x.size(), m, seed);
  const NeighborGraph g = knn_graph(pairwise_euclidean(x, DistanceScale::Raw), k);
  const MatrixXd rows = geodesic_rows(g, landmarks);
  return embed_from_landmark_distances(rows, std::move(landmarks), x.size(), p);
}

}  // namespace manifold
