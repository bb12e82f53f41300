#include "manifold/spectral.hpp"

#include "manifold/distance.hpp"

#include <cmath>

namespace manifold {

const char* to_string(SpectralMethod method) {
  switch (method) {
    case SpectralMethod::ClassicalMds: return "classical_mds";
    case SpectralMethod::KernelMds: return "kernel_mds";
    case SpectralMethod::Isomap: return "isomap";
    case SpectralMethod::KernelIsomap: return "kernel_isomap";
  }
  return "unknown";
}

Embedding SpectralModel::embedding() const {
  return embed_from_eigensystem(EigenSystem{eigenvalues, eigenvectors}, p).embedding;
}

namespace {

void check_dimension(Index p, Index n) {
  if (p < 1 || p > n) {
    throw Error(ErrorCode::InvalidDimension, "embedding dimension " + std::to_string(p) +
                                                 " outside [1, " + std::to_string(n) + "]");
  }
}

SpectralFit finish(SpectralModel model, const MatrixXd& centered_kernel) {
  EigenSystem eig = sym_eig(centered_kernel);
  auto coords = embed_from_eigensystem(eig, model.p);
  model.eigenvalues = std::move(eig.values);
  model.eigenvectors = std::move(eig.vectors);
  model.clamped_count = coords.clamped_count;
  return {std::move(model), std::move(coords.embedding)};
}

SpectralFit fit_linear(const DataMatrix& x, Index p, SpectralMethod tag) {
  check_dimension(p, x.size());
  SpectralModel model;
  model.method = tag;
  model.kernel = KernelSpec::linear();
  model.p = p;
  model.training_points = x.values();
  model.center = x.values().rowwise().mean();
  MatrixXd centered = x.values();
  centered.colwise() -= model.center;
  MatrixXd gram = centered.transpose() * centered;
  gram = 0.5 * (gram + gram.transpose()).eval();
  model.reference_kernel = gram;
  return finish(std::move(model), gram);
}

DistanceMatrix training_geodesics(const DataMatrix& x, int k) {
  const DistanceMatrix raw = pairwise_euclidean(x, DistanceScale::Raw);
  return geodesic_distances(knn_graph(raw, k));
}

SpectralFit fit_geodesic(const DataMatrix& x, int k, Index p, SpectralMethod tag) {
  check_dimension(p, x.size());
  const DistanceMatrix geo = training_geodesics(x, k);
  SpectralModel model;
  model.method = tag;
  model.kernel = KernelSpec::geodesic(k);
  model.p = p;
  model.training_points = x.values();
  model.geodesics = geo.values();
  const DistanceMatrix sq = geo.squared();
  model.reference_kernel = -0.5 * sq.values();
  const KernelMatrix k_centered = double_center(sq);
  return finish(std::move(model), k_centered.values());
}

}  // namespace

SpectralFit fit_classical_mds(const DataMatrix& x, Index p) {
  return fit_linear(x, p, SpectralMethod::ClassicalMds);
}

Embedding classical_mds_from_distances(const DistanceMatrix& d, Index p) {
  check_dimension(p, d.size());
  const KernelMatrix k = double_center(d.squared());
  return embed_from_eigensystem(sym_eig(k), p).embedding;
}

SpectralFit fit_kernel_mds(const DataMatrix& x, const KernelSpec& spec, Index p) {
  switch (spec.kind) {
    case KernelKind::Linear:
      return fit_linear(x, p, SpectralMethod::KernelMds);
    case KernelKind::Geodesic:
      return fit_geodesic(x, spec.k, p, SpectralMethod::KernelMds);
    case KernelKind::Cosine:
    case KernelKind::Rbf:
      break;
  }
  check_dimension(p, x.size());
  SpectralModel model;
  model.method = SpectralMethod::KernelMds;
  model.kernel = spec;
  if (spec.kind == KernelKind::Rbf && !(spec.bandwidth > 0.0)) {
    model.kernel.bandwidth = median_pairwise_distance(x);
    // coincident points: any width gives the all-ones kernel
    if (!(model.kernel.bandwidth > 0.0)) model.kernel.bandwidth = 1.0;
  }
  model.p = p;
  model.training_points = x.values();
  MatrixXd raw = cross_kernel(x.values(), x.values(), model.kernel);
  raw = 0.5 * (raw + raw.transpose()).eval();
  model.reference_kernel = raw;
  MatrixXd centered = center_kernel(raw);
  centered = 0.5 * (centered + centered.transpose()).eval();
  return finish(std::move(model), centered);
}

SpectralFit fit_isomap(const DataMatrix& x, int k, Index p) {
  if (x.size() < 3) {
    throw Error(ErrorCode::DegenerateInput, "Isomap needs at least 3 training points");
  }
  return fit_geodesic(x, k, p, SpectralMethod::Isomap);
}

SpectralFit fit_kernel_isomap(const DataMatrix& x, int k, Index p,
                              const KernelIsomapOptions& options) {
  check_dimension(p, x.size());
  const DistanceMatrix geo = training_geodesics(x, k);

  const KernelMatrix k_d2 = double_center(geo.squared());
  MatrixXd k_d_values = -0.5 * center_kernel(geo.values());
  const KernelMatrix k_d(0.5 * (k_d_values + k_d_values.transpose()));

  IsomapCorrection corr = kernel_isomap_cstar(k_d2, k_d);
  if (options.forced_shift) corr.c_used = *options.forced_shift;
  const KernelMatrix k_prime = options.forced_shift
                                   ? detail::apply_isomap_shift(k_d2, k_d, corr.c_used)
                                   : kernel_isomap_correct(k_d2, k_d, corr);

  SpectralModel model;
  model.method = SpectralMethod::KernelIsomap;
  model.kernel = KernelSpec::geodesic(k);
  model.shift = corr.c_used;
  model.c_star = corr.c_star;
  model.p = p;
  model.training_points = x.values();
  model.geodesics = geo.values();
  MatrixXd shifted = geo.values();
  shifted.array() += corr.c_used;
  shifted.diagonal().setZero();
  model.reference_kernel = -0.5 * shifted.array().square().matrix();
  return finish(std::move(model), k_prime.values());
}

Embedding fit_pca(const DataMatrix& x, Index p) {
  const Index limit = std::min(x.dim(), x.size());
  if (p < 1 || p > limit) {
    throw Error(ErrorCode::InvalidDimension, "PCA dimension " + std::to_string(p) +
                                                 " outside [1, " + std::to_string(limit) + "]");
  }
  MatrixXd centered = x.values();
  centered.colwise() -= x.values().rowwise().mean();
  Eigen::BDCSVD<MatrixXd> svd(centered, Eigen::ComputeThinV);
  const VectorXd& s = svd.singularValues();
  const MatrixXd& v = svd.matrixV();
  MatrixXd y(p, x.size());
  for (Index k = 0; k < p; ++k) {
    VectorXd col = v.col(k);
    Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col(arg) < 0.0) col = -col;
    y.row(k) = s(k) * col.transpose();
  }
  return Embedding(std::move(y));
}

}  // namespace manifold
