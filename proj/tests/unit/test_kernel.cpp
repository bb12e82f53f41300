#include "manifold/kernel.hpp"

#include "manifold/distance.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace manifold;

namespace {

KernelMatrix k_of_squared(const MatrixXd& d) {
  return double_center(DistanceMatrix(d.array().square().matrix(), DistanceScale::Squared));
}

KernelMatrix k_of_raw(const MatrixXd& d) {
  MatrixXd k = oracle::double_center(d);
  return KernelMatrix(0.5 * (k + k.transpose()));
}

/// Characteristic polynomial coefficients (leading 1 first) by
/// Faddeev-LeVerrier.
std::vector<double> char_poly(const MatrixXd& a) {
  const Index n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n + 1));
  c[0] = 1.0;
  MatrixXd m = MatrixXd::Zero(n, n);
  for (Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(k - 1)] * MatrixXd::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

double min_eig(const MatrixXd& k) {
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(k).eigenvalues().minCoeff();
}

}  // namespace

TEST(BuildKernel, LinearIsCenteredGram) {
  const MatrixXd x = oracle::random_matrix(4, 9, 2);
  const KernelMatrix k = build_kernel(DataMatrix(x), KernelSpec::linear());
  const MatrixXd c = oracle::centered(x);
  EXPECT_LE((k.values() - c.transpose() * c).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildKernel, LinearCrossKernelOnOrthonormalColumns) {
  const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(oracle::random_matrix(5, 5, 3)).householderQ();
  const MatrixXd k = cross_kernel(q.leftCols(3), q.leftCols(3), KernelSpec::linear());
  EXPECT_LE((k.diagonal() - VectorXd::Ones(3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildKernel, RbfDiagonalIsOne) {
  const MatrixXd x = oracle::random_matrix(3, 6, 4);
  const KernelMatrix k = build_kernel(DataMatrix(x), KernelSpec::rbf(0.7));
  for (Index i = 0; i < 6; ++i) EXPECT_EQ(k(i, i), 1.0);
  const double d01 = (x.col(0) - x.col(1)).squaredNorm();
  EXPECT_NEAR(k(0, 1), std::exp(-d01 / (2 * 0.49)), 1e-15);
}

TEST(BuildKernel, RbfMedianBandwidth) {
  MatrixXd x(1, 3);
  x << 0, 1, 3;  // distances 1, 2, 3: median 2
  EXPECT_DOUBLE_EQ(median_pairwise_distance(DataMatrix(x)), 2.0);
  const KernelMatrix k = build_kernel(DataMatrix(x), KernelSpec::rbf());
  EXPECT_NEAR(k(0, 1), std::exp(-1.0 / 8.0), 1e-15);
}

TEST(BuildKernel, CosineRejectsZeroColumn) {
  MatrixXd x(2, 2);
  x << 1, 0, 1, 0;
  try {
    build_kernel(DataMatrix(x), KernelSpec::cosine());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateInput);
  }
}

TEST(BuildKernel, GeodesicCollinear) {
  MatrixXd x(1, 3);
  x << 0, 1, 2;
  const KernelMatrix k = build_kernel(DataMatrix(x), KernelSpec::geodesic(1));
  MatrixXd sq(3, 3);
  sq << 0, 1, 4, 1, 0, 1, 4, 1, 0;
  EXPECT_LE((k.values() - oracle::double_center(sq)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(BuildKernel, SymmetricPsdAndCentered) {
  const DataMatrix x(oracle::random_matrix(3, 15, 5));
  for (const KernelSpec& spec : {KernelSpec::linear(), KernelSpec::cosine(), KernelSpec::rbf()}) {
    const KernelMatrix k = build_kernel(x, spec);
    EXPECT_EQ(k.values(), k.values().transpose());
    EXPECT_GE(min_eig(k.values()), -1e-8);
  }
  const KernelMatrix g = build_kernel(x, KernelSpec::geodesic(5));
  EXPECT_LE(g.values().rowwise().sum().cwiseAbs().maxCoeff(), 1e-9 * g.values().cwiseAbs().maxCoeff() * 15);
}

TEST(IsomapCorrection, SinglePointIsZero) {
  const KernelMatrix zero(MatrixXd::Zero(1, 1));
  const IsomapCorrection c = kernel_isomap_cstar(zero, zero);
  EXPECT_EQ(c.c_star, 0.0);
  EXPECT_EQ(c.c_used, 0.0);
}

TEST(IsomapCorrection, TwoPointCharacteristicPolynomial) {
  const double d = 3.0;
  MatrixXd dist(2, 2);
  dist << 0, d, d, 0;
  const KernelMatrix kd2 = k_of_squared(dist);
  const KernelMatrix kd = k_of_raw(dist);
  MatrixXd block = MatrixXd::Zero(4, 4);
  block.topRightCorner(2, 2) = 2 * kd2.values();
  block.bottomLeftCorner(2, 2) = -MatrixXd::Identity(2, 2);
  block.bottomRightCorner(2, 2) = -4 * kd.values();
  // expected lambda^2 (lambda + d)^2 = lambda^4 + 2d lambda^3 + d^2 lambda^2
  const std::vector<double> poly = char_poly(block);
  const std::vector<double> expect{1.0, 2 * d, d * d, 0.0, 0.0};
  for (std::size_t i = 0; i < poly.size(); ++i) EXPECT_NEAR(poly[i], expect[i], 1e-12);

  const IsomapCorrection c = kernel_isomap_cstar(kd2, kd);
  EXPECT_NEAR(c.c_star, 0.0, 1e-6);
  EXPECT_NEAR(c.c_used, c.c_star + 1e-6 * std::abs(c.c_star), 1e-18);

  // K' termwise equals the centered kernel of the shifted distance
  const double s = 0.25;
  const KernelMatrix k = kernel_isomap_correct(kd2, kd, {c.c_star, s});
  const double v = (d + s) * (d + s) / 4.0;
  MatrixXd expect_k(2, 2);
  expect_k << v, -v, -v, v;
  EXPECT_LE((k.values() - expect_k).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(min_eig(k.values()), -1e-12);
}

TEST(IsomapCorrection, ViolatedTriangleNeedsUnitShift) {
  MatrixXd dist(3, 3);
  dist << 0, 1, 3, 1, 0, 1, 3, 1, 0;
  const KernelMatrix kd2 = k_of_squared(dist);
  const KernelMatrix kd = k_of_raw(dist);
  EXPECT_LT(min_eig(kd2.values()), -1e-3);
  const IsomapCorrection c = kernel_isomap_cstar(kd2, kd);
  EXPECT_NEAR(c.c_star, 1.0, 1e-8);
  const KernelMatrix k = kernel_isomap_correct(kd2, kd, c);
  EXPECT_GE(min_eig(k.values()), -1e-8 * k.values().cwiseAbs().maxCoeff());
  // shift less than c* leaves it indefinite
  const KernelMatrix under = detail::apply_isomap_shift(kd2, kd, 0.5);
  EXPECT_LT(min_eig(under.values()), -1e-3);
}

TEST(IsomapCorrection, ZeroShiftKeepsKernel) {
  const DataMatrix x(oracle::random_matrix(2, 8, 6));
  const DistanceMatrix d = pairwise_euclidean(x, DistanceScale::Raw);
  const KernelMatrix kd2 = double_center(d.squared());
  const KernelMatrix kd = k_of_raw(d.values());
  const KernelMatrix k = kernel_isomap_correct(kd2, kd, {0.0, 0.0});
  EXPECT_LE((k.values() - kd2.values()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(IsomapCorrection, RejectsShiftBelowCStar) {
  const KernelMatrix k(MatrixXd::Identity(2, 2));
  try {
    kernel_isomap_correct(k, k, {1.0, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidCorrection);
  }
}

TEST(IsomapCorrection, RandomGeodesicKernelsBecomePsd) {
  int indefinite = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const DataMatrix x(oracle::random_matrix(3, 15, seed));
    const DistanceMatrix g =
        geodesic_distances(knn_graph(pairwise_euclidean(x, DistanceScale::Raw), 4));
    const KernelMatrix kd2 = double_center(g.squared());
    const KernelMatrix kd = k_of_raw(g.values());
    if (min_eig(kd2.values()) < -1e-8 * kd2.values().cwiseAbs().maxCoeff()) ++indefinite;
    const KernelMatrix k = kernel_isomap_correct(kd2, kd, kernel_isomap_cstar(kd2, kd));
    EXPECT_GE(min_eig(k.values()), -1e-8 * k.values().cwiseAbs().maxCoeff()) << "seed " << seed;
  }
  EXPECT_GT(indefinite, 0);
}

TEST(CenterOos, TrainingColumnOfCenteredKernel) {
  const MatrixXd x = oracle::random_matrix(3, 7, 7);
  const MatrixXd kc = oracle::double_center(oracle::pairwise(x, true));
  const MatrixXd out = center_oos_kernel(kc, kc.col(2));
  EXPECT_LE((out - kc.col(2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CenterOos, LinearKernelMatchesRecenteredPoint) {
  const MatrixXd x = oracle::random_matrix(3, 10, 8);
  const MatrixXd t = oracle::random_matrix(3, 4, 9);
  const MatrixXd k = x.transpose() * x;
  const MatrixXd out = center_oos_kernel(k, x.transpose() * t);
  const VectorXd mu = x.rowwise().mean();
  const MatrixXd expect = oracle::centered(x).transpose() * (t.colwise() - mu);
  EXPECT_LE((out - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CenterOos, ConstantsVanish) {
  const MatrixXd out = center_oos_kernel(MatrixXd::Constant(4, 4, 2.5), MatrixXd::Constant(4, 3, 7.0));
  EXPECT_LE(out.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CenterOos, ColumnSumsVanish) {
  const MatrixXd k = oracle::random_symmetric(9, 10);
  const MatrixXd out = center_oos_kernel(k, oracle::random_matrix(9, 5, 11));
  EXPECT_LE(out.colwise().sum().cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CenterOos, ShapeMismatch) {
  try {
    center_oos_kernel(MatrixXd::Identity(3, 3), MatrixXd::Zero(4, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeError);
  }
}
