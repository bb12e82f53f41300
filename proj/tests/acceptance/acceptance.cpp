// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "manifold/cli.hpp"
#include "manifold/distance.hpp"
#include "manifold/io.hpp"
#include "manifold/iterative.hpp"
#include "manifold/kernel.hpp"
#include "manifold/landmark.hpp"
#include "manifold/oos.hpp"
#include "manifold/spectral.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace manifold;
namespace fs = std::filesystem;

namespace {

// Tolerances
constexpr double kPcaTol = 1e-8;             // relative to max |coordinate|
constexpr double kPcaSeconds = 5.0;
constexpr double kGramTol = 1e-9;            // relative to max |Gram|
constexpr double kGradTol = 1e-5;            // relative, Frobenius
constexpr double kHessTol = 1e-3;            // relative, Frobenius
constexpr double kTwoPointTol = 1e-8;
constexpr double kGeodesicTol = 1e-10;
constexpr double kPsdTol = 1e-8;             // relative to max |K'|
constexpr double kNystromTol = 1e-8;         // relative to max |K|
constexpr double kLandmarkTol = 1e-8;
constexpr double kEigenRouteTol = 1e-8;
constexpr double kKernelMapTol = 1e-6;
constexpr double kKernelMapCondition = 1e8;
constexpr double kRouteAgreeTol = 1e-6;
constexpr double kSwissRollRv = 0.05;
constexpr double kSwissRollSeconds = 60.0;
constexpr double kMeanTol = 1e-9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// largest embedding row mean seen by any criterion
double g_worst_mean = 0.0;
int g_mean_checks = 0;

void track_mean(const Embedding& y) {
  g_worst_mean = std::max(g_worst_mean, y.coordinates().rowwise().mean().cwiseAbs().maxCoeff());
  ++g_mean_checks;
}

double rel_err(const MatrixXd& a, const MatrixXd& b) { return (a - b).norm() / b.norm(); }

Outcome pca_equivalence() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const DataMatrix x(oracle::random_matrix(10, 50, 1000 + seed));
    for (Index p : {2, 5}) {
      const auto fit = fit_classical_mds(x, p);
      const Embedding pca = fit_pca(x, p);
      track_mean(fit.second);
      track_mean(pca);
      const double scale = pca.coordinates().cwiseAbs().maxCoeff();
      worst = std::max(worst, oracle::sign_aligned_deviation(pca.coordinates(),
                                                             fit.second.coordinates()) /
                                  scale);
    }
  }
  const double t = seconds_since(start);
  return {worst <= kPcaTol && t < kPcaSeconds,
          "max deviation/scale=" + num(worst) + " runtime=" + num(t) + "s"};
}

Outcome double_centering_identity() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MatrixXd x = oracle::centered(oracle::random_matrix(4 + seed % 5, 30, 2000 + seed));
    const MatrixXd gram = x.transpose() * x;
    const KernelMatrix k = double_center(pairwise_euclidean(DataMatrix(x), DistanceScale::Squared));
    worst = std::max(worst, (k.values() - gram).cwiseAbs().maxCoeff() / gram.cwiseAbs().maxCoeff());
  }
  return {worst <= kGramTol, "max relative deviation=" + num(worst)};
}

Outcome sammon_derivatives() {
  double worst_g = 0.0, worst_h = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index n = 4 + static_cast<Index>(seed % 12);
    const MatrixXd x = oracle::random_matrix(3, n, 3000 + seed);
    const MatrixXd y = oracle::random_matrix(2, n, 3100 + seed);
    const MatrixXd dx = oracle::pairwise(x);
    const DistanceMatrix d(dx, DistanceScale::Raw);
    const oracle::Cost cost = [&](const MatrixXd& z) { return oracle::sammon(dx, z); };
    const MatrixXd g = sammon_gradient(d, Embedding(y));
    const MatrixXd h = sammon_hessian_diag(d, Embedding(y));
    worst_g = std::max(worst_g, rel_err(g, oracle::fd_gradient(cost, y, 1e-6)));
    worst_h = std::max(worst_h, rel_err(h, oracle::fd_second(cost, y, 1e-4)));
  }
  return {worst_g < kGradTol && worst_h < kHessTol,
          "gradient rel=" + num(worst_g) + " second-derivative rel=" + num(worst_h)};
}

Outcome solver_monotonicity() {
  int runs = 0, bad = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Index n = 10 + static_cast<Index>(seed % 21);
    const DataMatrix x(oracle::random_matrix(4, n, 4000 + seed));
    const DistanceMatrix d = pairwise_euclidean(x, DistanceScale::Raw);
    IterConfig cfg;
    cfg.max_iters = 150;
    cfg.seed = seed;
    const Embedding init(oracle::random_matrix(2, n, 4100 + seed));
    StressReport report;
    switch (seed % 3) {
      case 0:
        if (seed % 2) cfg.optimizer = Optimizer::GradientDescent;
        report = fit_sammon(d, 2, cfg, init).second;
        break;
      case 1: report = fit_metric_mds(d, 2, cfg, seed % 2 == 0, init).second; break;
      default: report = fit_nonmetric_mds(d, 2, cfg, init).second; break;
    }
    ++runs;
    for (std::size_t i = 1; i < report.stress.size(); ++i) {
      if (report.stress[i] > report.stress[i - 1]) {
        ++bad;
        break;
      }
    }
  }
  MatrixXd two(1, 2);
  two << 0.0, 3.0;
  const DistanceMatrix d2 = pairwise_euclidean(DataMatrix(two), DistanceScale::Raw);
  MatrixXd start(2, 2);
  start << 0.1, 0.4, -0.2, 0.3;
  IterConfig cfg;
  cfg.max_iters = 2000;
  cfg.tolerance = 0.0;
  const Embedding y = fit_sammon(d2, 2, cfg, Embedding(start)).first;
  const double gap = std::abs((y.coordinates().col(0) - y.coordinates().col(1)).norm() - 3.0);
  return {bad == 0 && gap <= kTwoPointTol,
          std::to_string(runs - bad) + "/" + std::to_string(runs) +
              " traces non-increasing, two-point |dy-dx|=" + num(gap)};
}

Outcome geodesic_correctness() {
  double worst = 0.0;
  int graphs = 0;
  std::mt19937_64 rng(5000);
  for (std::uint64_t seed = 1; graphs < 20; ++seed) {
    const Index n = 10 + static_cast<Index>(seed % 41);
    MatrixXd w = MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
    w.diagonal().setZero();
    std::optional<NeighborGraph> g;
    if (seed % 2) {
      const MatrixXd raw = oracle::pairwise(oracle::random_matrix(3, n, 5000 + seed));
      w = oracle::knn_adjacency(raw, 4);
      g.emplace(knn_graph(DistanceMatrix(raw, DistanceScale::Raw), 4));
    } else {
      // sparse random graph with random weights
      std::vector<std::vector<Edge>> adj(static_cast<std::size_t>(n));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < i; ++j) {
          if (u(rng) < 4.0 / static_cast<double>(n)) {
            const double weight = 0.1 + u(rng);
            adj[static_cast<std::size_t>(i)].push_back({j, weight});
            adj[static_cast<std::size_t>(j)].push_back({i, weight});
            w(i, j) = w(j, i) = weight;
          }
        }
      }
      for (auto& list : adj) {
        std::sort(list.begin(), list.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
      }
      g.emplace(std::move(adj));
    }
    const MatrixXd fw = oracle::floyd_warshall(w);
    if (!fw.allFinite()) continue;
    worst = std::max(worst, (geodesic_distances(*g).values() - fw).cwiseAbs().maxCoeff());
    ++graphs;
  }
  return {worst <= kGeodesicTol, std::to_string(graphs) + " graphs, max deviation=" + num(worst)};
}

Outcome kernel_isomap_psd() {
  double worst = 0.0;
  int indefinite = 0, datasets = 0;
  for (std::uint64_t seed = 1; datasets < 50 || (indefinite == 0 && seed < 1000); ++seed) {
    const DataMatrix x(oracle::random_matrix(3, 20 + static_cast<Index>(seed % 31), 6000 + seed));
    DistanceMatrix g(MatrixXd::Zero(1, 1), DistanceScale::Raw);
    try {
      g = geodesic_distances(knn_graph(pairwise_euclidean(x, DistanceScale::Raw), 5));
    } catch (const DisconnectedError&) {
      continue;
    }
    const KernelMatrix kd2 = double_center(g.squared());
    // -1/2 H D H on the raw distances
    const KernelMatrix kd = double_center(DistanceMatrix(g.values(), DistanceScale::Squared));
    const double lo = Eigen::SelfAdjointEigenSolver<MatrixXd>(kd2.values()).eigenvalues().minCoeff();
    if (lo < -kPsdTol * kd2.values().cwiseAbs().maxCoeff()) ++indefinite;
    const KernelMatrix k = kernel_isomap_correct(kd2, kd, kernel_isomap_cstar(kd2, kd));
    const double min_eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(k.values()).eigenvalues().minCoeff();
    worst = std::max(worst, -min_eig / k.values().cwiseAbs().maxCoeff());
    if (datasets < 50) ++datasets;
  }
  return {worst <= kPsdTol && indefinite > 0,
          std::to_string(datasets) + " datasets, worst -min_eig/max|K'|=" + num(worst) +
              ", indefinite uncorrected kernels=" + std::to_string(indefinite)};
}

Outcome nystrom_exactness() {
  const Index n = 200;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index r = 1 + static_cast<Index>(seed % 8);
    const MatrixXd f = oracle::random_matrix(n, r, 7000 + seed);
    const MatrixXd k = f * f.transpose();
    const KernelMatrix full = nystrom_complete(partition_kernel(k, select_landmarks(n, r + 2, seed)));
    worst = std::max(worst, (full.values() - k).cwiseAbs().maxCoeff() / k.cwiseAbs().maxCoeff());
  }
  // full-rank RBF kernel, mean Frobenius error over 10 seeds per landmark count
  const MatrixXd pts = oracle::random_matrix(2, n, 7100);
  const MatrixXd k = (-oracle::pairwise(pts, true).array() / 2.0).exp().matrix();
  std::vector<double> sweep;
  for (Index m : {2, 5, 10, 20, 40, 80, 160, 200}) {
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      total += (nystrom_complete(partition_kernel(k, select_landmarks(n, m, seed))).values() - k).norm();
    }
    sweep.push_back(total / 10.0);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < sweep.size(); ++i) monotone = monotone && sweep[i] <= sweep[i - 1] + 1e-9;
  return {worst <= kNystromTol && monotone,
          "max relative error=" + num(worst) + ", sweep " + num(sweep.front()) + " -> " +
              num(sweep.back()) + (monotone ? " monotone" : " NOT monotone")};
}

Outcome landmark_full() {
  const DataMatrix x(oracle::random_matrix(5, 100, 8000));
  const Embedding full = fit_classical_mds(x, 3).second;
  const Embedding lm = fit_landmark_mds(x, 100, 3, 8);
  const double dev = oracle::sign_aligned_deviation(full.coordinates(), lm.coordinates());
  return {dev <= kLandmarkTol, "deviation=" + num(dev)};
}

Outcome oos_self_consistency() {
  const DataMatrix x(oracle::random_matrix(4, 60, 9000));
  std::vector<SpectralFit> fits;
  fits.push_back(fit_classical_mds(x, 3));
  fits.push_back(fit_kernel_mds(x, KernelSpec::rbf(), 3));
  fits.push_back(fit_kernel_mds(x, KernelSpec::cosine(), 3));
  fits.push_back(fit_isomap(x, 7, 2));
  fits.push_back(fit_kernel_isomap(x, 7, 2));
  double eigen_dev = 0.0, map_dev = 0.0;
  for (const auto& [model, y] : fits) {
    track_mean(y);
    eigen_dev = std::max(eigen_dev,
                         (oos_embed_eigen(model, x).coordinates() - y.coordinates()).cwiseAbs().maxCoeff());
  }
  int maps = 0;
  for (const auto& [model, y] : fits) {
    const KernelMap map = kernel_map_fit(x, y);
    if (map.condition >= kKernelMapCondition) continue;
    ++maps;
    map_dev = std::max(map_dev,
                       (kernel_map_apply(map, x).coordinates() - y.coordinates()).cwiseAbs().maxCoeff());
  }
  const SwissRoll train = synth_swiss_roll(500, 0.0, 9001);
  const SwissRoll test = synth_swiss_roll(50, 0.0, 9002);
  const auto [iso, y] = fit_isomap(train.points, 10, 2);
  const double route_dev = oracle::sign_aligned_deviation(
      oos_embed_eigen(iso, test.points).coordinates(),
      oos_embed_isomap_landmark_formula(iso, test.points).coordinates());
  return {eigen_dev <= kEigenRouteTol && maps > 0 && map_dev <= kKernelMapTol &&
              route_dev <= kRouteAgreeTol,
          "eigen route=" + num(eigen_dev) + ", kernel map=" + num(map_dev) + " (" +
              std::to_string(maps) + " maps), isomap routes=" + num(route_dev)};
}

Outcome swiss_roll() {
  const SwissRoll roll = synth_swiss_roll(1000, 0.0, 1);
  const auto start = Clock::now();
  const auto [model, y] = fit_isomap(roll.points, 10, 2);
  const double t = seconds_since(start);
  track_mean(y);
  const Embedding lin = fit_classical_mds(roll.points, 2).second;
  track_mean(lin);
  const double rv_iso = residual_variance(model.geodesics, oracle::pairwise(y.coordinates()));
  const double rv_lin = residual_variance(model.geodesics, oracle::pairwise(lin.coordinates()));
  return {rv_iso < kSwissRollRv && rv_iso < rv_lin && t < kSwissRollSeconds,
          "isomap rv=" + num(rv_iso) + ", classical rv=" + num(rv_lin) + ", isomap runtime=" +
              num(t) + "s"};
}

Outcome zero_mean() {
  const DataMatrix x(oracle::random_matrix(3, 80, 11000));
  track_mean(fit_kernel_mds(x, KernelSpec::linear(), 2).second);
  track_mean(fit_kernel_mds(x, KernelSpec::rbf(0.8), 2).second);
  track_mean(fit_kernel_isomap(x, 6, 2).second);
  track_mean(fit_pca(x, 2));
  return {g_worst_mean <= kMeanTol,
          std::to_string(g_mean_checks) + " embeddings, max |row mean|=" + num(g_worst_mean)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "manifold_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto sh = [&](const std::string& args) {
    const std::string cmd = std::string("\"") + MANIFOLD_EMBED_BIN + "\" " + args + " > \"" +
                            (dir / "log.txt").string() + "\" 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  const std::string roll = (dir / "roll.csv").string();
  const std::vector<std::string> fits{
      "--method sammon --seed 3", "--method mmds --seed 3", "--method nmmds --seed 3 --iters 100",
      "--method lmds --landmarks 40 --seed 3", "--method lisomap --landmarks 40 --k 8 --seed 3",
      "--method kisomap --k 8", "--method kmds --kernel rbf"};
  int identical = 0, total = 0;
  bool ok = true;
  for (int rep = 0; rep < 2 && ok; ++rep) {
    const std::string tag = std::to_string(rep);
    ok = sh("synth swiss-roll --n 300 --seed 12 --output " + (dir / ("roll" + tag + ".csv")).string());
  }
  ok = ok && slurp(dir / "roll0.csv") == slurp(dir / "roll1.csv");
  if (ok) fs::copy_file(dir / "roll0.csv", roll);
  int f = 0;
  for (const std::string& fit : fits) {
    if (!ok) break;
    ++total;
    const std::string base = "fit " + fit + " --input " + roll + " --dim 2 --output ";
    const fs::path a = dir / ("a" + std::to_string(f) + ".csv");
    const fs::path b = dir / ("b" + std::to_string(f) + ".csv");
    ++f;
    if (!sh(base + a.string()) || !sh(base + b.string())) {
      ok = false;
      break;
    }
    if (slurp(a) == slurp(b) && slurp(a.string() + ".model") == slurp(b.string() + ".model")) {
      ++identical;
    }
  }
  const std::string log = ok ? "" : " (command failed: " + slurp(dir / "log.txt") + ")";
  fs::remove_all(dir);
  return {ok && identical == total,
          std::to_string(identical) + "/" + std::to_string(total) +
              " fit outputs byte-identical, synth identical" + log};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"PCA equals classical MDS", pca_equivalence},
      {"double-centering identity", double_centering_identity},
      {"Sammon gradient and second derivative vs finite differences", sammon_derivatives},
      {"iterative solvers never increase stress; two-point Sammon exact", solver_monotonicity},
      {"Dijkstra geodesics equal Floyd-Warshall", geodesic_correctness},
      {"kernel Isomap corrected kernel is PSD", kernel_isomap_psd},
      {"Nystrom exact on low-rank kernels; error shrinks with m", nystrom_exactness},
      {"landmark MDS with m = n equals classical MDS", landmark_full},
      {"out-of-sample self-consistency", oos_self_consistency},
      {"Swiss roll: Isomap unrolls, beats classical MDS", swiss_roll},
      {"spectral embeddings have zero mean", zero_mean},
      {"fixed seeds give byte-identical outputs", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << (i + 1) << ": "
              << criteria[i].first << " -- " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
