#include "manifold/cli.hpp"

#include "manifold/distance.hpp"
#include "manifold/io.hpp"
#include "manifold/iterative.hpp"
#include "manifold/landmark.hpp"
#include "manifold/model_io.hpp"
#include "manifold/oos.hpp"
#include "manifold/spectral.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace manifold {

double swiss_roll_arc_length(double t) {
  return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
}

SwissRoll synth_swiss_roll(Index n, double noise, std::uint64_t seed) {
  if (n < 10) throw Error(ErrorCode::InvalidConfig, "swiss roll needs n >= 10");
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw Error(ErrorCode::InvalidConfig, "noise must be a nonnegative number");
  }
  constexpr double pi = std::numbers::pi;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(1.5 * pi, 4.5 * pi);
  std::uniform_real_distribution<double> height(0.0, 21.0);
  std::normal_distribution<double> jitter(0.0, 1.0);

  MatrixXd x(3, n);
  MatrixXd intrinsic(2, n);
  VectorXd t(n);
  for (Index j = 0; j < n; ++j) {
    t(j) = angle(rng);
    const double h = height(rng);
    x.col(j) << t(j) * std::cos(t(j)), h, t(j) * std::sin(t(j));
    intrinsic.col(j) << swiss_roll_arc_length(t(j)), h;
  }
  if (noise > 0.0) {
    for (Index j = 0; j < n; ++j) {
      for (Index r = 0; r < 3; ++r) x(r, j) += noise * jitter(rng);
    }
  }
  return {DataMatrix(std::move(x)), std::move(intrinsic), std::move(t)};
}

double residual_variance(const MatrixXd& reference, const MatrixXd& embedded) {
  if (reference.rows() != embedded.rows() || reference.cols() != embedded.cols() ||
      reference.rows() != reference.cols()) {
    throw Error(ErrorCode::ShapeError, "distance matrices must be square and the same size");
  }
  const Index n = reference.rows();
  double count = 0.0, sa = 0.0, sb = 0.0;
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      sa += reference(i, j);
      sb += embedded(i, j);
      count += 1.0;
    }
  }
  if (count == 0.0) return 0.0;
  const double ma = sa / count;
  const double mb = sb / count;
  double cab = 0.0, caa = 0.0, cbb = 0.0;
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double a = reference(i, j) - ma;
      const double b = embedded(i, j) - mb;
      cab += a * b;
      caa += a * a;
      cbb += b * b;
    }
  }
  if (caa == 0.0 || cbb == 0.0) return 1.0;
  const double r2 = cab * cab / (caa * cbb);
  return std::clamp(1.0 - r2, 0.0, 1.0);
}

QualityReport evaluate_quality(const DataMatrix& x, const Embedding& y, double runtime_seconds) {
  const DistanceMatrix dx = pairwise_euclidean(x, DistanceScale::Raw);
  const DistanceMatrix dy = pairwise_euclidean(DataMatrix(y.coordinates()), DistanceScale::Raw);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  QualityReport report;
  report.runtime_seconds = runtime_seconds;
  try {
    report.metric_stress = metric_stress(dx, y, true);
  } catch (const Error&) {
    report.metric_stress = nan;
  }
  try {
    report.sammon_stress = sammon_cost(dx, y);
  } catch (const Error&) {
    report.sammon_stress = nan;
  }
  report.residual_variance = residual_variance(dx.values(), dy.values());
  return report;
}

namespace {

struct MethodName {
  Method method;
  const char* name;
};

constexpr MethodName kMethodNames[] = {
    {Method::Cmds, "cmds"},     {Method::Kmds, "kmds"},   {Method::Isomap, "isomap"},
    {Method::Kisomap, "kisomap"}, {Method::Sammon, "sammon"}, {Method::Mmds, "mmds"},
    {Method::Nmmds, "nmmds"},   {Method::Lmds, "lmds"},   {Method::Lisomap, "lisomap"},
    {Method::Pca, "pca"},
};

}  // namespace

Method parse_method(const std::string& name) {
  for (const auto& entry : kMethodNames) {
    if (name == entry.name) return entry.method;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown method '" + name + "'");
}

const char* to_string(Method method) {
  for (const auto& entry : kMethodNames) {
    if (method == entry.method) return entry.name;
  }
  return "unknown";
}

bool is_spectral(Method method) {
  return method == Method::Cmds || method == Method::Kmds || method == Method::Isomap ||
         method == Method::Kisomap;
}

OosRoute parse_oos_route(const std::string& name) {
  if (name == "eigen") return OosRoute::Eigen;
  if (name == "landmark-formula") return OosRoute::LandmarkFormula;
  if (name == "kernel-map") return OosRoute::KernelMap;
  throw Error(ErrorCode::InvalidConfig, "unknown out-of-sample route '" + name + "'");
}

namespace {

bool needs_k(Method m) {
  return m == Method::Isomap || m == Method::Kisomap || m == Method::Lisomap;
}

bool needs_m(Method m) { return m == Method::Lmds || m == Method::Lisomap; }

void validate_method(const RunConfig& config, Method method) {
  if (needs_k(method) && !config.k) {
    throw Error(ErrorCode::InvalidConfig,
                std::string("method ") + to_string(method) + " requires --k");
  }
  if (needs_m(method) && !config.m) {
    throw Error(ErrorCode::InvalidConfig,
                std::string("method ") + to_string(method) + " requires --landmarks");
  }
}

}  // namespace

void validate(const RunConfig& config) {
  switch (config.command) {
    case Command::Fit:
      if (config.input.empty() || config.output.empty()) {
        throw Error(ErrorCode::InvalidConfig, "fit requires --input and --output");
      }
      if (config.p < 1) throw Error(ErrorCode::InvalidDimension, "--dim must be >= 1");
      validate_method(config, config.method);
      if (config.iters < 1) throw Error(ErrorCode::InvalidConfig, "--iters must be >= 1");
      if (!(config.lr > 0.0)) throw Error(ErrorCode::InvalidConfig, "--lr must be > 0");
      if (!(config.gamma > 0.0)) throw Error(ErrorCode::InvalidConfig, "--gamma must be > 0");
      break;
    case Command::Transform:
      if (config.model.empty() || config.input.empty() || config.output.empty()) {
        throw Error(ErrorCode::InvalidConfig, "transform requires --model, --input and --output");
      }
      break;
    case Command::Bench:
      if (config.input.empty() || config.output.empty() || config.methods.empty()) {
        throw Error(ErrorCode::InvalidConfig, "bench requires --input, --methods and --output");
      }
      break;
    case Command::Synth:
      if (config.output.empty()) throw Error(ErrorCode::InvalidConfig, "synth requires --output");
      break;
  }
}

namespace {

using Clock = std::chrono::steady_clock;

struct Summary {
  std::vector<std::pair<std::string, std::string>> lines;
  void add(const std::string& key, const std::string& value) { lines.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void print(std::ostream& out) const {
    for (const auto& [k, v] : lines) out << k << '=' << v << '\n';
  }
};

struct FitOutcome {
  Embedding embedding{MatrixXd()};
  std::optional<SpectralModel> spectral;
  std::optional<StressReport> stress;
  Summary summary;
};

KernelSpec kernel_spec(const RunConfig& config) {
  switch (config.kernel) {
    case KernelKind::Linear: return KernelSpec::linear();
    case KernelKind::Cosine: return KernelSpec::cosine();
    case KernelKind::Rbf: return KernelSpec::rbf(config.bandwidth);
    case KernelKind::Geodesic: return KernelSpec::geodesic(config.k.value_or(0));
  }
  return KernelSpec::linear();
}

IterConfig iter_config(const RunConfig& config, Method method) {
  IterConfig cfg;
  cfg.max_iters = config.iters;
  cfg.learning_rate = config.lr;
  cfg.seed = config.seed;
  if (method != Method::Nmmds) cfg.neighbors = config.k;
  return cfg;
}

FitOutcome fit_method(const RunConfig& config, Method method, const DataMatrix& x) {
  FitOutcome out;
  auto take_spectral = [&](SpectralFit fit) {
    out.summary.add("clamped_eigenvalues", std::to_string(fit.first.clamped_count));
    if (fit.first.uses_geodesics()) out.summary.add("graph_components", "1");
    if (fit.first.method == SpectralMethod::KernelIsomap) {
      out.summary.add("c_star", fit.first.c_star);
      out.summary.add("shift", fit.first.shift);
    }
    out.embedding = std::move(fit.second);
    out.spectral = std::move(fit.first);
  };
  auto take_iterative = [&](IterativeFit fit) {
    out.summary.add("iterations", std::to_string(fit.second.iterations));
    out.summary.add("final_stress", fit.second.final_stress);
    out.summary.add("converged", fit.second.converged ? "true" : "false");
    out.embedding = std::move(fit.first);
    out.stress = std::move(fit.second);
  };

  switch (method) {
    case Method::Cmds:
      take_spectral(fit_classical_mds(x, config.p));
      break;
    case Method::Kmds:
      take_spectral(fit_kernel_mds(x, kernel_spec(config), config.p));
      break;
    case Method::Isomap:
      take_spectral(fit_isomap(x, *config.k, config.p));
      break;
    case Method::Kisomap:
      take_spectral(fit_kernel_isomap(x, *config.k, config.p));
      break;
    case Method::Sammon:
      take_iterative(fit_sammon(x, config.p, iter_config(config, method)));
      break;
    case Method::Mmds:
      take_iterative(fit_metric_mds(pairwise_euclidean(x, DistanceScale::Raw), config.p,
                                    iter_config(config, method)));
      break;
    case Method::Nmmds:
      take_iterative(fit_nonmetric_mds(pairwise_euclidean(x, DistanceScale::Raw), config.p,
                                       iter_config(config, method)));
      break;
    case Method::Lmds:
      out.embedding = fit_landmark_mds(x, *config.m, config.p, config.seed);
      break;
    case Method::Lisomap:
      out.embedding = fit_landmark_isomap(x, *config.m, *config.k, config.p, config.seed);
      out.summary.add("graph_components", "1");
      break;
    case Method::Pca:
      out.embedding = fit_pca(x, config.p);
      break;
  }
  return out;
}

void add_quality(Summary& summary, const QualityReport& q) {
  summary.add("metric_stress", q.metric_stress);
  summary.add("sammon_stress", q.sammon_stress);
  summary.add("residual_variance", q.residual_variance);
  summary.add("runtime_seconds", q.runtime_seconds);
}

void add_warnings(Summary& summary, const Diagnostics& diag) {
  for (const auto& w : diag.warnings) summary.add("warning", w);
}

void run_fit(const RunConfig& config, std::ostream& os) {
  const PointTable table = load_points(config.input, config.labels);
  const DataMatrix& x = table.points;
  const auto start = Clock::now();
  FitOutcome fit = fit_method(config, config.method, x);
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

  Summary summary;
  Diagnostics diag;
  summary.add("command", "fit");
  summary.add("method", to_string(config.method));
  summary.add("points", std::to_string(x.size()));
  summary.add("input_dim", std::to_string(x.dim()));
  summary.add("dim", std::to_string(fit.embedding.dim()));
  for (const auto& line : fit.summary.lines) summary.lines.push_back(line);
  add_quality(summary, evaluate_quality(x, fit.embedding, seconds));

  write_file_atomic(config.output, embedding_to_csv(fit.embedding));
  const std::string model_path = config.model.empty() ? config.output + ".model" : config.model;
  StoredModel stored;
  stored.method = to_string(config.method);
  bool have_model = true;
  if (fit.spectral) {
    stored.payload = std::move(*fit.spectral);
  } else {
    try {
      stored.payload = kernel_map_fit(x, fit.embedding, config.gamma);
    } catch (const Error& e) {
      diag.warn(std::string("no model written: ") + e.what());
      have_model = false;
    }
  }
  if (have_model) {
    save_model(model_path, stored);
    summary.add("model", model_path);
  }
  if (fit.stress && !config.stress_trace.empty()) {
    std::ostringstream trace;
    write_stress_csv(trace, *fit.stress);
    write_file_atomic(config.stress_trace, trace.str());
  }
  if (!config.plot.empty()) {
    write_file_atomic(config.plot, scatter_svg(fit.embedding, table.labels));
  }
  add_warnings(summary, diag);
  summary.print(os);
}

void run_transform(const RunConfig& config, std::ostream& os) {
  const StoredModel stored = load_model(config.model);
  const DataMatrix x_t = load_points(config.input);
  const OosRoute route =
      config.oos.value_or(stored.is_spectral() ? OosRoute::Eigen : OosRoute::KernelMap);
  OosOptions options;
  options.test_intermediates = config.test_intermediates;
  Diagnostics diag;

  const auto* spectral = std::get_if<SpectralModel>(&stored.payload);
  std::optional<Embedding> y;
  switch (route) {
    case OosRoute::Eigen:
      if (!spectral) {
        throw Error(ErrorCode::InvalidConfig,
                    "eigen route needs a spectral model; use --oos kernel-map");
      }
      y = oos_embed_eigen(*spectral, x_t, options);
      break;
    case OosRoute::LandmarkFormula:
      if (!spectral) throw Error(ErrorCode::InvalidConfig, "landmark-formula route needs an Isomap model");
      y = oos_embed_isomap_landmark_formula(*spectral, x_t, options);
      break;
    case OosRoute::KernelMap:
      if (spectral) {
        const KernelMap map = kernel_map_fit(DataMatrix(spectral->training_points),
                                             spectral->embedding(), config.gamma);
        y = kernel_map_apply(map, x_t, &diag);
      } else {
        y = kernel_map_apply(std::get<KernelMap>(stored.payload), x_t, &diag);
      }
      break;
  }
  write_file_atomic(config.output, embedding_to_csv(*y));
  if (!config.plot.empty()) write_file_atomic(config.plot, scatter_svg(*y));

  Summary summary;
  summary.add("command", "transform");
  summary.add("method", stored.method);
  summary.add("route", route == OosRoute::Eigen             ? "eigen"
                       : route == OosRoute::LandmarkFormula ? "landmark-formula"
                                                            : "kernel-map");
  summary.add("points", std::to_string(x_t.size()));
  summary.add("dim", std::to_string(y->dim()));
  add_warnings(summary, diag);
  summary.print(os);
}

void run_bench(const RunConfig& config, std::ostream& os) {
  const DataMatrix x = load_points(config.input);
  const Index n = x.size();
  RunConfig local = config;
  if (!local.k) local.k = static_cast<int>(std::min<Index>(10, n - 1));
  if (!local.m) local.m = std::min<Index>(n, 100);

  const MatrixXd dx = pairwise_euclidean(x, DistanceScale::Raw).values();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::optional<MatrixXd> geo;
  try {
    geo = geodesic_distances(knn_graph(DistanceMatrix(dx, DistanceScale::Raw), *local.k)).values();
  } catch (const Error&) {
    geo.reset();
  }

  std::string table =
      "method,status,metric_stress,sammon_stress,residual_variance,"
      "residual_variance_geodesic,runtime_seconds\n";
  for (Method method : config.methods) {
    std::string row = std::string(to_string(method)) + ",";
    try {
      validate_method(local, method);
      // --k here is the graph size, not a Sammon / metric MDS neighborhood
      RunConfig per_method = local;
      if (method == Method::Sammon || method == Method::Mmds) per_method.k.reset();
      const auto start = Clock::now();
      const FitOutcome fit = fit_method(per_method, method, x);
      const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
      const QualityReport q = evaluate_quality(x, fit.embedding, seconds);
      const MatrixXd dy =
          pairwise_euclidean(DataMatrix(fit.embedding.coordinates()), DistanceScale::Raw).values();
      const double rv_geo = geo ? residual_variance(*geo, dy) : nan;
      row += "ok," + format_double(q.metric_stress) + "," + format_double(q.sammon_stress) + "," +
             format_double(q.residual_variance) + "," + format_double(rv_geo) + "," +
             format_double(seconds);
    } catch (const Error& e) {
      row += std::string(to_string(e.code())) + ",nan,nan,nan,nan,nan";
    }
    table += row + "\n";
  }
  write_file_atomic(config.output, table);
  os << table;
}

void run_synth(const RunConfig& config, std::ostream& os) {
  const SwissRoll roll = synth_swiss_roll(config.n, config.noise, config.seed);
  write_file_atomic(config.output, columns_to_csv(roll.points.values(), "x"));
  if (!config.intrinsic.empty()) {
    write_file_atomic(config.intrinsic, columns_to_csv(roll.intrinsic, "u"));
  }
  Summary summary;
  summary.add("command", "synth");
  summary.add("dataset", "swiss-roll");
  summary.add("points", std::to_string(config.n));
  summary.add("noise", config.noise);
  summary.add("seed", std::to_string(config.seed));
  summary.print(os);
}

}  // namespace

void run(const RunConfig& config, std::ostream& out) {
  validate(config);
  switch (config.command) {
    case Command::Fit: run_fit(config, out); break;
    case Command::Transform: run_transform(config, out); break;
    case Command::Bench: run_bench(config, out); break;
    case Command::Synth: run_synth(config, out); break;
  }
}

}  // namespace manifold
