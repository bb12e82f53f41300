#pragma once

#include "manifold/core.hpp"
#include "manifold/kernel.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace manifold {

struct SwissRoll {
  DataMatrix points;    // 3 x n
  MatrixXd intrinsic;   // 2 x n: arc length along the spiral, height
  VectorXd t;           // spiral parameter
};

/// x = (t cos t, h, t sin t), t ~ U[1.5 pi, 4.5 pi], h ~ U[0, 21], plus
/// isotropic Gaussian noise of standard deviation `noise`.
SwissRoll synth_swiss_roll(Index n, double noise, std::uint64_t seed);

/// Arc length of the spiral (t cos t, t sin t) from 0 to t.
double swiss_roll_arc_length(double t);

/// 1 - R^2 between the upper triangles of two distance matrices, in [0, 1].
double residual_variance(const MatrixXd& reference, const MatrixXd& embedded);

struct QualityReport {
  double metric_stress = 0.0;
  /// NaN when undefined (coincident input points).
  double sammon_stress = 0.0;
  double residual_variance = 0.0;
  double runtime_seconds = 0.0;
};

QualityReport evaluate_quality(const DataMatrix& x, const Embedding& y, double runtime_seconds);

enum class Command { Fit, Transform, Bench, Synth };

enum class Method { Cmds, Kmds, Isomap, Kisomap, Sammon, Mmds, Nmmds, Lmds, Lisomap, Pca };

Method parse_method(const std::string& name);
const char* to_string(Method method);
bool is_spectral(Method method);

enum class OosRoute { Eigen, LandmarkFormula, KernelMap };

OosRoute parse_oos_route(const std::string& name);

struct RunConfig {
  Command command = Command::Fit;
  Method method = Method::Cmds;
  std::string input;
  std::string output;
  std::string model;  // defaults to <output>.model for fit
  Index p = 2;
  std::optional<int> k;
  std::optional<Index> m;
  KernelKind kernel = KernelKind::Linear;
  double bandwidth = 0.0;
  int iters = 500;
  double lr = 0.3;
  double gamma = 0.5;
  std::uint64_t seed = 0;
  std::string plot;
  std::optional<std::string> labels;
  std::string stress_trace;
  std::optional<OosRoute> oos;
  bool test_intermediates = false;
  std::vector<Method> methods;  // bench
  Index n = 1000;               // synth
  double noise = 0.0;           // synth
  std::string intrinsic;        // synth: optional intrinsic-coordinate CSV
};

/// Throws InvalidConfig when a method lacks a required parameter.
void validate(const RunConfig& config);

/// Executes one command. Summary lines (key=value) go to `out`.
/// Module errors propagate as manifold::Error.
void run(const RunConfig& config, std::ostream& out);

}  // namespace manifold
