#include "manifold/cli.hpp"
#include "manifold/distance.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<manifold::Method> parse_method_list(const std::string& list) {
  std::vector<manifold::Method> methods;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) methods.push_back(manifold::parse_method(item));
  }
  return methods;
}

manifold::KernelKind parse_kernel(const std::string& name) {
  if (name == "linear") return manifold::KernelKind::Linear;
  if (name == "cosine") return manifold::KernelKind::Cosine;
  if (name == "rbf") return manifold::KernelKind::Rbf;
  throw manifold::Error(manifold::ErrorCode::InvalidConfig, "unknown kernel '" + name + "'");
}

void report(const manifold::Error& e) {
  std::cerr << "error code=" << manifold::to_string(e.code()) << " message=\"" << e.what()
            << "\"\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical, kernel, iterative and landmark MDS / Isomap embeddings"};
  app.require_subcommand(1);

  manifold::RunConfig cfg;
  std::string method = "cmds";
  std::string kernel = "linear";
  std::string oos;
  std::string methods;
  int k = 0;
  long long m = 0;
  long long p = 2;
  long long n = 1000;

  auto* fit = app.add_subcommand("fit", "Embed a CSV point set");
  fit->add_option("--method", method, "cmds|kmds|isomap|kisomap|sammon|mmds|nmmds|lmds|lisomap|pca")
      ->required();
  fit->add_option("--input", cfg.input, "CSV, one row per point")->required();
  fit->add_option("--output", cfg.output, "Embedding CSV")->required();
  fit->add_option("--dim", p, "Embedding dimension")->required();
  fit->add_option("--k", k, "Neighbor count");
  fit->add_option("--landmarks", m, "Landmark count");
  fit->add_option("--kernel", kernel, "linear|cosine|rbf (kmds)");
  fit->add_option("--bandwidth", cfg.bandwidth, "RBF width (default: median distance)");
  fit->add_option("--iters", cfg.iters, "Iteration limit");
  fit->add_option("--lr", cfg.lr, "Step size (Sammon magic factor)");
  fit->add_option("--gamma", cfg.gamma, "Kernel-map bandwidth factor");
  fit->add_option("--seed", cfg.seed, "Random seed");
  fit->add_option("--plot", cfg.plot, "SVG scatter of the first two dimensions");
  fit->add_option("--labels", cfg.labels, "Label column (header name or 0-based index)");
  fit->add_option("--model", cfg.model, "Model file (default: <output>.model)");
  fit->add_option("--stress-trace", cfg.stress_trace, "Per-iteration stress CSV");

  auto* transform = app.add_subcommand("transform", "Embed new points with a fitted model");
  transform->add_option("--model", cfg.model, "Model file")->required();
  transform->add_option("--input", cfg.input, "CSV, one row per point")->required();
  transform->add_option("--output", cfg.output, "Embedding CSV")->required();
  transform->add_option("--oos", oos, "eigen|landmark-formula|kernel-map");
  transform->add_option("--gamma", cfg.gamma, "Kernel-map bandwidth factor");
  transform->add_flag("--test-intermediates", cfg.test_intermediates,
                      "Route geodesics through other test points as well");
  transform->add_option("--plot", cfg.plot, "SVG scatter of the first two dimensions");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->require_subcommand(1);
  auto* roll = synth->add_subcommand("swiss-roll", "Swiss roll in 3-D");
  roll->add_option("--n", n, "Point count");
  roll->add_option("--noise", cfg.noise, "Gaussian noise scale");
  roll->add_option("--seed", cfg.seed, "Random seed");
  roll->add_option("--output", cfg.output, "CSV path")->required();
  roll->add_option("--intrinsic", cfg.intrinsic, "CSV path for (arc length, height)");

  auto* bench = app.add_subcommand("bench", "Compare methods on one dataset");
  bench->add_option("--input", cfg.input, "CSV, one row per point")->required();
  bench->add_option("--methods", methods, "Comma-separated method list")->required();
  bench->add_option("--output", cfg.output, "Comparison CSV")->required();
  bench->add_option("--dim", p, "Embedding dimension");
  bench->add_option("--k", k, "Neighbor count (default 10)");
  bench->add_option("--landmarks", m, "Landmark count (default min(n, 100))");
  bench->add_option("--iters", cfg.iters, "Iteration limit");
  bench->add_option("--seed", cfg.seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) {
      cfg.command = manifold::Command::Fit;
      cfg.method = manifold::parse_method(method);
      cfg.kernel = parse_kernel(kernel);
    } else if (transform->parsed()) {
      cfg.command = manifold::Command::Transform;
      if (!oos.empty()) cfg.oos = manifold::parse_oos_route(oos);
    } else if (synth->parsed()) {
      cfg.command = manifold::Command::Synth;
    } else {
      cfg.command = manifold::Command::Bench;
      cfg.methods = parse_method_list(methods);
    }
    cfg.p = static_cast<manifold::Index>(p);
    cfg.n = static_cast<manifold::Index>(n);
    if (k != 0) cfg.k = k;
    if (m != 0) cfg.m = static_cast<manifold::Index>(m);
    manifold::run(cfg, std::cout);
  } catch (const manifold::DisconnectedError& e) {
    report(e);
    std::cerr << "graph_components=" << e.components() << '\n';
    return 1;
  } catch (const manifold::Error& e) {
    report(e);
    return 1;
  }
  return 0;
}
