#pragma once

#include "manifold/oos.hpp"
#include "manifold/spectral.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

namespace manifold {

/// What `fit` leaves behind for `transform`: a spectral model (eigenfunction
/// routes) or a kernel map (any method). `method` is the CLI method name.
struct StoredModel {
  std::string method;
  std::variant<SpectralModel, KernelMap> payload;

  bool is_spectral() const noexcept { return std::holds_alternative<SpectralModel>(payload); }
};

void write_model(std::ostream& out, const StoredModel& model);
StoredModel read_model(std::istream& in);

/// Writes to a temporary sibling and renames it over `path`.
void save_model(const std::filesystem::path& path, const StoredModel& model);
StoredModel load_model(const std::filesystem::path& path);

}  // namespace manifold
