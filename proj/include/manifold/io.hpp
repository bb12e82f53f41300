#pragma once

#include "manifold/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace manifold {

struct PointTable {
  DataMatrix points;
  /// One label per point when a label column was requested, else empty.
  std::vector<std::string> labels;
};

/// Parses CSV text: one row per point, numeric cells, optional header
/// (detected when any cell of the first row is not a number). Blank lines
/// are skipped. `label_column` is a 0-based index if it is an integer,
/// otherwise a header name; that column is kept as text and excluded from the coordinates.
PointTable parse_points(std::istream& in, const std::optional<std::string>& label_column = {});

DataMatrix load_points(const std::filesystem::path& path);
PointTable load_points(const std::filesystem::path& path,
                       const std::optional<std::string>& label_column);

/// Shortest decimal that reads back to the same double.
std::string format_double(double value);

/// Header `<prefix>0,...`, one row per column of `m`.
std::string columns_to_csv(const MatrixXd& m, const std::string& prefix);

/// Embedding CSV: header dim_0,...,dim_{p-1}.
std::string embedding_to_csv(const Embedding& y);

void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Scatter plot of the first two rows of `y` as a standalone SVG. Points are
/// colored by label (first-seen order) when labels are given.
std::string scatter_svg(const Embedding& y, const std::vector<std::string>& labels = {});

}  // namespace manifold
