#include "manifold/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace manifold {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.emplace_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

}  // namespace

PointTable parse_points(std::istream& in, const std::optional<std::string>& label_column) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.emplace_back(line_no, split_row(line));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "input contains no rows");

  const auto& first = rows.front().second;
  const std::size_t width = first.size();

  std::optional<std::size_t> label_index;
  bool named_label = false;
  if (label_column) {
    // an integer is always an index; anything else names a header cell
    if (auto idx = parse_number(*label_column);
        idx && *idx >= 0 && *idx == static_cast<double>(static_cast<std::size_t>(*idx))) {
      label_index = static_cast<std::size_t>(*idx);
    } else if (const auto it = std::find(first.begin(), first.end(), *label_column);
               it != first.end()) {
      label_index = static_cast<std::size_t>(it - first.begin());
      named_label = true;
    }
    if (!label_index || *label_index >= width) {
      throw Error(ErrorCode::InvalidConfig, "label column '" + *label_column + "' not found");
    }
  }

  // text in the label column alone does not make a header
  bool has_header = named_label;
  for (std::size_t c = 0; c < width && !has_header; ++c) {
    if (label_index && c == *label_index) continue;
    has_header = !parse_number(first[c]).has_value();
  }
  const std::size_t begin = has_header ? 1 : 0;

  const std::size_t dims = width - (label_index ? 1 : 0);
  const std::size_t count = rows.size() - begin;
  if (count == 0) throw Error(ErrorCode::EmptyInput, "input has a header but no data rows");
  if (dims == 0) throw Error(ErrorCode::EmptyInput, "input has no coordinate columns");

  MatrixXd values(static_cast<Index>(dims), static_cast<Index>(count));
  std::vector<std::string> labels;
  for (std::size_t r = begin; r < rows.size(); ++r) {
    const auto& [number, cells] = rows[r];
    if (cells.size() != width) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(number) + ": expected " +
                                             std::to_string(width) + " columns, found " +
                                             std::to_string(cells.size()));
    }
    Index row = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (label_index && c == *label_index) {
        labels.push_back(cells[c]);
        continue;
      }
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(number) + ", column " +
                                               std::to_string(c + 1) + ": not a number: '" +
                                               cells[c] + "'");
      }
      values(row++, static_cast<Index>(r - begin)) = *v;
    }
  }
  return {DataMatrix(std::move(values)), std::move(labels)};
}

PointTable load_points(const std::filesystem::path& path,
                       const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_points(in, label_column);
}

DataMatrix load_points(const std::filesystem::path& path) {
  return load_points(path, std::nullopt).points;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string columns_to_csv(const MatrixXd& m, const std::string& prefix) {
  std::string out;
  for (Index k = 0; k < m.rows(); ++k) {
    if (k > 0) out += ',';
    out += prefix + std::to_string(k);
  }
  out += '\n';
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index k = 0; k < m.rows(); ++k) {
      if (k > 0) out += ',';
      out += format_double(m(k, j));
    }
    out += '\n';
  }
  return out;
}

std::string embedding_to_csv(const Embedding& y) {
  return columns_to_csv(y.coordinates(), "dim_");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string());
  }
}

std::string scatter_svg(const Embedding& y, const std::vector<std::string>& labels) {
  static constexpr std::array<const char*, 10> kPalette = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  constexpr double size = 600.0;
  constexpr double margin = 30.0;

  const MatrixXd& c = y.coordinates();
  const Index n = c.cols();
  VectorXd xs = c.row(0).transpose();
  VectorXd ys = c.rows() > 1 ? VectorXd(c.row(1).transpose()) : VectorXd::Zero(n);
  auto scale = [&](const VectorXd& v) {
    const double lo = v.minCoeff();
    const double span = v.maxCoeff() - lo;
    return VectorXd(((v.array() - lo) / (span > 0.0 ? span : 1.0)) * (size - 2 * margin) + margin);
  };
  xs = scale(xs);
  ys = scale(ys);

  std::map<std::string, std::size_t> color_of;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (Index j = 0; j < n; ++j) {
    std::size_t color = 0;
    if (!labels.empty()) {
      const auto [it, inserted] = color_of.try_emplace(labels[static_cast<std::size_t>(j)],
                                                       color_of.size());
      color = it->second;
    }
    out << "<circle cx=\"" << format_double(xs(j)) << "\" cy=\""
        << format_double(size - ys(j)) << "\" r=\"2.5\" fill=\""
        << kPalette[color % kPalette.size()] << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace manifold
