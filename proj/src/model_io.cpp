#include "manifold/model_io.hpp"

#include "manifold/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace manifold {

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'F', 'E', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kSpectralPayload = 1;
constexpr std::uint32_t kKernelMapPayload = 2;

static_assert(std::endian::native == std::endian::little, "model files are little-endian");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(ErrorCode::IoError, "model file is truncated");
  return value;
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const auto size = get<std::uint32_t>(in);
  if (size > (1u << 20)) throw Error(ErrorCode::IoError, "model file string field is too long");
  std::string s(size, '\0');
  in.read(s.data(), size);
  if (!in) throw Error(ErrorCode::IoError, "model file is truncated");
  return s;
}

void put_matrix(std::ostream& out, const MatrixXd& m) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

MatrixXd get_matrix(std::istream& in) {
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  if (rows > (1u << 24) || cols > (1u << 24) || rows * cols > (1ull << 31)) {
    throw Error(ErrorCode::IoError, "model file matrix is implausibly large");
  }
  MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) throw Error(ErrorCode::IoError, "model file is truncated");
  return m;
}

VectorXd get_vector(std::istream& in) {
  MatrixXd m = get_matrix(in);
  if (m.cols() > 1) throw Error(ErrorCode::IoError, "model file vector field has several columns");
  return m.size() == 0 ? VectorXd() : VectorXd(m.col(0));
}

void write_spectral(std::ostream& out, const SpectralModel& model) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.method));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.kernel.kind));
  put<double>(out, model.kernel.bandwidth);
  put<std::int64_t>(out, model.kernel.k);
  put<double>(out, model.shift);
  put<double>(out, model.c_star);
  put<std::int64_t>(out, model.p);
  put<std::int64_t>(out, model.clamped_count);
  put_matrix(out, model.eigenvalues);
  put_matrix(out, model.eigenvectors);
  put_matrix(out, model.reference_kernel);
  put_matrix(out, model.training_points);
  put_matrix(out, model.center);
  put_matrix(out, model.geodesics);
}

SpectralModel read_spectral(std::istream& in) {
  SpectralModel model;
  const auto method = get<std::uint32_t>(in);
  const auto kind = get<std::uint32_t>(in);
  if (method > static_cast<std::uint32_t>(SpectralMethod::KernelIsomap) ||
      kind > static_cast<std::uint32_t>(KernelKind::Geodesic)) {
    throw Error(ErrorCode::IoError, "model file has an unknown method or kernel");
  }
  model.method = static_cast<SpectralMethod>(method);
  model.kernel.kind = static_cast<KernelKind>(kind);
  model.kernel.bandwidth = get<double>(in);
  model.kernel.k = static_cast<int>(get<std::int64_t>(in));
  model.shift = get<double>(in);
  model.c_star = get<double>(in);
  model.p = static_cast<Index>(get<std::int64_t>(in));
  model.clamped_count = static_cast<int>(get<std::int64_t>(in));
  model.eigenvalues = get_vector(in);
  model.eigenvectors = get_matrix(in);
  model.reference_kernel = get_matrix(in);
  model.training_points = get_matrix(in);
  model.center = get_vector(in);
  model.geodesics = get_matrix(in);
  const Index n = model.eigenvalues.size();
  if (model.eigenvectors.rows() != n || model.eigenvectors.cols() != n ||
      model.reference_kernel.rows() != n || model.training_points.cols() != n ||
      model.p < 1 || model.p > n) {
    throw Error(ErrorCode::IoError, "model file spectral fields are inconsistent");
  }
  return model;
}

void write_kernel_map(std::ostream& out, const KernelMap& map) {
  put<double>(out, map.gamma);
  put<double>(out, map.condition);
  put_matrix(out, map.coefficients);
  put_matrix(out, map.bandwidths);
  put_matrix(out, map.training_points);
  put_matrix(out, map.training_embedding);
}

KernelMap read_kernel_map(std::istream& in) {
  KernelMap map;
  map.gamma = get<double>(in);
  map.condition = get<double>(in);
  map.coefficients = get_matrix(in);
  map.bandwidths = get_vector(in);
  map.training_points = get_matrix(in);
  map.training_embedding = get_matrix(in);
  const Index n = map.training_points.cols();
  if (map.coefficients.rows() != n || map.bandwidths.size() != n ||
      map.training_embedding.cols() != n || map.training_embedding.rows() != map.coefficients.cols()) {
    throw Error(ErrorCode::IoError, "model file kernel-map fields are inconsistent");
  }
  return map;
}

}  // namespace

void write_model(std::ostream& out, const StoredModel& model) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, model.is_spectral() ? kSpectralPayload : kKernelMapPayload);
  put_string(out, model.method);
  if (const auto* spectral = std::get_if<SpectralModel>(&model.payload)) {
    write_spectral(out, *spectral);
  } else {
    write_kernel_map(out, std::get<KernelMap>(model.payload));
  }
}

StoredModel read_model(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(ErrorCode::IoError, "not a model file (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) {
    throw Error(ErrorCode::IoError, "unsupported model file version " + std::to_string(version));
  }
  const auto kind = get<std::uint32_t>(in);
  StoredModel model;
  model.method = get_string(in);
  if (kind == kSpectralPayload) {
    model.payload = read_spectral(in);
  } else if (kind == kKernelMapPayload) {
    model.payload = read_kernel_map(in);
  } else {
    throw Error(ErrorCode::IoError, "unknown model payload kind " + std::to_string(kind));
  }
  return model;
}

void save_model(const std::filesystem::path& path, const StoredModel& model) {
  std::ostringstream buffer(std::ios::binary);
  write_model(buffer, model);
  write_file_atomic(path, buffer.str());
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace manifold
