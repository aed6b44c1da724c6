// Copyright 2026 The HyDeS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hydes/datastore.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hydes/errors.hpp"

namespace hydes {

namespace {

constexpr char kDumpMagic[4] = {'H', 'Y', 'D', 'E'};

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

uint32_t get_u32(const std::string& data, size_t offset) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<unsigned char>(data[offset + i])) << (8 * i);
  }
  return v;
}

void put_f32(std::string& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u32(out, bits);
}

float get_f32(const std::string& data, size_t offset) {
  const uint32_t bits = get_u32(data, offset);
  float v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(ErrorCode::kIoError, "short write to '" + path + "'");
}

void check_unit_rows(const Matrix& rows, const char* what) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    if (std::fabs(rows.row(i).norm() - 1.0) > 1e-4) {
      raise(ErrorCode::kInvalidParam,
            std::string(what) + ": row " + std::to_string(i) +
                " violates the unit-norm flag");
    }
  }
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_dump(const std::string& path, const EmbeddingDump& dump) {
  if (dump.unit_norm()) check_unit_rows(dump.rows, "write_dump");
  std::string bytes;
  bytes.reserve(20 + static_cast<size_t>(dump.rows.size()) * 4);
  bytes.append(kDumpMagic, 4);
  put_u32(bytes, EmbeddingDump::kVersion);
  put_u32(bytes, static_cast<uint32_t>(dump.rows.rows()));
  put_u32(bytes, static_cast<uint32_t>(dump.rows.cols()));
  put_u32(bytes, dump.flags);
  for (Eigen::Index i = 0; i < dump.rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < dump.rows.cols(); ++j) {
      put_f32(bytes, static_cast<float>(dump.rows(i, j)));
    }
  }
  write_file_bytes(path, bytes);
}

EmbeddingDump read_dump(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  if (bytes.size() < 20) {
    raise(ErrorCode::kTruncatedPayload, "dump shorter than its header");
  }
  if (std::memcmp(bytes.data(), kDumpMagic, 4) != 0) {
    raise(ErrorCode::kBadMagic, "expected magic \"HYDE\"");
  }
  const uint32_t version = get_u32(bytes, 4);
  if (version != EmbeddingDump::kVersion) {
    raise(ErrorCode::kVersionUnsupported,
          "dump version " + std::to_string(version) + " unsupported");
  }
  const uint32_t n = get_u32(bytes, 8);
  const uint32_t d = get_u32(bytes, 12);
  EmbeddingDump dump;
  dump.flags = get_u32(bytes, 16);
  const size_t expected = 20 + static_cast<size_t>(n) * d * 4;
  if (bytes.size() != expected) {
    raise(ErrorCode::kTruncatedPayload,
          "payload is " + std::to_string(bytes.size() - 20) + " bytes, header requires " +
              std::to_string(expected - 20));
  }
  dump.rows.resize(n, d);
  size_t offset = 20;
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = 0; j < d; ++j) {
      dump.rows(i, j) = static_cast<double>(get_f32(bytes, offset));
      offset += 4;
    }
  }
  if (dump.unit_norm()) check_unit_rows(dump.rows, "read_dump");
  return dump;
}

void write_labels(const std::string& path, const std::vector<int64_t>& labels) {
  std::ostringstream out;
  for (int64_t v : labels) out << v << '\n';
  write_file_bytes(path, out.str());
}

std::vector<int64_t> read_labels(const std::string& path) {
  std::istringstream in(read_file_bytes(path));
  std::vector<int64_t> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    char* end = nullptr;
    const long long v = std::strtoll(line.c_str(), &end, 10);
    if (end == line.c_str() || *end != '\0') {
      raise(ErrorCode::kConfigParse,
            path + ":" + std::to_string(line_no) + ": not an integer");
    }
    out.push_back(v);
  }
  return out;
}

void SyntheticSpec::validate() const {
  if (n_classes < 1 || samples_per_class < 1 || dim < 2 || class_kappa <= 0.0 ||
      view_kappa <= 0.0) {
    raise(ErrorCode::kInvalidParam, "SyntheticSpec fields must be positive (dim >= 2)");
  }
}

VectorDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, 0));
  constexpr double kMinAngleRad = 30.0 * M_PI / 180.0;
  const double max_cos = std::cos(kMinAngleRad);

  VectorDataset ds;
  ds.view_kappa = spec.view_kappa;
  ds.class_centers.resize(spec.n_classes, spec.dim);
  int placed = 0;
  for (int attempt = 0; attempt < 100000 && placed < spec.n_classes; ++attempt) {
    const Vector candidate = sample_uniform_sphere(spec.dim, rng);
    bool ok = true;
    for (int c = 0; c < placed && ok; ++c) {
      ok = ds.class_centers.row(c).dot(candidate) <= max_cos;
    }
    if (ok) ds.class_centers.row(placed++) = candidate;
  }
  if (placed < spec.n_classes) {
    raise(ErrorCode::kCenterRejectionExhausted,
          "could not place " + std::to_string(spec.n_classes) +
              " centers at >= 30 degrees in 1e5 attempts");
  }

  const Eigen::Index n =
      static_cast<Eigen::Index>(spec.n_classes) * spec.samples_per_class;
  ds.samples.resize(n, spec.dim);
  ds.labels.reserve(static_cast<size_t>(n));
  Eigen::Index row = 0;
  for (int c = 0; c < spec.n_classes; ++c) {
    const Vector center = ds.class_centers.row(c).transpose();
    for (int s = 0; s < spec.samples_per_class; ++s) {
      ds.samples.row(row++) = sample_vmf(center, spec.class_kappa, rng).transpose();
      ds.labels.push_back(c);
    }
  }
  return ds;
}

RasterDataset load_raster_dataset(const std::string& path, int height,
                                  int width, int channels) {
  if (height < 1 || width < 1 || (channels != 1 && channels != 3)) {
    raise(ErrorCode::kInvalidParam, "raster dims must be positive, channels 1 or 3");
  }
  const std::string bytes = read_file_bytes(path);
  const size_t record = 1 + static_cast<size_t>(channels) * height * width;
  if (bytes.empty() || bytes.size() % record != 0) {
    raise(ErrorCode::kMalformedRecordSize,
          "file size " + std::to_string(bytes.size()) +
              " is not a multiple of record size " + std::to_string(record));
  }
  RasterDataset ds;
  const size_t count = bytes.size() / record;
  ds.images.reserve(count);
  ds.labels.reserve(count);
  for (size_t r = 0; r < count; ++r) {
    const size_t base = r * record;
    ds.labels.push_back(static_cast<unsigned char>(bytes[base]));
    RasterImage img = RasterImage::zeros(height, width, channels);
    for (size_t i = 0; i + 1 < record; ++i) {
      img.values[i] =
          static_cast<double>(static_cast<unsigned char>(bytes[base + 1 + i])) / 255.0;
    }
    ds.images.push_back(std::move(img));
  }
  return ds;
}

void ManifestWriter::section(const std::string& name) {
  lines_.emplace_back("[" + name + "]", "");
}

void ManifestWriter::kv(const std::string& key, const std::string& value) {
  lines_.emplace_back(key, value);
}

void ManifestWriter::kv(const std::string& key, int64_t value) {
  kv(key, std::to_string(value));
}

void ManifestWriter::kv(const std::string& key, uint64_t value) {
  kv(key, std::to_string(value));
}

void ManifestWriter::kv(const std::string& key, double value) {
  kv(key, format_real(value));
}

void ManifestWriter::kv(const std::string& key, bool value) {
  kv(key, std::string(value ? "true" : "false"));
}

std::string ManifestWriter::str() const {
  std::ostringstream out;
  for (const auto& [key, value] : lines_) {
    if (value.empty() && !key.empty() && key.front() == '[') {
      out << key << '\n';
    } else {
      out << key << " = " << value << '\n';
    }
  }
  return out.str();
}

void ManifestWriter::write(const std::string& path) const {
  write_file_bytes(path, str());
}

}  // namespace hydes
