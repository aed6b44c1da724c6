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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hydes/config.hpp"
#include "hydes/datastore.hpp"
#include "hydes/errors.hpp"
#include "oracles.hpp"

using namespace hydes;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "hydes_datastore_tests";
    fs::create_directories(p);
    return p;
  }();
  return (dir / name).string();
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("dump round-trips bit-for-bit") {
  Rng rng(10);
  EmbeddingDump dump;
  dump.rows = oracles::random_unit_rows(7, 5, rng);
  dump.flags = EmbeddingDump::kFlagUnitNorm;
  const std::string path_a = temp_path("roundtrip_a.hyde");
  const std::string path_b = temp_path("roundtrip_b.hyde");
  write_dump(path_a, dump);
  const EmbeddingDump loaded = read_dump(path_a);
  CHECK(loaded.flags == dump.flags);
  CHECK(loaded.rows.rows() == 7);
  write_dump(path_b, loaded);
  CHECK(file_bytes(path_a) == file_bytes(path_b));
  // float32 payload: values survive exactly after the f32 cast.
  for (Eigen::Index i = 0; i < 7; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      CHECK(loaded.rows(i, j) == static_cast<double>(static_cast<float>(dump.rows(i, j))));
    }
  }
}

TEST_CASE("empty dump is valid") {
  EmbeddingDump dump;
  dump.rows.resize(0, 4);
  const std::string path = temp_path("empty.hyde");
  write_dump(path, dump);
  const EmbeddingDump loaded = read_dump(path);
  CHECK(loaded.rows.rows() == 0);
  CHECK(file_bytes(path).size() == 20);
}

TEST_CASE("dump error taxonomy") {
  Rng rng(11);
  EmbeddingDump dump;
  dump.rows = oracles::random_unit_rows(3, 4, rng);
  const std::string path = temp_path("errors.hyde");
  write_dump(path, dump);
  const std::string good = file_bytes(path);

  write_bytes(path, good.substr(0, good.size() - 1));
  CHECK_THROWS_WITH_AS(read_dump(path), doctest::Contains("TruncatedPayload"), Error);

  write_bytes(path, good + "x");
  CHECK_THROWS_WITH_AS(read_dump(path), doctest::Contains("TruncatedPayload"), Error);

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  write_bytes(path, bad_magic);
  CHECK_THROWS_WITH_AS(read_dump(path), doctest::Contains("BadMagic"), Error);

  std::string bad_version = good;
  bad_version[4] = 9;
  write_bytes(path, bad_version);
  CHECK_THROWS_WITH_AS(read_dump(path), doctest::Contains("VersionUnsupported"), Error);

  EmbeddingDump not_unit;
  not_unit.rows = Matrix::Ones(2, 3);
  not_unit.flags = EmbeddingDump::kFlagUnitNorm;
  CHECK_THROWS_WITH_AS(write_dump(temp_path("nu.hyde"), not_unit),
                       doctest::Contains("InvalidParam"), Error);
}

TEST_CASE("labels sidecar round-trip") {
  const std::vector<int64_t> labels = {0, 2, 1, 1, 0, 5};
  const std::string path = temp_path("labels.txt");
  write_labels(path, labels);
  CHECK(read_labels(path) == labels);
}

TEST_CASE("synthetic generation is deterministic and respects the spec") {
  SyntheticSpec spec;
  spec.n_classes = 3;
  spec.samples_per_class = 40;
  spec.dim = 8;
  spec.seed = 4;
  const VectorDataset a = generate_synthetic(spec);
  const VectorDataset b = generate_synthetic(spec);
  CHECK(a.samples == b.samples);  // bitwise
  CHECK(a.labels == b.labels);
  CHECK(a.samples.rows() == 120);
  CHECK(a.class_centers.rows() == 3);
  // Pairwise center angles >= 30 degrees.
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double cosangle = a.class_centers.row(i).dot(a.class_centers.row(j));
      CHECK(cosangle <= std::cos(30.0 * M_PI / 180.0) + 1e-12);
    }
  }
  for (Eigen::Index i = 0; i < a.samples.rows(); ++i) {
    CHECK(a.samples.row(i).norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("synthetic concentration limit keeps classes tight") {
  SyntheticSpec spec;
  spec.n_classes = 2;
  spec.samples_per_class = 50;
  spec.dim = 6;
  spec.class_kappa = 1e8;
  spec.seed = 9;
  const VectorDataset ds = generate_synthetic(spec);
  for (Eigen::Index i = 0; i < ds.samples.rows(); ++i) {
    const int label = static_cast<int>(ds.labels[static_cast<size_t>(i)]);
    const double angle = std::acos(std::clamp(
        ds.samples.row(i).dot(ds.class_centers.row(label)), -1.0, 1.0));
    CHECK(angle < 0.1 * M_PI / 180.0);
  }

  SyntheticSpec single = spec;
  single.n_classes = 1;
  const VectorDataset lone = generate_synthetic(single);
  for (int64_t l : lone.labels) CHECK(l == 0);
}

TEST_CASE("center rejection exhausts on impossible packings") {
  SyntheticSpec spec;
  spec.n_classes = 13;  // 13 * 30 degrees > 360: cannot pack on a circle
  spec.samples_per_class = 1;
  spec.dim = 2;
  CHECK_THROWS_WITH_AS(generate_synthetic(spec),
                       doctest::Contains("CenterRejectionExhausted"), Error);
}

TEST_CASE("raster reader parses the record layout") {
  // Two records, 2x2 single channel: label byte + 4 pixel bytes.
  std::string bytes;
  bytes.push_back(3);
  for (unsigned char px : {0, 85, 170, 255}) bytes.push_back(static_cast<char>(px));
  bytes.push_back(7);
  for (int i = 0; i < 4; ++i) bytes.push_back(0);
  const std::string path = temp_path("two.records");
  write_bytes(path, bytes);

  const RasterDataset ds = load_raster_dataset(path, 2, 2, 1);
  REQUIRE(ds.size() == 2);
  CHECK(ds.labels[0] == 3);
  CHECK(ds.labels[1] == 7);
  CHECK(ds.images[0].at(0, 0, 0) == doctest::Approx(0.0));
  CHECK(ds.images[0].at(0, 0, 1) == doctest::Approx(85.0 / 255.0));
  CHECK(ds.images[0].at(0, 1, 0) == doctest::Approx(170.0 / 255.0));
  CHECK(ds.images[0].at(0, 1, 1) == doctest::Approx(1.0));
  for (double v : ds.images[1].values) CHECK(v == 0.0);

  write_bytes(path, bytes + "z");
  CHECK_THROWS_WITH_AS(load_raster_dataset(path, 2, 2, 1),
                       doctest::Contains("MalformedRecordSize"), Error);
}

TEST_CASE("manifests parse back through the config reader") {
  ManifestWriter mw;
  mw.section("run");
  mw.kv("command", std::string("train"));
  mw.kv("seed", static_cast<uint64_t>(42));
  mw.section("train");
  mw.kv("kappa", 0.6931);
  mw.kv("enabled", true);
  const std::string path = temp_path("manifest.txt");
  mw.write(path);

  const Config cfg = Config::parse_file(path);
  CHECK(cfg.get_string("run.command") == "train");
  CHECK(cfg.get_u64("run.seed") == 42);
  CHECK(cfg.get_real("train.kappa") == doctest::Approx(0.6931));
  CHECK(cfg.get_bool("train.enabled"));
}
