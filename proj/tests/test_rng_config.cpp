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

#include "hydes/config.hpp"
#include "hydes/errors.hpp"
#include "hydes/rng.hpp"

using namespace hydes;

TEST_CASE("rng streams are deterministic and seed-separated") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const uint64_t x = a.next_u64();
    CHECK(x == b.next_u64());
  }
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 10; ++i) differs |= (a2.next_u64() != c.next_u64());
  CHECK(differs);

  CHECK(derive_seed(7, 0) != derive_seed(7, 1));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("uniform and normal have sane first moments") {
  Rng rng(1);
  double sum = 0, sum_sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum_sq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum_sq / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));

  double nsum = 0, nsq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    nsum += z;
    nsq += z * z;
  }
  CHECK(std::fabs(nsum / n) < 0.01);
  CHECK(nsq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma and beta moments") {
  Rng rng(2);
  for (double alpha : {0.5, 1.5, 4.0}) {
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += rng.gamma(alpha);
    CHECK(sum / n == doctest::Approx(alpha).epsilon(0.03));
  }
  double bsum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) bsum += rng.beta(1.5, 1.5);
  CHECK(bsum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("config parses sections, types, and errors with line numbers") {
  const std::string text =
      "top = 1\n"
      "# comment\n"
      "[train]\n"
      "kappa = 0.6931\n"
      "epochs = 50\n"
      "flag = true\n"
      "dims = 64,128\n"
      "name = hello world\n";
  const Config cfg = Config::parse_string(text, "test.ini");
  CHECK(cfg.get_int("top") == 1);
  CHECK(cfg.get_real("train.kappa") == doctest::Approx(0.6931));
  CHECK(cfg.get_int("train.epochs") == 50);
  CHECK(cfg.get_bool("train.flag"));
  CHECK(cfg.get_int_list("train.dims") == std::vector<int>{64, 128});
  CHECK(cfg.get_string("train.name") == "hello world");
  CHECK(cfg.get_real("train.missing", 2.5) == 2.5);
  CHECK_THROWS_WITH_AS(cfg.get_string("absent"), doctest::Contains("ConfigParse"),
                       Error);

  try {
    Config::parse_string("a = 1\nbroken line\n", "bad.ini");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigParse);
    CHECK(std::string(e.what()).find("bad.ini:2") != std::string::npos);
  }

  CHECK_THROWS_AS(Config::parse_string("[unterminated\n"), Error);
  CHECK_THROWS_AS(Config::parse_string("[t]\nkappa = abc\n").get_real("t.kappa"),
                  Error);
}
