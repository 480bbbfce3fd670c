#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "ltr/config.hpp"
#include "ltr/error.hpp"
#include "ltr/rng.hpp"

using namespace ltr;

TEST_CASE("rng repeats per seed and diverges across seeds") {
  Rng a(7), b(7), c(8);
  bool diverged = false;
  for (int i = 0; i < 64; ++i) {
    auto x = a.next_u64();
    CHECK(x == b.next_u64());
    if (x != c.next_u64()) diverged = true;
  }
  CHECK(diverged);
}

TEST_CASE("uniform and uniform_int stay in range") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.uniform_int(7) < 7);
  }
  CHECK(rng.uniform_int(1) == 0);
}

TEST_CASE("binomial edge cases and mean") {
  Rng rng(11);
  CHECK(rng.binomial(0, 0.5) == 0);
  CHECK(rng.binomial(100, 0.0) == 0);
  CHECK(rng.binomial(100, 1.0) == 100);
  long long total = 0;
  for (int i = 0; i < 4000; ++i) {
    long long x = rng.binomial(50, 0.3);
    CHECK(x >= 0);
    CHECK(x <= 50);
    total += x;
  }
  // mean 15, sd of the estimate ~ 0.05
  CHECK(std::abs(total / 4000.0 - 15.0) < 0.5);
}

TEST_CASE("normal moments") {
  Rng rng(5);
  double sum = 0.0, sum2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sum2 / n - 1.0) < 0.05);
}

TEST_CASE("shuffle permutes, sample_without_replacement ascending distinct") {
  Rng rng(2);
  std::vector<int> v(20);
  for (int i = 0; i < 20; ++i) v[static_cast<std::size_t>(i)] = i;
  auto w = v;
  rng.shuffle(w);
  auto sorted = w;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == v);
  CHECK(w != v);  // seed 2 happens not to fix the identity

  auto s = rng.sample_without_replacement(100, 10);
  CHECK(s.size() == 10);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(std::set<std::uint32_t>(s.begin(), s.end()).size() == 10);
  CHECK(s.back() < 100);

  auto full = rng.sample_without_replacement(5, 5);
  CHECK(full == std::vector<std::uint32_t>{0, 1, 2, 3, 4});
}

TEST_CASE("derive_seed separates named streams") {
  CHECK(derive_seed(42, "alpha") != derive_seed(42, "beta"));
  CHECK(derive_seed(42, "alpha") != derive_seed(43, "alpha"));
  CHECK(derive_seed(42, "alpha") == derive_seed(42, "alpha"));
}

TEST_CASE("config parses, defaults, canonicalizes") {
  KeyValueConfig cfg = KeyValueConfig::parse_string(
      "# comment\n  trees.num-leaves = 9 \n\nseed=7\nname = hello\n");
  CHECK(cfg.get_int("trees.num-leaves", 1) == 9);
  CHECK(cfg.get_int("seed", 0) == 7);
  CHECK(cfg.get_string("name", "") == "hello");
  CHECK(cfg.get_int("absent", 12) == 12);
  CHECK(cfg.get_double("absent", 0.5) == 0.5);
  CHECK(cfg.has("seed"));
  CHECK_FALSE(cfg.has("absent"));

  KeyValueConfig other = KeyValueConfig::parse_string(
      "name=hello\nseed = 7\ntrees.num-leaves=9\n");
  CHECK(cfg.canonical() == other.canonical());
  CHECK(cfg.fingerprint() == other.fingerprint());
  CHECK(cfg.fingerprint_hex().size() == 16);
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(KeyValueConfig::parse_string("no equals sign\n"), ParseError);
  KeyValueConfig cfg = KeyValueConfig::parse_string("x = abc\n");
  CHECK_THROWS_AS(cfg.get_int("x", 0), ConfigError);
  CHECK_THROWS_AS(cfg.get_double("x", 0.0), ConfigError);
}
