#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mlsl/rng.hpp"

using namespace mlsl;

TEST_CASE("identical seeds produce identical streams") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("derived streams are independent of each other") {
  std::uint64_t s1 = derive_seed(7, "alpha");
  std::uint64_t s2 = derive_seed(7, "beta");
  CHECK(s1 != s2);
  CHECK(derive_seed(7, "alpha") == s1);
  CHECK(derive_seed(8, "alpha") != s1);
}

TEST_CASE("uniform stays in range and covers it") {
  RngStream rng(1);
  double lo = 1.0, hi = -1.0;
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform(-1.0, 1.0);
    CHECK(u >= -1.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < -0.99);
  CHECK(hi > 0.99);
}

TEST_CASE("normal moments") {
  RngStream rng(3);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal(1.0, 1.0);
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("index is bounded and roughly uniform") {
  RngStream rng(9);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) counts[rng.index(5)]++;
  for (int c : counts) {
    CHECK(c > 9000);
    CHECK(c < 11000);
  }
}

TEST_CASE("sample_without_replacement yields distinct indices") {
  RngStream rng(11);
  auto s = rng.sample_without_replacement(10, 10);
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < 10; ++i) CHECK(s[i] == i);
  CHECK_THROWS(rng.sample_without_replacement(3, 4));
}
