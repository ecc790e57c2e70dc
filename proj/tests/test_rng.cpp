#include "doctest.h"

#include <cmath>
#include <set>

#include "storm/common.hpp"

using namespace storm;

TEST_CASE("same seed and stream give the same sequence") {
  Rng a(42, 3), b(42, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.draws() == 100);
}

TEST_CASE("streams and derived generators differ") {
  Rng a(42, 0), b(42, 1);
  CHECK(a.next_u64() != b.next_u64());
  const Rng base(7);
  Rng c = base.derive(1), d = base.derive(2);
  CHECK(c.next_u64() != d.next_u64());
  CHECK(base.draws() == 0);
}

TEST_CASE("uniform, index and normal stay in range with the right moments") {
  Rng rng(1);
  double sum = 0.0, sum2 = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / N) < 0.01);
  CHECK(std::abs(sum2 / N - 1.0) < 0.02);

  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = rng.index(7);
    CHECK(k < 7);
    seen.insert(k);
  }
  CHECK(seen.size() == 7);
  for (int i = 0; i < 100; ++i) {
    const double v = rng.uniform(-2.0, 3.0);
    CHECK((v >= -2.0 && v <= 3.0));
  }
}
