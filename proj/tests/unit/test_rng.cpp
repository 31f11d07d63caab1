#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "dialeval/rng.hpp"

using namespace dialeval;

TEST_CASE("hash reference values") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("derived streams are stable and distinct") {
  const RngStream root{42};
  CHECK(root.derive("x") == RngStream{42}.derive("x"));
  CHECK(root.derive("x") != root.derive("y"));
  CHECK(root.derive("ab").derive("c") != root.derive("a").derive("bc"));
  CHECK(root.derive(1) != root.derive(2));
  CHECK(task_stream(1, "a", "b", 0) != task_stream(1, "b", "a", 0));
  CHECK(task_stream(1, "a", "b", 3) == task_stream(1, "a", "b", 3));
  auto g1 = root.engine();
  auto g2 = root.engine();
  CHECK(g1() == g2());
}

TEST_CASE("uniform draws stay in range") {
  auto gen = RngStream{7}.engine();
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const double u = uniform01(gen);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    ++hits[uniform_index(gen, 5)];
  }
  for (int h : hits) CHECK(h > 800);
}

TEST_CASE("standard normal has roughly unit moments") {
  auto gen = RngStream{9}.engine();
  double s = 0, s2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(gen);
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.05);
  CHECK(std::abs(s2 / n - 1.0) < 0.05);
}

TEST_CASE("shuffle is a permutation and deterministic") {
  std::vector<int> a(50);
  std::iota(a.begin(), a.end(), 0);
  auto b = a;
  auto g1 = RngStream{3}.engine();
  auto g2 = RngStream{3}.engine();
  portable_shuffle(std::span<int>(a), g1);
  portable_shuffle(std::span<int>(b), g2);
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expect(50);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(sorted == expect);
  CHECK(a != expect);
}
