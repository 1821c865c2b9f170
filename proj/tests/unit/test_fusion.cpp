#include "doctest.h"

#include <random>

#include "support/fixtures.hpp"
#include "synve/error.hpp"
#include "synve/fusion.hpp"

using namespace synve;

TEST_CASE("fuse of orthogonal unit vectors") {
  const std::vector<float> v1{1, 0}, v2{0, 1};
  CHECK(fuse(v1, v2) == std::vector<float>{1, 0, 0, 1, 1, 1, 1, -1, 0, 0});
}

TEST_CASE("fuse of CLIP-sized inputs has 2560 features") {
  std::mt19937_64 rng(1);
  const auto a = testing::gaussian_vector(rng, 512);
  const auto b = testing::gaussian_vector(rng, 512);
  CHECK(fuse(a, b).size() == 2560);
}

TEST_CASE("fuse of a vector with itself") {
  const std::vector<float> v{0.5f, -2.0f, 3.0f};
  CHECK(fuse(v, v) == std::vector<float>{0.5f, -2, 3, 0.5f, -2, 3, 1, -4, 6, 0, 0, 0, 0.25f, 4, 9});
}

TEST_CASE("fuse rejects mismatched dimensions") {
  const std::vector<float> a{1, 2}, b{1, 2, 3};
  CHECK_THROWS_WITH_AS(fuse(a, b), doctest::Contains("dimension mismatch"), InputError);
  std::vector<float> out(9);
  CHECK_THROWS_AS(fuse_into(a, a, out), InputError);
}

TEST_CASE("property: inputs are recoverable from the first two blocks") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + rng() % 40;
    const auto a = testing::gaussian_vector(rng, d);
    const auto b = testing::gaussian_vector(rng, d);
    const auto f = fuse(a, b);
    CHECK(std::vector<float>(f.begin(), f.begin() + d) == a);
    CHECK(std::vector<float>(f.begin() + d, f.begin() + 2 * d) == b);
    for (std::size_t i = 0; i < d; ++i) {
      CHECK(f[2 * d + i] == a[i] + b[i]);
      CHECK(f[3 * d + i] == a[i] - b[i]);
      CHECK(f[4 * d + i] == a[i] * b[i]);
    }
  }
}
