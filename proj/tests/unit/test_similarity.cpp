#include "doctest.h"

#include <omp.h>

#include <random>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "synve/error.hpp"
#include "synve/similarity.hpp"

using namespace synve;
using namespace synve::testing;

TEST_CASE("cosine of known vectors") {
  const std::vector<float> x{1, 0}, y{0, 1};
  CHECK(cosine(x, x) == 1.0);
  CHECK(cosine(x, y) == 0.0);
  // 32 / sqrt(14 * 77), evaluated at 30 significant digits.
  const std::vector<float> a{1, 2, 3}, b{4, 5, 6};
  CHECK(cosine(a, b) == doctest::Approx(0.974631846197076).epsilon(1e-12));
}

TEST_CASE("cosine preconditions") {
  const std::vector<float> x{1, 0}, z{0, 0}, three{1, 2, 3};
  CHECK_THROWS_WITH_AS(cosine(x, three), doctest::Contains("dimension mismatch"), InputError);
  CHECK_THROWS_WITH_AS(cosine(x, z), doctest::Contains("zero-norm"), InputError);
}

TEST_CASE("property: cosine is symmetric, scale invariant and bounded") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto u = gaussian_vector(rng, 16);
    const auto v = gaussian_vector(rng, 16);
    auto scaled = u;
    for (auto& x : scaled) x *= 4.0f;  // power of two keeps the float rows exact
    const double c = cosine(u, v);
    CHECK(c == cosine(v, u));
    CHECK(c == doctest::Approx(cosine(scaled, v)).epsilon(1e-12));
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
  }
  const auto u = gaussian_vector(rng, 33);
  CHECK(cosine(u, u) <= 1.0);
}

TEST_CASE("top_k on a three-vector corpus") {
  EmbeddingStore s(2, {"a", "b", "c", "q"}, {1, 0, 0, 1, 0.9f, 0.1f, 1, 0});
  RowSet corpus{&s, {0, 1, 2}};
  const auto r = top_k(s, "q", corpus, 2);
  REQUIRE(r.k() == 2);
  CHECK(r.entries[0].id == "a");
  CHECK(r.entries[0].score == 1.0);
  CHECK(r.entries[1].id == "c");
  CHECK(r.entries[1].score == doctest::Approx(0.993883734673619).epsilon(1e-6));
}

TEST_CASE("ties break by ascending id") {
  EmbeddingStore s(2, {"q", "y", "x"}, {1, 0, 0.5f, 0.5f, 0.5f, 0.5f});
  RowSet corpus{&s, {1, 2}};
  const auto r = top_k(s, "q", corpus, 2);
  CHECK(r.entries[0].id == "x");
  CHECK(r.entries[1].id == "y");
  CHECK(r.entries[0].score == r.entries[1].score);
}

TEST_CASE("k at least corpus size returns the whole corpus sorted") {
  const auto s = random_store(30, 5, 4);
  auto corpus = all_rows(s);
  const auto r = top_k(s, std::size_t{0}, corpus, 100);
  CHECK(r.k() == 29);  // the query itself is excluded
  for (std::size_t i = 1; i < r.k(); ++i) CHECK(r.entries[i - 1].score >= r.entries[i].score);
}

TEST_CASE("top_k errors") {
  EmbeddingStore s(2, {"q", "z", "a"}, {0, 0, 0, 0, 1, 0});
  CHECK_THROWS_WITH_AS(top_k(s, "a", RowSet{&s, {}}, 1), doctest::Contains("empty corpus"), InputError);
  CHECK_THROWS_WITH_AS(top_k(s, "q", RowSet{&s, {2}}, 1), doctest::Contains("zero-norm"), InputError);
  CHECK_THROWS_WITH_AS(top_k(s, "a", RowSet{&s, {1, 2}}, 1), doctest::Contains("zero-norm"), InputError);
  CHECK_THROWS_AS(top_k(s, "a", RowSet{&s, {2}}, 0), InputError);
  const auto other = random_store(3, 3, 1);
  CHECK_THROWS_WITH_AS(top_k(s, "a", all_rows(other), 1), doctest::Contains("dimension mismatch"), InputError);
}

TEST_CASE("property: batched top_k equals the naive full-sort oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 50 + rng() % 700;
    const auto dim = static_cast<std::uint32_t>(trial % 2 == 0 ? 8 : 64);
    const auto s = random_store(n, dim, rng());
    RowSet queries{&s, {}};
    for (int q = 0; q < 11; ++q) queries.rows.push_back(rng() % n);
    std::sort(queries.rows.begin(), queries.rows.end());
    queries.rows.erase(std::unique(queries.rows.begin(), queries.rows.end()), queries.rows.end());
    const auto corpus = all_rows(s);
    for (std::size_t k : {1, 5, 100}) {
      const auto got = top_k_batch(queries, corpus, k);
      for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const auto want = oracle_top_k(s, queries.rows[qi], corpus.rows, k);
        REQUIRE(got[qi].k() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
          CHECK(got[qi].entries[i].id == want[i].id);
          CHECK(got[qi].entries[i].score == want[i].score);
        }
      }
    }
  }
}

TEST_CASE("queries and corpus from different stores exclude the shared id") {
  const auto corpus_store = random_store(40, 6, 10);
  // Query store reuses one corpus id with its vector.
  const auto v = corpus_store.row(3);
  EmbeddingStore qs(6, {corpus_store.id(3)}, {v.begin(), v.end()});
  const auto r = top_k(qs, std::size_t{0}, all_rows(corpus_store), 50);
  CHECK(r.k() == 39);
  for (const auto& e : r.entries) CHECK(e.id != corpus_store.id(3));
}

TEST_CASE("results do not depend on the thread count") {
  const auto s = random_store(900, 32, 77);
  RowSet queries{&s, {}};
  for (std::size_t i = 0; i < 300; ++i) queries.rows.push_back(i);
  RowSet corpus{&s, {}};
  for (std::size_t i = 300; i < 900; ++i) corpus.rows.push_back(i);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = top_k_batch(queries, corpus, 20);
  const auto stats_one = pairwise_stats(queries, corpus, 20);
  omp_set_num_threads(4);
  const auto four = top_k_batch(queries, corpus, 20);
  const auto stats_four = pairwise_stats(queries, corpus, 20);
  omp_set_num_threads(saved);
  CHECK(one == four);
  CHECK(stats_one.mean == stats_four.mean);
  CHECK(stats_one.std == stats_four.std);
}

TEST_CASE("pairwise_stats on tiny inputs") {
  EmbeddingStore s(2, {"x", "y"}, {1, 0, 0, 1});
  SUBCASE("identical single vector") {
    const auto st = pairwise_stats(RowSet{&s, {0}}, RowSet{&s, {0}}, 10);
    CHECK(st.mean == 1.0);
    CHECK(st.std == 0.0);
    CHECK(st.n == 1);
    CHECK(st.histogram.back().count == 1);
  }
  SUBCASE("two known scores") {
    const auto st = pairwise_stats(RowSet{&s, {0}}, RowSet{&s, {0, 1}}, 4);
    CHECK(st.mean == 0.5);
    CHECK(st.std == 0.5);
    CHECK(st.n == 2);
    // Bins [-1,-0.5) [-0.5,0) [0,0.5) [0.5,1]: scores 0 and 1.
    CHECK(st.histogram[2].count == 1);
    CHECK(st.histogram[3].count == 1);
    CHECK(st.histogram[0].lower == -1.0);
  }
  SUBCASE("empty inputs") {
    CHECK_THROWS_AS(pairwise_stats(RowSet{&s, {}}, RowSet{&s, {0}}, 4), InputError);
    CHECK_THROWS_AS(pairwise_stats(RowSet{&s, {0}}, RowSet{&s, {}}, 4), InputError);
  }
}

TEST_CASE("property: pairwise_stats matches a two-pass reference") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto qs = random_store(1 + rng() % 300, 24, rng(), "q");
    const auto cs = random_store(1 + rng() % 300, 24, rng(), "c");
    const auto st = pairwise_stats(all_rows(qs), all_rows(cs), 50);
    const auto ref = oracle_pairwise_moments(qs, all_rows(qs).rows, cs, all_rows(cs).rows);
    CHECK(st.n == ref.n);
    CHECK(std::abs(st.mean - ref.mean) < 1e-5);
    CHECK(std::abs(st.std - ref.std) < 1e-5);
    std::size_t total = 0;
    for (const auto& b : st.histogram) total += b.count;
    CHECK(total == st.n);
  }
}
