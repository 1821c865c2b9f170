#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "synve/error.hpp"
#include "synve/retrieval_metrics.hpp"

using namespace synve;
using namespace synve::testing;

namespace {

RankedList ranked(std::initializer_list<const char*> ids) {
  RankedList r;
  double score = 1.0;
  for (const char* id : ids) {
    r.entries.push_back({id, score});
    score -= 0.01;
  }
  return r;
}

RowSet rows_of(const Corpus& c, const Manifest& m, Role role) {
  RowSet set{&c.store, {}};
  for (const auto* e : m.select(role)) set.rows.push_back(e->row);
  return set;
}

}  // namespace

TEST_CASE("relevance follows parent links") {
  const auto c = planted_children(3, 2, 4, 0.1, false, 1);
  const auto m = c.manifest();
  CHECK(relevance("orig00000", "gen00000_1", m) == 1);
  CHECK(relevance("orig00000", "gen00002_0", m) == 0);
  CHECK_THROWS_WITH_AS(relevance("gen00000_1", "gen00000_0", m), doctest::Contains("role mismatch"), InputError);
  CHECK_THROWS_WITH_AS(relevance("orig00000", "orig00001", m), doctest::Contains("role mismatch"), InputError);
}

TEST_CASE("a look-alike that is not a child is irrelevant") {
  // A generated image identical to the query but parented elsewhere.
  CorpusBuilder b(2);
  b.add("q", {1, 0}, Role::original_image, Split::dev);
  b.add("other", {0, 1}, Role::original_image, Split::dev);
  b.add("twin", {1, 0}, Role::generated_image, Split::dev, "other");
  b.add("child", {0.2f, 1}, Role::generated_image, Split::dev, "q");
  const auto c = b.build();
  const auto m = c.manifest();
  CHECK(relevance("q", "twin", m) == 0);
  const auto cv = curve(RowSet{&c.store, {0}}, RowSet{&c.store, {2, 3}}, m, {.k_max = 2}).curve;
  CHECK(cv.recall[0] == 0.0);  // the twin ranks first
  CHECK(cv.recall[1] == 1.0);
}

TEST_CASE("recall and precision definitions") {
  const IdSet rel{"c1", "c2", "c3", "c4", "c5"};
  auto r = ranked({"x", "c1", "y", "c2"});
  for (int i = 0; i < 96; ++i) r.entries.push_back({fmt::format("z{}", i), 0.0});
  CHECK(recall_at_k(r, rel, 100) == doctest::Approx(0.4));
  CHECK(precision_at_k(r, rel, 100) == doctest::Approx(0.02));

  const auto top = ranked({"c1", "c2", "c3", "c4", "c5", "x"});
  CHECK(recall_at_k(top, rel, 5) == 1.0);
  CHECK(precision_at_k(top, rel, 5) == 1.0);
  CHECK(precision_at_k(top, rel, 6) == doctest::Approx(5.0 / 6.0));

  CHECK_THROWS_WITH_AS(recall_at_k(top, IdSet{}, 3), doctest::Contains("empty relevant"), InputError);
  CHECK_THROWS_AS(precision_at_k(top, rel, 7), InputError);
  CHECK_THROWS_AS(precision_at_k(top, rel, 0), InputError);
}

TEST_CASE("property: hit-count identity and monotone recall") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 300; ++t) {
    const std::size_t len = 1 + rng() % 120;
    const std::size_t n_rel = 1 + rng() % 8;
    RankedList r;
    IdSet rel;
    for (std::size_t i = 0; i < n_rel; ++i) rel.insert(fmt::format("r{}", i));
    for (std::size_t i = 0; i < len; ++i) {
      const bool hit = rng() % 4 == 0;
      r.entries.push_back({hit ? fmt::format("r{}", rng() % n_rel) : fmt::format("n{}", i), 0.0});
    }
    // Drop duplicate relevant ids to keep the list a ranking.
    IdSet seen;
    std::erase_if(r.entries, [&](const ScoredCandidate& e) { return !seen.insert(e.id).second; });
    double last = 0.0;
    for (std::size_t k = 1; k <= r.k(); ++k) {
      const double rec = recall_at_k(r, rel, k);
      const double prec = precision_at_k(r, rel, k);
      const auto hits = static_cast<double>(hits_at_k(r, rel, k));
      CHECK(std::round(prec * static_cast<double>(k)) == hits);
      CHECK(std::round(rec * static_cast<double>(rel.size())) == hits);
      CHECK(prec * static_cast<double>(k) == doctest::Approx(rec * static_cast<double>(rel.size())).epsilon(1e-14));
      CHECK(rec >= last);
      CHECK(rec <= 1.0);
      last = rec;
    }
  }
}

TEST_CASE("curve with children planted at ranks 1-5") {
  const auto c = planted_children(1, 5, 16, 0.001, true, 2);
  const auto m = c.manifest();
  // Distractors: children of nobody would be invalid, so add a second parent
  // whose random children fill out the corpus.
  CorpusBuilder b(16);
  for (const auto& e : c.entries) {
    auto v = c.store.row(e.row);
    b.add(e.id, {v.begin(), v.end()}, e.role, e.split, e.parent_id);
  }
  std::mt19937_64 rng(3);
  auto far = gaussian_vector(rng, 16);
  b.add("other", far, Role::original_image, Split::train);
  for (int i = 0; i < 20; ++i) {
    auto v = gaussian_vector(rng, 16);
    // Push distractors away from the planted parent.
    const auto p = c.store.row(0);
    double dot = 0;
    for (int k = 0; k < 16; ++k) dot += v[k] * p[k];
    if (dot > 0)
      for (auto& x : v) x = -x;
    b.add(fmt::format("d{:02}", i), v, Role::generated_image, Split::train, "other");
  }
  const auto full = b.build();
  const auto fm = full.manifest();
  const auto res = curve(RowSet{&full.store, {0}}, rows_of(full, fm, Role::generated_image), fm, {.k_max = 25});
  const auto& cv = res.curve;
  REQUIRE(cv.ks.size() == 25);
  for (std::size_t k = 1; k <= 25; ++k) {
    CHECK(cv.recall[k - 1] == doctest::Approx(std::min<double>(k, 5) / 5.0));
    CHECK(cv.precision[k - 1] == doctest::Approx(std::min<double>(k, 5) / static_cast<double>(k)));
  }
  CHECK(cv.n_queries == 1);
  CHECK((*cv.std_recall)[4] == 0.0);
}

TEST_CASE("curve equals the mean of naive per-query curves") {
  const auto c = planted_children(40, 5, 12, 0.8, true, 9);
  const auto m = c.manifest();
  const auto queries = rows_of(c, m, Role::original_image);
  const auto corpus = rows_of(c, m, Role::generated_image);
  const auto cv = curve(queries, corpus, m, {.k_max = 30}).curve;
  std::vector<double> hit_sum(30, 0.0);
  for (auto q : queries.rows) {
    const auto list = oracle_top_k(c.store, q, corpus.rows, 30);
    std::size_t h = 0;
    for (std::size_t k = 0; k < 30; ++k) {
      if (m.at(list[k].id).parent_id == c.store.id(q)) ++h;
      hit_sum[k] += static_cast<double>(h);
    }
  }
  for (std::size_t k = 0; k < 30; ++k) {
    // Every query has 5 relevant children, so hits@k = 5 * recall@k.
    CHECK(cv.hits[k] * 40.0 == doctest::Approx(hit_sum[k]));
    CHECK(cv.recall[k] == doctest::Approx(hit_sum[k] / 40.0 / 5.0));
    CHECK(cv.hits[k] == doctest::Approx(5.0 * cv.recall[k]));
  }
}

TEST_CASE("planted children are retrieved, random children are not") {
  const auto planted = planted_children(200, 5, 32, 0.01, true, 21);
  const auto pm = planted.manifest();
  const auto good = curve(rows_of(planted, pm, Role::original_image), rows_of(planted, pm, Role::generated_image),
                          pm, {.k_max = 100})
                        .curve;
  CHECK(good.recall.back() >= 0.99);

  const auto random = planted_children(200, 5, 32, 0.01, false, 22);
  const auto rm = random.manifest();
  const auto bad = curve(rows_of(random, rm, Role::original_image), rows_of(random, rm, Role::generated_image), rm,
                         {.k_max = 100})
                       .curve;
  // Random ranking: expected recall@100 = 100 / 1000.
  CHECK(bad.recall.back() == doctest::Approx(0.1).epsilon(0.3));
}

TEST_CASE("childless queries fail unless skipped") {
  CorpusBuilder b(2);
  b.add("p", {1, 0}, Role::original_image, Split::dev);
  b.add("lonely", {0, 1}, Role::original_image, Split::dev);
  b.add("g", {1, 0.1f}, Role::generated_image, Split::dev, "p");
  const auto c = b.build();
  const auto m = c.manifest();
  RowSet q{&c.store, {0, 1}};
  RowSet corpus{&c.store, {2}};
  CHECK_THROWS_WITH_AS(curve(q, corpus, m), doctest::Contains("no children"), InputError);
  const auto res = curve(q, corpus, m, {.k_max = 5, .skip_childless = true});
  CHECK(res.skipped_queries == std::vector<std::string>{"lonely"});
  CHECK(res.curve.n_queries == 1);
  CHECK(res.curve.ks.size() == 1);  // grid clipped to the corpus size
}

TEST_CASE("sampled curves") {
  const auto c = planted_children(60, 5, 16, 0.5, true, 31, Split::dev);
  const auto m = c.manifest();

  SUBCASE("whole split gives one sample") {
    const auto sc = sampled_curves(c.store, m, Split::dev, {.sample_size = 60, .n_samples = 30, .seed = 1, .k_max = 10});
    REQUIRE(sc.samples.size() == 1);
    CHECK(sc.samples[0].size() == 60);
    CHECK((*sc.aggregate.std_recall)[9] == 0.0);
  }
  SUBCASE("seeded sampling is reproducible") {
    const SamplingOptions opt{.sample_size = 20, .n_samples = 5, .seed = 42, .k_max = 10};
    const auto a = sampled_curves(c.store, m, Split::dev, opt);
    const auto b = sampled_curves(c.store, m, Split::dev, opt);
    CHECK(a.samples == b.samples);
    CHECK(a.aggregate.recall == b.aggregate.recall);
    CHECK(a.samples.size() == 5);
    for (const auto& s : a.samples) {
      std::set<std::string> uniq(s.begin(), s.end());
      CHECK(uniq.size() == 20);  // without replacement
    }
    CHECK(a.samples[0] != a.samples[1]);
    // Aggregate is the per-k mean of per-sample means.
    double mean = 0;
    for (const auto& pc : a.per_sample) mean += pc.recall[9];
    CHECK(a.aggregate.recall[9] == doctest::Approx(mean / 5.0));
    const auto other = sampled_curves(c.store, m, Split::dev, {.sample_size = 20, .n_samples = 5, .seed = 43, .k_max = 10});
    CHECK(other.samples != a.samples);
  }
  SUBCASE("sample corpus is exactly the sampled children") {
    const auto sc = sampled_curves(c.store, m, Split::dev, {.sample_size = 10, .n_samples = 2, .seed = 5, .k_max = 100});
    // 10 parents x 5 children: the k grid stops at the corpus size.
    CHECK(sc.per_sample[0].ks.size() == 50);
    CHECK(sc.per_sample[0].recall.back() == 1.0);
  }
  SUBCASE("too few originals") {
    CHECK_THROWS_WITH_AS(sampled_curves(c.store, m, Split::dev, {.sample_size = 61}), doctest::Contains("exceeds"),
                         InputError);
    CHECK_THROWS_AS(sampled_curves(c.store, m, Split::test, {.sample_size = 1}), InputError);
  }
}
