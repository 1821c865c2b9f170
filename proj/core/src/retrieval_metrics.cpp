#include "synve/retrieval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "random.hpp"
#include "synve/error.hpp"

namespace synve {

namespace {

void require_k(const RankedList& ranked, std::size_t k) {
  if (k == 0) throw InputError("k must be positive");
  if (k > ranked.k()) throw InputError(fmt::format("k={} exceeds ranked list length {}", k, ranked.k()));
}

// Per-k mean and population std of row-major samples (n x k).
void mean_and_std(const std::vector<std::vector<double>>& rows, std::size_t k_len, std::vector<double>& mean,
                  std::vector<double>& stdev) {
  const auto n = static_cast<double>(rows.size());
  mean.assign(k_len, 0.0);
  stdev.assign(k_len, 0.0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < k_len; ++i) mean[i] += r[i];
  for (auto& m : mean) m /= n;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < k_len; ++i) stdev[i] += (r[i] - mean[i]) * (r[i] - mean[i]);
  for (auto& s : stdev) s = std::sqrt(s / n);
}

}  // namespace

int relevance(const std::string& query_id, const std::string& candidate_id, const Manifest& manifest) {
  const auto& q = manifest.at(query_id);
  const auto& c = manifest.at(candidate_id);
  if (q.role != Role::original_image) {
    throw InputError(fmt::format("role mismatch: query '{}' is {}", query_id, to_string(q.role)));
  }
  if (c.role != Role::generated_image) {
    throw InputError(fmt::format("role mismatch: candidate '{}' is {}", candidate_id, to_string(c.role)));
  }
  return c.parent_id == q.id ? 1 : 0;
}

std::size_t hits_at_k(const RankedList& ranked, const IdSet& relevant, std::size_t k) {
  require_k(ranked, k);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += relevant.contains(ranked.entries[i].id) ? 1 : 0;
  return hits;
}

double recall_at_k(const RankedList& ranked, const IdSet& relevant, std::size_t k) {
  if (relevant.empty()) throw InputError("empty relevant set");
  return static_cast<double>(hits_at_k(ranked, relevant, k)) / static_cast<double>(relevant.size());
}

double precision_at_k(const RankedList& ranked, const IdSet& relevant, std::size_t k) {
  return static_cast<double>(hits_at_k(ranked, relevant, k)) / static_cast<double>(k);
}

CurveResult curve(const RowSet& queries, const RowSet& corpus, const Manifest& manifest,
                  const CurveOptions& options) {
  if (queries.store == nullptr || queries.store != corpus.store) {
    throw InputError("queries and corpus must come from the same store");
  }
  if (options.k_max == 0) throw InputError("k_max must be positive");
  if (queries.empty()) throw InputError("no queries");
  if (corpus.empty()) throw InputError("empty corpus");
  const auto& store = *queries.store;

  std::vector<bool> in_corpus(store.count(), false);
  for (auto r : corpus.rows) {
    const auto& e = manifest.at(store.id(r));
    if (e.role != Role::generated_image) {
      throw InputError(fmt::format("role mismatch: corpus entry '{}' is {}", e.id, to_string(e.role)));
    }
    in_corpus[r] = true;
  }

  CurveResult result;
  RowSet kept{&store, {}};
  std::vector<IdSet> relevant;
  for (auto q : queries.rows) {
    const auto& e = manifest.at(store.id(q));
    if (e.role != Role::original_image) {
      throw InputError(fmt::format("role mismatch: query '{}' is {}", e.id, to_string(e.role)));
    }
    IdSet rel;
    for (const auto& child : manifest.children(e.id)) {
      if (in_corpus[manifest.at(child).row]) rel.insert(child);
    }
    if (rel.empty()) {
      if (!options.skip_childless) throw InputError(fmt::format("query '{}' has no children in the corpus", e.id));
      result.skipped_queries.push_back(e.id);
      continue;
    }
    kept.rows.push_back(q);
    relevant.push_back(std::move(rel));
  }
  if (kept.empty()) throw InputError("no query has children in the corpus");

  const std::size_t k_len = std::min(options.k_max, corpus.size());
  const auto ranked = top_k_batch(kept, corpus, k_len);

  std::vector<std::vector<double>> recall_rows(kept.size()), precision_rows(kept.size()), hit_rows(kept.size());
#pragma omp parallel for schedule(static)
  for (std::size_t qi = 0; qi < kept.size(); ++qi) {
    const auto& list = ranked[qi];
    const auto& rel = relevant[qi];
    auto& rec = recall_rows[qi];
    auto& prec = precision_rows[qi];
    auto& hits = hit_rows[qi];
    rec.assign(k_len, 0.0);
    prec.assign(k_len, 0.0);
    hits.assign(k_len, 0.0);
    std::size_t h = 0;
    for (std::size_t k = 1; k <= k_len; ++k) {
      // Lists shorter than k_len only happen when the query itself sat in the
      // corpus; the tail then adds no hits.
      if (k <= list.k() && rel.contains(list.entries[k - 1].id)) ++h;
      hits[k - 1] = static_cast<double>(h);
      rec[k - 1] = static_cast<double>(h) / static_cast<double>(rel.size());
      prec[k - 1] = static_cast<double>(h) / static_cast<double>(k);
    }
  }

  auto& c = result.curve;
  c.n_queries = kept.size();
  c.ks.resize(k_len);
  std::iota(c.ks.begin(), c.ks.end(), std::size_t{1});
  std::vector<double> std_r, std_p, std_unused;
  mean_and_std(recall_rows, k_len, c.recall, std_r);
  mean_and_std(precision_rows, k_len, c.precision, std_p);
  mean_and_std(hit_rows, k_len, c.hits, std_unused);
  c.std_recall = std::move(std_r);
  c.std_precision = std::move(std_p);
  return result;
}

SampledCurves sampled_curves(const EmbeddingStore& store, const Manifest& manifest, Split split,
                             const SamplingOptions& options) {
  if (options.sample_size == 0) throw InputError("sample_size must be positive");
  if (options.n_samples == 0) throw InputError("n_samples must be positive");
  const auto originals = manifest.select(Role::original_image, split);
  if (options.sample_size > originals.size()) {
    throw InputError(fmt::format("sample_size {} exceeds the {} original images in split {}", options.sample_size,
                                 originals.size(), to_string(split)));
  }

  SampledCurves out;
  if (options.sample_size == originals.size()) {
    std::vector<std::string> all;
    for (const auto* e : originals) all.push_back(e->id);
    out.samples.push_back(std::move(all));
  } else {
    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order(originals.size());
    for (std::size_t s = 0; s < options.n_samples; ++s) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      // Partial Fisher-Yates: the first sample_size slots are the draw.
      for (std::size_t i = 0; i < options.sample_size; ++i) {
        std::swap(order[i], order[i + detail::uniform_index(rng, order.size() - i)]);
      }
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < options.sample_size; ++i) ids.push_back(originals[order[i]]->id);
      out.samples.push_back(std::move(ids));
    }
  }

  for (const auto& sample : out.samples) {
    RowSet queries{&store, {}};
    RowSet corpus{&store, {}};
    for (const auto& id : sample) {
      queries.rows.push_back(manifest.at(id).row);
      for (const auto& child : manifest.children(id)) corpus.rows.push_back(manifest.at(child).row);
    }
    if (corpus.empty()) throw InputError("sampled originals have no children");
    out.per_sample.push_back(curve(queries, corpus, manifest, {.k_max = options.k_max}).curve);
  }

  std::size_t k_len = options.k_max;
  for (const auto& c : out.per_sample) k_len = std::min(k_len, c.ks.size());
  std::vector<std::vector<double>> rec, prec, hits;
  for (const auto& c : out.per_sample) {
    rec.push_back(c.recall);
    prec.push_back(c.precision);
    hits.push_back(c.hits);
  }
  auto& agg = out.aggregate;
  agg.ks.resize(k_len);
  std::iota(agg.ks.begin(), agg.ks.end(), std::size_t{1});
  agg.n_queries = options.sample_size;
  std::vector<double> sr, sp, unused;
  mean_and_std(rec, k_len, agg.recall, sr);
  mean_and_std(prec, k_len, agg.precision, sp);
  mean_and_std(hits, k_len, agg.hits, unused);
  agg.std_recall = std::move(sr);
  agg.std_precision = std::move(sp);
  return out;
}

}  // namespace synve
