#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "synve/embedding_store.hpp"

namespace synve {

struct ScoredCandidate {
  std::string id;
  double score = 0.0;

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

// Candidates sorted by descending score, equal scores by ascending id.
struct RankedList {
  std::string query_id;
  std::vector<ScoredCandidate> entries;

  std::size_t k() const { return entries.size(); }
  friend bool operator==(const RankedList&, const RankedList&) = default;
};

struct HistogramBin {
  double lower = 0.0;
  std::size_t count = 0;
};

struct SimilarityStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::vector<HistogramBin> histogram;  // equal-width bins over [-1, 1]
  std::size_t n = 0;
};

// A subset of store rows. Rows are indices into `store`.
struct RowSet {
  const EmbeddingStore* store = nullptr;
  std::vector<std::size_t> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

RowSet all_rows(const EmbeddingStore& store);

// <u,v> / (|u| |v|) with the dot product and norms accumulated in double and
// the result clamped to [-1, 1]. Throws InputError on dimension mismatch or a
// zero-norm input.
double cosine(std::span<const float> u, std::span<const float> v);

// Exact top-k by cosine for a single query row. The query id is excluded from
// the corpus. Returns all of the corpus when it has fewer than k candidates.
RankedList top_k(const EmbeddingStore& store, std::size_t query_row, const RowSet& corpus, std::size_t k);
RankedList top_k(const EmbeddingStore& store, const std::string& query_id, const RowSet& corpus,
                 std::size_t k);

// Batched exact top-k: queries are processed in blocks against corpus panels
// with a bounded heap per query. Output order matches `queries.rows`; results
// do not depend on the number of worker threads.
std::vector<RankedList> top_k_batch(const RowSet& queries, const RowSet& corpus, std::size_t k);

// Streaming mean/std/histogram over all |queries| * |corpus| cosine values.
// Per-block partial moments are merged in block order.
SimilarityStats pairwise_stats(const RowSet& queries, const RowSet& corpus, std::size_t bins);

}  // namespace synve
