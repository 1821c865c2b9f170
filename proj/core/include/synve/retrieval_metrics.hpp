#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "synve/manifest.hpp"
#include "synve/similarity.hpp"

namespace synve {

using IdSet = std::unordered_set<std::string>;

// 1 iff `candidate` is a generated child of `query`. Throws InputError unless
// query is an original_image and candidate a generated_image.
int relevance(const std::string& query_id, const std::string& candidate_id, const Manifest& manifest);

// Number of relevant ids among the first k entries. Requires k <= ranked.k().
std::size_t hits_at_k(const RankedList& ranked, const IdSet& relevant, std::size_t k);
double recall_at_k(const RankedList& ranked, const IdSet& relevant, std::size_t k);
double precision_at_k(const RankedList& ranked, const IdSet& relevant, std::size_t k);

// Per-k values for k = 1..k_max. Across-query std is always filled by
// curve(); aggregate curves from sampled_curves() carry across-sample std.
struct MetricCurve {
  std::vector<std::size_t> ks;
  std::vector<double> recall;
  std::vector<double> precision;
  std::vector<double> hits;  // mean |top-k ∩ relevant|
  std::size_t n_queries = 0;
  std::optional<std::vector<double>> std_recall;
  std::optional<std::vector<double>> std_precision;
};

struct CurveOptions {
  std::size_t k_max = 100;
  // Drop queries with no children in the corpus instead of failing.
  bool skip_childless = false;
};

struct CurveResult {
  MetricCurve curve;
  std::vector<std::string> skipped_queries;
};

// Averages per-query recall/precision curves for parent->children retrieval.
// The k grid is 1..min(k_max, |corpus|). Relevant set per query = its
// children that are present in the corpus.
CurveResult curve(const RowSet& queries, const RowSet& corpus, const Manifest& manifest,
                  const CurveOptions& options = {});

struct SamplingOptions {
  std::size_t sample_size = 1000;
  std::size_t n_samples = 30;
  std::uint64_t seed = 0;
  std::size_t k_max = 100;
};

struct SampledCurves {
  std::vector<std::vector<std::string>> samples;  // sampled original ids
  std::vector<MetricCurve> per_sample;           // across-query std per sample
  MetricCurve aggregate;                         // across-sample mean and std
};

// Draws sample_size originals of `split` without replacement (seeded); each
// sample's corpus is exactly the children of its originals. When the split
// holds exactly sample_size originals a single sample is produced.
SampledCurves sampled_curves(const EmbeddingStore& store, const Manifest& manifest, Split split,
                             const SamplingOptions& options);

}  // namespace synve
