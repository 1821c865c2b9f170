#pragma once

// Reference computations written independently of the library code paths
// they check: naive full sorts, direct two-pass moments, explicit counting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "synve/embedding_store.hpp"
#include "synve/labels.hpp"

namespace synve::testing {

// Scalar cosine with double accumulation in index order. The arithmetic is
// the same IEEE sequence as the library's, so scores compare bit-for-bit.
inline double oracle_cosine(std::span<const float> u, std::span<const float> v) {
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  for (std::size_t i = 0; i < u.size(); ++i) uu += static_cast<double>(u[i]) * static_cast<double>(u[i]);
  for (std::size_t i = 0; i < v.size(); ++i) vv += static_cast<double>(v[i]) * static_cast<double>(v[i]);
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

struct OracleHit {
  std::string id;
  double score;
};

// Scores every candidate, sorts the whole list, truncates to k.
inline std::vector<OracleHit> oracle_top_k(const EmbeddingStore& store, std::size_t query_row,
                                           std::span<const std::size_t> corpus_rows, std::size_t k) {
  std::vector<OracleHit> all;
  for (auto r : corpus_rows) {
    if (r == query_row) continue;
    all.push_back({store.id(r), oracle_cosine(store.row(query_row), store.row(r))});
  }
  std::sort(all.begin(), all.end(), [](const OracleHit& a, const OracleHit& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

struct OracleMoments {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

// Materializes every score, then mean and population std in two passes.
inline OracleMoments oracle_pairwise_moments(const EmbeddingStore& qs, std::span<const std::size_t> q_rows,
                                             const EmbeddingStore& cs, std::span<const std::size_t> c_rows) {
  std::vector<long double> scores;
  for (auto q : q_rows)
    for (auto c : c_rows) scores.push_back(oracle_cosine(qs.row(q), cs.row(c)));
  long double sum = 0;
  for (auto s : scores) sum += s;
  const long double mean = sum / static_cast<long double>(scores.size());
  long double ss = 0;
  for (auto s : scores) ss += (s - mean) * (s - mean);
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(ss / static_cast<long double>(scores.size()))),
          scores.size()};
}

struct OracleClass {
  std::size_t tp = 0, fp = 0, fn = 0, support = 0;
  double precision = 0, recall = 0, f1 = 0;
};

// Per-class counts by direct scanning, no confusion matrix.
inline std::map<Label, OracleClass> oracle_per_class(std::span<const Label> gold, std::span<const Label> pred) {
  std::map<Label, OracleClass> out;
  for (Label l : kLabelOrder) {
    OracleClass c;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold[i] == l && pred[i] == l) ++c.tp;
      if (gold[i] != l && pred[i] == l) ++c.fp;
      if (gold[i] == l && pred[i] != l) ++c.fn;
      if (gold[i] == l) ++c.support;
    }
    if (c.tp + c.fp + c.fn == 0) continue;
    c.precision = (c.tp + c.fp) == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    c.recall = (c.tp + c.fn) == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    c.f1 = (c.precision + c.recall) == 0 ? 0.0 : 2 * c.precision * c.recall / (c.precision + c.recall);
    out[l] = c;
  }
  return out;
}

inline double oracle_macro_f1(std::span<const Label> gold, std::span<const Label> pred) {
  const auto per = oracle_per_class(gold, pred);
  double sum = 0;
  std::size_t n = 0;
  for (const auto& [l, c] : per) {
    if (c.support == 0) continue;
    sum += c.f1;
    ++n;
  }
  return sum / static_cast<double>(n);
}

}  // namespace synve::testing
