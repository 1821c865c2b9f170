#include "synve/similarity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "synve/error.hpp"

namespace synve {

namespace {

// Register panel width (queries scored together against one corpus row),
// queries per parallel work item, and corpus rows per cache tile.
constexpr std::size_t kPanel = 8;
constexpr std::size_t kQueryBlock = 64;
constexpr std::size_t kCorpusTile = 256;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Shared by cosine() and the blocked kernel so both produce identical bits:
// the dot product is summed in index order from 0.0 in double, and products of
// two floats are exact in double.
inline double finish_score(double dot, double norm_u, double norm_v) {
  return clamp_unit(dot / (norm_u * norm_v));
}

void require_same_store_dims(const RowSet& a, const RowSet& b) {
  if (a.store == nullptr || b.store == nullptr) throw InputError("row set has no backing store");
  if (a.store->dim() != b.store->dim()) {
    throw InputError(fmt::format("dimension mismatch: {} vs {}", a.store->dim(), b.store->dim()));
  }
}

void require_nonzero_rows(const RowSet& set, const char* what) {
  std::vector<bool> seen(set.store->count(), false);
  for (auto r : set.rows) {
    if (r >= set.store->count()) throw InputError(fmt::format("{} row {} out of range", what, r));
    if (seen[r]) throw InputError(fmt::format("{} contains '{}' twice", what, set.store->id(r)));
    seen[r] = true;
    if (set.store->norm(r) == 0.0) {
      throw InputError(fmt::format("zero-norm vector '{}' in {}", set.store->id(r), what));
    }
  }
}

// Up to kPanel query vectors stored dimension-major in double so the inner
// loop vectorizes across queries while each query's sum stays in index order.
struct QueryPanel {
  std::size_t size = 0;
  std::array<std::size_t, kPanel> rows{};
  std::array<double, kPanel> norms{};
  std::vector<double> values;  // dim * kPanel

  QueryPanel(const EmbeddingStore& store, std::span<const std::size_t> panel_rows) {
    const std::size_t dim = store.dim();
    size = panel_rows.size();
    values.assign(dim * kPanel, 0.0);
    for (std::size_t j = 0; j < size; ++j) {
      rows[j] = panel_rows[j];
      norms[j] = store.norm(panel_rows[j]);
      auto v = store.row(panel_rows[j]);
      for (std::size_t i = 0; i < dim; ++i) values[i * kPanel + j] = static_cast<double>(v[i]);
    }
  }

  // scores[j] = cosine(query j, candidate).
  void score(std::span<const float> candidate, double candidate_norm, std::array<double, kPanel>& scores) const {
    std::array<double, kPanel> acc{};
    const double* p = values.data();
    const std::size_t dim = candidate.size();
    for (std::size_t i = 0; i < dim; ++i) {
      const double c = static_cast<double>(candidate[i]);
      for (std::size_t j = 0; j < kPanel; ++j) acc[j] += p[i * kPanel + j] * c;
    }
    for (std::size_t j = 0; j < size; ++j) scores[j] = finish_score(acc[j], norms[j], candidate_norm);
  }
};

std::vector<QueryPanel> make_panels(const EmbeddingStore& store, std::span<const std::size_t> rows) {
  std::vector<QueryPanel> panels;
  for (std::size_t start = 0; start < rows.size(); start += kPanel) {
    panels.emplace_back(store, rows.subspan(start, std::min(kPanel, rows.size() - start)));
  }
  return panels;
}

// Bounded selection of the k best candidates; the heap top is the worst kept.
class TopKHeap {
 public:
  TopKHeap(std::size_t k, const EmbeddingStore& corpus) : k_(k), better_{&corpus} { heap_.reserve(k); }

  void offer(double score, std::size_t row) {
    if (heap_.size() < k_) {
      heap_.push_back({score, row});
      std::push_heap(heap_.begin(), heap_.end(), better_);
    } else if (better_(Item{score, row}, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), better_);
      heap_.back() = {score, row};
      std::push_heap(heap_.begin(), heap_.end(), better_);
    }
  }

  RankedList finish(std::string query_id) {
    std::sort(heap_.begin(), heap_.end(), better_);
    RankedList out;
    out.query_id = std::move(query_id);
    out.entries.reserve(heap_.size());
    for (const auto& item : heap_) out.entries.push_back({better_.store->id(item.row), item.score});
    return out;
  }

 private:
  struct Item {
    double score;
    std::size_t row;
  };

  // Higher score first, then ascending id.
  struct Better {
    const EmbeddingStore* store;
    bool operator()(const Item& a, const Item& b) const {
      if (a.score != b.score) return a.score > b.score;
      return store->id(a.row) < store->id(b.row);
    }
  };

  std::size_t k_;
  Better better_;
  std::vector<Item> heap_;
};

// Row in the corpus store with the same id as the query, if any.
std::size_t excluded_row(const RowSet& queries, std::size_t query_row, const RowSet& corpus) {
  if (queries.store == corpus.store) return query_row;
  auto r = corpus.store->find(queries.store->id(query_row));
  return r ? *r : std::numeric_limits<std::size_t>::max();
}

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

}  // namespace

RowSet all_rows(const EmbeddingStore& store) {
  RowSet set{&store, {}};
  set.rows.resize(store.count());
  for (std::size_t r = 0; r < store.count(); ++r) set.rows[r] = r;
  return set;
}

double cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) throw InputError(fmt::format("dimension mismatch: {} vs {}", u.size(), v.size()));
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) throw InputError("cosine of a zero-norm vector");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  return finish_score(dot, nu, nv);
}

std::vector<RankedList> top_k_batch(const RowSet& queries, const RowSet& corpus, std::size_t k) {
  require_same_store_dims(queries, corpus);
  if (k == 0) throw InputError("k must be positive");
  if (corpus.empty()) throw InputError("empty corpus");
  require_nonzero_rows(queries, "queries");
  require_nonzero_rows(corpus, "corpus");

  const auto& qstore = *queries.store;
  const auto& cstore = *corpus.store;
  std::vector<RankedList> results(queries.size());
  const std::size_t n_blocks = (queries.size() + kQueryBlock - 1) / kQueryBlock;

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const std::size_t begin = b * kQueryBlock;
    const std::size_t end = std::min(begin + kQueryBlock, queries.size());
    auto block_rows = std::span<const std::size_t>(queries.rows).subspan(begin, end - begin);
    const auto panels = make_panels(qstore, block_rows);

    std::vector<TopKHeap> heaps;
    std::vector<std::size_t> excluded;
    heaps.reserve(block_rows.size());
    for (auto q : block_rows) {
      heaps.emplace_back(k, cstore);
      excluded.push_back(excluded_row(queries, q, corpus));
    }

    std::array<double, kPanel> scores{};
    for (std::size_t t = 0; t < corpus.size(); t += kCorpusTile) {
      const std::size_t t_end = std::min(t + kCorpusTile, corpus.size());
      for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        for (std::size_t c = t; c < t_end; ++c) {
          const std::size_t row = corpus.rows[c];
          panel.score(cstore.row(row), cstore.norm(row), scores);
          for (std::size_t j = 0; j < panel.size; ++j) {
            const std::size_t qi = p * kPanel + j;
            if (row != excluded[qi]) heaps[qi].offer(scores[j], row);
          }
        }
      }
    }
    for (std::size_t qi = 0; qi < block_rows.size(); ++qi) {
      results[begin + qi] = heaps[qi].finish(qstore.id(block_rows[qi]));
    }
  }
  return results;
}

RankedList top_k(const EmbeddingStore& store, std::size_t query_row, const RowSet& corpus, std::size_t k) {
  RowSet query{&store, {query_row}};
  return std::move(top_k_batch(query, corpus, k).front());
}

RankedList top_k(const EmbeddingStore& store, const std::string& query_id, const RowSet& corpus, std::size_t k) {
  return top_k(store, store.row_of(query_id), corpus, k);
}

SimilarityStats pairwise_stats(const RowSet& queries, const RowSet& corpus, std::size_t bins) {
  require_same_store_dims(queries, corpus);
  if (bins == 0) throw InputError("bins must be positive");
  if (queries.empty() || corpus.empty()) throw InputError("empty input sets");
  require_nonzero_rows(queries, "queries");
  require_nonzero_rows(corpus, "corpus");

  const auto& qstore = *queries.store;
  const auto& cstore = *corpus.store;
  const double width = 2.0 / static_cast<double>(bins);
  const std::size_t n_blocks = (queries.size() + kQueryBlock - 1) / kQueryBlock;
  std::vector<Moments> block_moments(n_blocks);
  std::vector<std::vector<std::size_t>> block_hist(n_blocks, std::vector<std::size_t>(bins, 0));

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const std::size_t begin = b * kQueryBlock;
    const std::size_t end = std::min(begin + kQueryBlock, queries.size());
    const auto panels = make_panels(qstore, std::span<const std::size_t>(queries.rows).subspan(begin, end - begin));
    auto& moments = block_moments[b];
    auto& hist = block_hist[b];
    std::array<double, kPanel> scores{};
    for (std::size_t t = 0; t < corpus.size(); t += kCorpusTile) {
      const std::size_t t_end = std::min(t + kCorpusTile, corpus.size());
      for (const auto& panel : panels) {
        for (std::size_t c = t; c < t_end; ++c) {
          const std::size_t row = corpus.rows[c];
          panel.score(cstore.row(row), cstore.norm(row), scores);
          for (std::size_t j = 0; j < panel.size; ++j) {
            moments.add(scores[j]);
            auto bin = static_cast<std::size_t>((scores[j] + 1.0) / width);
            hist[std::min(bin, bins - 1)] += 1;
          }
        }
      }
    }
  }

  Moments total;
  for (const auto& m : block_moments) total.merge(m);
  SimilarityStats stats;
  stats.n = total.n;
  stats.mean = total.mean;
  stats.std = std::sqrt(std::max(0.0, total.m2 / static_cast<double>(total.n)));
  stats.histogram.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    stats.histogram[i].lower = -1.0 + width * static_cast<double>(i);
    for (const auto& h : block_hist) stats.histogram[i].count += h[i];
  }
  return stats;
}

}  // namespace synve
