#pragma once

// Synthetic corpora shared by unit, CLI and acceptance tests.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "synve/embedding_store.hpp"
#include "synve/manifest.hpp"
#include "synve/report_io.hpp"

namespace synve::testing {

inline std::vector<float> gaussian_vector(std::mt19937_64& rng, std::size_t d, double sigma = 1.0) {
  std::normal_distribution<double> n(0.0, sigma);
  std::vector<float> v(d);
  for (auto& x : v) x = static_cast<float>(n(rng));
  return v;
}

inline EmbeddingStore random_store(std::size_t count, std::uint32_t dim, std::uint64_t seed,
                                   const std::string& prefix = "v") {
  std::mt19937_64 rng(seed);
  std::vector<std::string> ids;
  std::vector<float> values;
  for (std::size_t i = 0; i < count; ++i) {
    ids.push_back(fmt::format("{}{:06}", prefix, i));
    auto v = gaussian_vector(rng, dim);
    values.insert(values.end(), v.begin(), v.end());
  }
  return EmbeddingStore(dim, std::move(ids), std::move(values));
}

// A full dataset on disk-ready form.
struct Corpus {
  EmbeddingStore store;
  std::vector<ManifestEntry> entries;
  std::vector<PairExample> pairs;

  Manifest manifest() const { return Manifest(entries, store); }

  void write(const std::filesystem::path& dir, const std::string& stem = "data") const {
    std::filesystem::create_directories(dir);
    write_store(store, dir / (stem + ".veem"));
    write_text_file(dir / (stem + ".manifest.jsonl"), to_jsonl(entries));
    write_text_file(dir / (stem + ".pairs.jsonl"), to_jsonl(pairs));
  }
};

class CorpusBuilder {
 public:
  explicit CorpusBuilder(std::uint32_t dim) : dim_(dim) {}

  void add(const std::string& id, const std::vector<float>& v, Role role, Split split,
           std::optional<std::string> parent = std::nullopt) {
    ids_.push_back(id);
    values_.insert(values_.end(), v.begin(), v.end());
    ManifestEntry e;
    e.id = id;
    e.role = role;
    e.split = split;
    e.parent_id = std::move(parent);
    entries_.push_back(std::move(e));
  }

  void pair(const std::string& premise, const std::string& hypothesis, Label label) {
    pairs_.push_back({premise, hypothesis, label});
  }

  Corpus build() const {
    return Corpus{EmbeddingStore(dim_, ids_, values_), entries_, pairs_};
  }

 private:
  std::uint32_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> values_;
  std::vector<ManifestEntry> entries_;
  std::vector<PairExample> pairs_;
};

// `parents` original images, each with `children` generated images. Children
// are parent + N(0, noise^2) when `planted`, otherwise fresh random vectors.
inline Corpus planted_children(std::size_t parents, std::size_t children, std::uint32_t dim, double noise,
                               bool planted, std::uint64_t seed, Split split = Split::train) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eps(0.0, noise);
  CorpusBuilder b(dim);
  for (std::size_t p = 0; p < parents; ++p) {
    const auto parent_id = fmt::format("orig{:05}", p);
    const auto parent = gaussian_vector(rng, dim);
    b.add(parent_id, parent, Role::original_image, split);
    for (std::size_t c = 0; c < children; ++c) {
      std::vector<float> child(dim);
      if (planted) {
        for (std::size_t i = 0; i < dim; ++i) child[i] = static_cast<float>(parent[i] + eps(rng));
      } else {
        child = gaussian_vector(rng, dim);
      }
      b.add(fmt::format("gen{:05}_{}", p, c), child, Role::generated_image, split, parent_id);
    }
  }
  return b.build();
}

// Three-label task whose labels are a function of <premise, hypothesis>:
// entailment h = p + noise, contradiction h = -p + noise, neutral h random.
// The elementwise-product block of the fused vector sums to that inner
// product, so the classes are linearly separable in fused space.
inline Corpus separable_task(std::size_t n_train, std::size_t n_dev, std::size_t n_test, std::uint32_t dim,
                             std::uint64_t seed, double noise = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eps(0.0, noise);
  CorpusBuilder b(dim);
  std::size_t next = 0;
  auto emit = [&](std::size_t n, Split split) {
    for (std::size_t i = 0; i < n; ++i, ++next) {
      const Label label = kLabelOrder[next % kNumLabels];
      const auto premise = gaussian_vector(rng, dim);
      std::vector<float> hyp(dim);
      if (label == Label::neutral) {
        hyp = gaussian_vector(rng, dim);
      } else {
        const double sign = label == Label::entailment ? 1.0 : -1.0;
        for (std::size_t k = 0; k < dim; ++k) hyp[k] = static_cast<float>(sign * premise[k] + eps(rng));
      }
      const auto pid = fmt::format("img{:06}", next);
      const auto hid = fmt::format("hyp{:06}", next);
      b.add(pid, premise, Role::original_image, split);
      b.add(hid, hyp, Role::hypothesis_text, split);
      b.pair(pid, hid, label);
    }
  };
  emit(n_train, Split::train);
  emit(n_dev, Split::dev);
  emit(n_test, Split::test);
  return b.build();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "synve-tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace synve::testing
