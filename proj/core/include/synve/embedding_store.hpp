#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace synve {

// Immutable row-major matrix of float32 feature vectors keyed by opaque string
// ids. Rows are kept exactly as written (no normalization); L2 norms are
// precomputed in double precision for the similarity kernels.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Validates the store invariants: dim > 0, values.size() == ids.size() * dim,
  // unique ids, finite values. Throws InputError otherwise.
  EmbeddingStore(std::uint32_t dim, std::vector<std::string> ids, std::vector<float> values);

  std::uint32_t dim() const { return dim_; }
  std::size_t count() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t row) const { return ids_[row]; }
  std::span<const float> values() const { return values_; }
  std::span<const float> row(std::size_t r) const {
    return {values_.data() + r * dim_, dim_};
  }
  double norm(std::size_t row) const { return norms_[row]; }
  std::span<const double> norms() const { return norms_; }

  std::optional<std::size_t> find(const std::string& id) const;
  // Throws InputError naming the id when absent.
  std::size_t row_of(const std::string& id) const;
  bool contains(const std::string& id) const { return index_.contains(id); }

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
    return a.dim_ == b.dim_ && a.ids_ == b.ids_ && a.values_ == b.values_;
  }

 private:
  std::uint32_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> values_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Binary layout (little-endian):
//   "VEEM" | u32 version (=1) | u64 count | u32 dim
//   | count*dim float32 row-major | count x (u16 byte length + UTF-8 id)
inline constexpr char kStoreMagic[4] = {'V', 'E', 'E', 'M'};
inline constexpr std::uint32_t kStoreVersion = 1;
inline constexpr std::size_t kStoreHeaderBytes = 20;

EmbeddingStore load_store(const std::filesystem::path& path);
void write_store(const EmbeddingStore& store, const std::filesystem::path& path);

// In-memory codec used by the file functions; exposed for tests and tools.
std::vector<char> encode_store(const EmbeddingStore& store);
EmbeddingStore decode_store(std::span<const char> bytes);

// L2 norm accumulated in double, summing squares in index order.
double l2_norm(std::span<const float> v);

}  // namespace synve
