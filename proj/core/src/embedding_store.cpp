#include "synve/embedding_store.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "synve/error.hpp"

namespace synve {

namespace detail {

std::vector<char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace detail

double l2_norm(std::span<const float> v) {
  double sum = 0.0;
  for (float x : v) sum += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(sum);
}

EmbeddingStore::EmbeddingStore(std::uint32_t dim, std::vector<std::string> ids, std::vector<float> values)
    : dim_(dim), ids_(std::move(ids)), values_(std::move(values)) {
  if (dim_ == 0) throw InputError("store dimension must be positive");
  if (values_.size() != ids_.size() * dim_) {
    throw InputError(fmt::format("store has {} values, expected {} ids x {} dims", values_.size(),
                                 ids_.size(), dim_));
  }
  index_.reserve(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (!index_.emplace(ids_[r], r).second) throw InputError(fmt::format("duplicate id '{}'", ids_[r]));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InputError(fmt::format("non-finite value in row '{}' at column {}", ids_[i / dim_], i % dim_));
    }
  }
  norms_.resize(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r) norms_[r] = l2_norm(row(r));
}

std::optional<std::size_t> EmbeddingStore::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingStore::row_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InputError(fmt::format("id '{}' not in store", id));
  return it->second;
}

std::vector<char> encode_store(const EmbeddingStore& store) {
  if (store.dim() == 0) throw InputError("cannot encode a store without a dimension");
  detail::ByteWriter w;
  w.put_raw({kStoreMagic, 4});
  w.put(kStoreVersion);
  w.put(static_cast<std::uint64_t>(store.count()));
  w.put(store.dim());
  w.put_array(store.values());
  for (const auto& id : store.ids()) w.put_short_string(id);
  return std::move(w.bytes());
}

EmbeddingStore decode_store(std::span<const char> bytes) {
  detail::ByteReader r(bytes);
  if (r.remaining() < kStoreHeaderBytes) throw InputError("truncated payload: header");
  if (r.get_raw(4, "magic") != std::string_view(kStoreMagic, 4)) throw InputError("bad magic: not a VEEM store");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kStoreVersion) throw InputError(fmt::format("unsupported store version {}", version));
  const auto count = r.get<std::uint64_t>("count");
  const auto dim = r.get<std::uint32_t>("dim");
  if (dim == 0) throw InputError("store dimension must be positive");

  // Bound the allocation by what the file can actually hold.
  if (count > r.remaining() / sizeof(float) / dim) {
    throw InputError(fmt::format("truncated payload: header declares {} x {} floats, {} bytes remain", count,
                                 dim, r.remaining()));
  }
  std::vector<float> values(count * dim);
  r.get_array(std::span<float>(values), "vectors");

  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) ids.push_back(r.get_short_string("id table"));
  if (r.remaining() != 0) throw InputError(fmt::format("{} trailing bytes after id table", r.remaining()));

  return EmbeddingStore(dim, std::move(ids), std::move(values));
}

EmbeddingStore load_store(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  try {
    return decode_store(bytes);
  } catch (const InputError& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  detail::write_file_bytes(path, encode_store(store));
}

}  // namespace synve
