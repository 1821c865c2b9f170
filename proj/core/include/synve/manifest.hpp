#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synve/embedding_store.hpp"
#include "synve/labels.hpp"

namespace synve {

enum class Role : unsigned char { original_image, generated_image, hypothesis_text };
enum class Split : unsigned char { train, dev, test };

std::string_view to_string(Role role);
std::string_view to_string(Split split);
std::optional<Role> parse_role(std::string_view text);
std::optional<Split> parse_split(std::string_view text);

inline bool is_image(Role role) { return role != Role::hypothesis_text; }

struct ManifestEntry {
  std::string id;
  Role role = Role::original_image;
  Split split = Split::train;
  std::optional<std::string> parent_id;
  std::optional<std::string> caption;
  std::size_t row = 0;  // row in the backing store

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// Validated manifest: every id is in the store, generated images point at an
// original image in the same split, and nothing else carries a parent.
class Manifest {
 public:
  Manifest() = default;
  // Validates and indexes. `line_numbers` (1-based, parallel to entries) is
  // only used to label diagnostics; pass empty when entries are not from a file.
  Manifest(std::vector<ManifestEntry> entries, const EmbeddingStore& store,
           std::span<const std::size_t> line_numbers = {});

  const std::vector<ManifestEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  const ManifestEntry* find(const std::string& id) const;
  const ManifestEntry& at(const std::string& id) const;  // throws InputError

  // Children of an original image, in manifest order.
  const std::vector<std::string>& children(const std::string& parent_id) const;
  // Entries with the given role (and split, when given), in manifest order.
  std::vector<const ManifestEntry*> select(Role role, std::optional<Split> split = std::nullopt) const;
  std::size_t count(Role role, std::optional<Split> split = std::nullopt) const;

 private:
  std::vector<ManifestEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::vector<std::string>> children_;
};

Manifest load_manifest(const std::filesystem::path& path, const EmbeddingStore& store);
Manifest parse_manifest(std::string_view jsonl, const EmbeddingStore& store);

struct PairExample {
  std::string premise_id;
  std::string hypothesis_id;
  Label label = Label::entailment;

  friend bool operator==(const PairExample&, const PairExample&) = default;
};

// Order-preserving; one PairExample per non-blank line. Premises must be image
// entries and hypotheses hypothesis_text entries of `manifest`.
std::vector<PairExample> load_pairs(const std::filesystem::path& path, const EmbeddingStore& store,
                                    const Manifest& manifest);
std::vector<PairExample> parse_pairs(std::string_view jsonl, const EmbeddingStore& store,
                                     const Manifest& manifest);

// Pairs whose premise entry lies in `split`.
std::vector<PairExample> filter_by_split(std::span<const PairExample> pairs, const Manifest& manifest,
                                         Split split);

std::string to_jsonl(std::span<const ManifestEntry> entries);
std::string to_jsonl(std::span<const PairExample> pairs);

}  // namespace synve
