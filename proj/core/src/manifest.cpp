#include "synve/manifest.hpp"

#include "json.hpp"

#include <fmt/format.h>

#include "binary_io.hpp"
#include "synve/error.hpp"

namespace synve {

using nlohmann::json;

std::string_view to_string(Role role) {
  switch (role) {
    case Role::original_image:
      return "original_image";
    case Role::generated_image:
      return "generated_image";
    case Role::hypothesis_text:
      return "hypothesis_text";
  }
  return "unknown";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train:
      return "train";
    case Split::dev:
      return "dev";
    case Split::test:
      return "test";
  }
  return "unknown";
}

std::optional<Role> parse_role(std::string_view text) {
  for (Role r : {Role::original_image, Role::generated_image, Role::hypothesis_text}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view text) {
  for (Split s : {Split::train, Split::dev, Split::test}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

namespace {

std::string where(std::span<const std::size_t> lines, std::size_t i) {
  if (i < lines.size()) return fmt::format("line {}", lines[i]);
  return fmt::format("entry {}", i + 1);
}

const std::vector<std::string> kNoChildren;

std::string required_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(fmt::format("missing key '{}'", key));
  if (!it->is_string()) throw InputError(fmt::format("key '{}' must be a string", key));
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw InputError(fmt::format("key '{}' must be a string", key));
  return it->get<std::string>();
}

// Calls fn(object, line_number) for every non-blank line.
template <typename Fn>
void for_each_jsonl(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw InputError(fmt::format("line {}: malformed JSON object", line_no));
    }
    try {
      fn(obj, line_no);
    } catch (const InputError& e) {
      throw InputError(fmt::format("line {}: {}", line_no, e.what()));
    }
    if (end == text.size()) break;
  }
}

}  // namespace

Manifest::Manifest(std::vector<ManifestEntry> entries, const EmbeddingStore& store,
                   std::span<const std::size_t> line_numbers)
    : entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& e = entries_[i];
    auto row = store.find(e.id);
    if (!row) throw InputError(fmt::format("{}: id '{}' not in store", where(line_numbers, i), e.id));
    e.row = *row;
    if (!index_.emplace(e.id, i).second) {
      throw InputError(fmt::format("{}: duplicate manifest id '{}'", where(line_numbers, i), e.id));
    }
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.role != Role::generated_image) {
      if (e.parent_id) {
        throw InputError(fmt::format("{}: parent_id on non-generated entry '{}'", where(line_numbers, i), e.id));
      }
      continue;
    }
    if (!e.parent_id) {
      throw InputError(fmt::format("{}: generated entry '{}' has no parent_id", where(line_numbers, i), e.id));
    }
    auto it = index_.find(*e.parent_id);
    if (it == index_.end()) {
      throw InputError(
          fmt::format("{}: dangling parent '{}' for '{}'", where(line_numbers, i), *e.parent_id, e.id));
    }
    const auto& parent = entries_[it->second];
    if (parent.role != Role::original_image) {
      throw InputError(fmt::format("{}: parent '{}' of '{}' is not an original_image", where(line_numbers, i),
                                   parent.id, e.id));
    }
    if (parent.split != e.split) {
      throw InputError(fmt::format("{}: '{}' is in split {} but its parent '{}' is in {}", where(line_numbers, i),
                                   e.id, to_string(e.split), parent.id, to_string(parent.split)));
    }
    children_[parent.id].push_back(e.id);
  }
}

const ManifestEntry* Manifest::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const ManifestEntry& Manifest::at(const std::string& id) const {
  const auto* e = find(id);
  if (e == nullptr) throw InputError(fmt::format("id '{}' not in manifest", id));
  return *e;
}

const std::vector<std::string>& Manifest::children(const std::string& parent_id) const {
  auto it = children_.find(parent_id);
  return it == children_.end() ? kNoChildren : it->second;
}

std::vector<const ManifestEntry*> Manifest::select(Role role, std::optional<Split> split) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries_) {
    if (e.role == role && (!split || e.split == *split)) out.push_back(&e);
  }
  return out;
}

std::size_t Manifest::count(Role role, std::optional<Split> split) const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += (e.role == role && (!split || e.split == *split)) ? 1 : 0;
  return n;
}

Manifest parse_manifest(std::string_view jsonl, const EmbeddingStore& store) {
  std::vector<ManifestEntry> entries;
  std::vector<std::size_t> lines;
  for_each_jsonl(jsonl, [&](const json& obj, std::size_t line_no) {
    ManifestEntry e;
    e.id = required_string(obj, "id");
    const auto role = required_string(obj, "role");
    const auto split = required_string(obj, "split");
    auto parsed_role = parse_role(role);
    if (!parsed_role) throw InputError(fmt::format("unknown role '{}'", role));
    auto parsed_split = parse_split(split);
    if (!parsed_split) throw InputError(fmt::format("unknown split '{}'", split));
    e.role = *parsed_role;
    e.split = *parsed_split;
    e.parent_id = optional_string(obj, "parent_id");
    e.caption = optional_string(obj, "caption");
    entries.push_back(std::move(e));
    lines.push_back(line_no);
  });
  return Manifest(std::move(entries), store, lines);
}

Manifest load_manifest(const std::filesystem::path& path, const EmbeddingStore& store) {
  const auto bytes = detail::read_file_bytes(path);
  try {
    return parse_manifest(std::string_view(bytes.data(), bytes.size()), store);
  } catch (const InputError& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<PairExample> parse_pairs(std::string_view jsonl, const EmbeddingStore& store,
                                     const Manifest& manifest) {
  std::vector<PairExample> pairs;
  for_each_jsonl(jsonl, [&](const json& obj, std::size_t) {
    PairExample p;
    p.premise_id = required_string(obj, "premise_id");
    p.hypothesis_id = required_string(obj, "hypothesis_id");
    const auto label = required_string(obj, "label");
    auto parsed = parse_label(label);
    if (!parsed) throw InputError(fmt::format("unknown label '{}'", label));
    p.label = *parsed;

    for (const auto* id : {&p.premise_id, &p.hypothesis_id}) {
      if (!store.contains(*id)) throw InputError(fmt::format("unresolvable id '{}'", *id));
      if (manifest.find(*id) == nullptr) throw InputError(fmt::format("unresolvable id '{}' (not in manifest)", *id));
    }
    const auto premise_role = manifest.at(p.premise_id).role;
    if (!is_image(premise_role)) {
      throw InputError(fmt::format("role mismatch: premise '{}' is {}", p.premise_id, to_string(premise_role)));
    }
    const auto hyp_role = manifest.at(p.hypothesis_id).role;
    if (hyp_role != Role::hypothesis_text) {
      throw InputError(fmt::format("role mismatch: hypothesis '{}' is {}", p.hypothesis_id, to_string(hyp_role)));
    }
    pairs.push_back(std::move(p));
  });
  return pairs;
}

std::vector<PairExample> load_pairs(const std::filesystem::path& path, const EmbeddingStore& store,
                                    const Manifest& manifest) {
  const auto bytes = detail::read_file_bytes(path);
  try {
    return parse_pairs(std::string_view(bytes.data(), bytes.size()), store, manifest);
  } catch (const InputError& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<PairExample> filter_by_split(std::span<const PairExample> pairs, const Manifest& manifest,
                                         Split split) {
  std::vector<PairExample> out;
  for (const auto& p : pairs) {
    if (manifest.at(p.premise_id).split == split) out.push_back(p);
  }
  return out;
}

std::string to_jsonl(std::span<const ManifestEntry> entries) {
  std::string out;
  for (const auto& e : entries) {
    json obj = {{"id", e.id}, {"role", std::string(to_string(e.role))}, {"split", std::string(to_string(e.split))}};
    if (e.parent_id) obj["parent_id"] = *e.parent_id;
    if (e.caption) obj["caption"] = *e.caption;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::string to_jsonl(std::span<const PairExample> pairs) {
  std::string out;
  for (const auto& p : pairs) {
    json obj = {{"premise_id", p.premise_id}, {"hypothesis_id", p.hypothesis_id}, {"label", std::string(to_string(p.label))}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

}  // namespace synve
