#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "json.hpp"

namespace synve::cli {

// Effective configuration of one invocation. Field names double as the keys
// of the --config JSON file and of the echoed config.json.
struct RunConfig {
  std::string store;
  std::string manifest;
  std::string pairs;
  std::string gen_pairs;
  std::string model;
  std::string out;

  std::string target_store;
  std::string target_manifest;
  std::string target_pairs;
  std::string target_gen_pairs;

  std::string split;
  std::string corpus_split;
  std::string query_role = "original_image";
  std::string corpus_role = "generated_image";
  std::size_t bins = 40;

  std::string mode = "full";
  std::size_t k_max = 100;
  std::size_t sample_size = 1000;
  std::size_t n_samples = 30;
  bool skip_childless = false;

  std::uint64_t seed = 0;
  std::size_t epochs = 100;
  std::size_t batch_size = 256;
  double lr = 1e-3;
  std::size_t hidden = 250;
  std::string activation = "relu";

  std::string neutral_policy = "count_as_error";
  std::size_t threads = 0;
};

void to_json(nlohmann::ordered_json& j, const RunConfig& c);

}  // namespace synve::cli
