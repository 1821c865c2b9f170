#include "cli/run_config.hpp"

namespace synve::cli {

void to_json(nlohmann::ordered_json& j, const RunConfig& c) {
  j = nlohmann::ordered_json{
      {"store", c.store},
      {"manifest", c.manifest},
      {"pairs", c.pairs},
      {"gen_pairs", c.gen_pairs},
      {"model", c.model},
      {"out", c.out},
      {"target_store", c.target_store},
      {"target_manifest", c.target_manifest},
      {"target_pairs", c.target_pairs},
      {"target_gen_pairs", c.target_gen_pairs},
      {"split", c.split},
      {"corpus_split", c.corpus_split},
      {"query_role", c.query_role},
      {"corpus_role", c.corpus_role},
      {"bins", c.bins},
      {"mode", c.mode},
      {"k_max", c.k_max},
      {"sample_size", c.sample_size},
      {"n_samples", c.n_samples},
      {"skip_childless", c.skip_childless},
      {"seed", c.seed},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"lr", c.lr},
      {"hidden", c.hidden},
      {"activation", c.activation},
      {"neutral_policy", c.neutral_policy},
      {"threads", c.threads},
  };
}

}  // namespace synve::cli
