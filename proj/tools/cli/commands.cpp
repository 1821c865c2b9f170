#include "cli/commands.hpp"

#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "cli/run_config.hpp"
#include "json.hpp"
#include "synve/embedding_store.hpp"
#include "synve/error.hpp"
#include "synve/eval_metrics.hpp"
#include "synve/manifest.hpp"
#include "synve/mlp.hpp"
#include "synve/report_io.hpp"
#include "synve/retrieval_metrics.hpp"
#include "synve/similarity.hpp"
#include "synve/trainer.hpp"
#include "synve/transfer_eval.hpp"

namespace synve::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Option bound to a RunConfig field that can also be filled from --config.
struct Binding {
  std::string key;
  CLI::Option* option;
  std::function<void(const json&)> assign;
};

class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& description, RunConfig& config)
      : sub_(app.add_subcommand(name, description)), config_(config) {}

  template <typename T>
  Command& opt(const std::string& flag, T& field, const std::string& description, bool required = false) {
    auto* o = sub_->add_option("--" + flag, field, description);
    o->capture_default_str();
    if (required) required_.push_back(flag);
    bindings_.push_back({key_of(flag), o, [&field](const json& v) { field = v.get<T>(); }});
    return *this;
  }

  Command& flag(const std::string& flag, bool& field, const std::string& description) {
    auto* o = sub_->add_flag("--" + flag, field, description);
    bindings_.push_back({key_of(flag), o, [&field](const json& v) { field = v.get<bool>(); }});
    return *this;
  }

  CLI::App* app() const { return sub_; }

  // Fills options the user did not pass from the config file, then checks
  // required options (which may come from either source).
  void apply_config(const json& file_config) {
    for (auto& b : bindings_) {
      if (b.option->count() > 0) continue;
      auto it = file_config.find(b.key);
      if (it == file_config.end()) continue;
      try {
        b.assign(*it);
      } catch (const json::exception& e) {
        throw InputError(fmt::format("config key '{}': {}", b.key, e.what()));
      }
    }
    ordered_json effective = config_;
    for (const auto& flag : required_) {
      const auto& v = effective[key_of(flag)];
      if (v.is_string() && v.get<std::string>().empty()) throw InputError(fmt::format("--{} is required", flag));
    }
  }

 private:
  static std::string key_of(std::string flag) {
    std::replace(flag.begin(), flag.end(), '-', '_');
    return flag;
  }

  CLI::App* sub_;
  RunConfig& config_;
  std::vector<Binding> bindings_;
  std::vector<std::string> required_;
};

struct Io {
  std::ostream& out;
  std::ostream& err;

  template <typename... Args>
  void log(fmt::format_string<Args...> f, Args&&... args) const {
    err << "[synve] " << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
};

std::optional<Split> parse_split_or_all(const std::string& text, const char* flag) {
  if (text.empty() || text == "all") return std::nullopt;
  auto s = parse_split(text);
  if (!s) throw InputError(fmt::format("--{}: unknown split '{}' (train|dev|test|all)", flag, text));
  return s;
}

Role parse_role_flag(const std::string& text, const char* flag) {
  auto r = parse_role(text);
  if (!r) throw InputError(fmt::format("--{}: unknown role '{}'", flag, text));
  return *r;
}

fs::path prepare_out(const RunConfig& c) {
  if (c.out.empty()) throw InputError("--out is required");
  fs::path out(c.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw InputError(fmt::format("cannot create output directory '{}'", c.out));
  return out;
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw InputError(fmt::format("--{} is required", flag));
  if (!fs::is_regular_file(path)) throw InputError(fmt::format("--{}: no such file '{}'", flag, path));
}

void echo_config(const RunConfig& c, const fs::path& out) {
  ordered_json j = c;
  write_text_file(out / "config.json", j.dump(2) + "\n");
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

struct Dataset {
  EmbeddingStore store;
  Manifest manifest;
};

Dataset load_dataset(const std::string& store_path, const std::string& manifest_path, const char* store_flag,
                     const char* manifest_flag) {
  require_file(store_path, store_flag);
  require_file(manifest_path, manifest_flag);
  Dataset d;
  d.store = load_store(store_path);
  d.manifest = load_manifest(manifest_path, d.store);
  return d;
}

std::vector<PairExample> load_nonempty_pairs(const std::string& path, const Dataset& d, const char* flag) {
  require_file(path, flag);
  auto pairs = load_pairs(path, d.store, d.manifest);
  if (pairs.empty()) throw InputError(fmt::format("{}: no pairs", path));
  return pairs;
}

RowSet rows_for(const Dataset& d, Role role, std::optional<Split> split) {
  RowSet set{&d.store, {}};
  for (const auto* e : d.manifest.select(role, split)) set.rows.push_back(e->row);
  return set;
}

TrainConfig train_config(const RunConfig& c) {
  TrainConfig t;
  t.epochs = c.epochs;
  t.batch_size = c.batch_size;
  t.learning_rate = c.lr;
  t.seed = c.seed;
  t.hidden = c.hidden;
  auto act = parse_activation(c.activation);
  if (!act) throw InputError(fmt::format("--activation: unknown activation '{}'", c.activation));
  t.activation = *act;
  t.validate();
  return t;
}

ordered_json validation_report(const Dataset& d, const std::vector<PairExample>& pairs) {
  ordered_json j;
  j["store"] = {{"count", d.store.count()}, {"dim", d.store.dim()}};
  ordered_json roles = ordered_json::object();
  for (Role r : {Role::original_image, Role::generated_image, Role::hypothesis_text}) {
    ordered_json per_split = ordered_json::object();
    per_split["total"] = d.manifest.count(r);
    for (Split s : {Split::train, Split::dev, Split::test}) per_split[std::string(to_string(s))] = d.manifest.count(r, s);
    roles[std::string(to_string(r))] = per_split;
  }
  j["manifest"] = {{"entries", d.manifest.size()}, {"roles", roles}};
  std::map<Label, std::size_t> labels;
  std::map<Split, std::size_t> splits;
  for (const auto& p : pairs) {
    labels[p.label] += 1;
    splits[d.manifest.at(p.premise_id).split] += 1;
  }
  ordered_json label_counts = ordered_json::object();
  for (Label l : kLabelOrder) label_counts[std::string(to_string(l))] = labels[l];
  ordered_json split_counts = ordered_json::object();
  for (Split s : {Split::train, Split::dev, Split::test}) split_counts[std::string(to_string(s))] = splits[s];
  j["pairs"] = {{"total", pairs.size()}, {"labels", label_counts}, {"splits", split_counts}};
  return j;
}

// ---------------------------------------------------------------------------

int cmd_validate(const RunConfig& c, const Io& io) {
  auto d = load_dataset(c.store, c.manifest, "store", "manifest");
  auto pairs = load_nonempty_pairs(c.pairs, d, "pairs");
  const auto report = validation_report(d, pairs);
  io.out << dump(report);
  if (!c.out.empty()) {
    const auto out = prepare_out(c);
    write_text_file(out / "validation.json", dump(report));
    echo_config(c, out);
  }
  return kExitOk;
}

SimilarityStats run_stats(const Dataset& d, const RunConfig& c, std::optional<Split> split) {
  const auto queries = rows_for(d, parse_role_flag(c.query_role, "query-role"), split);
  const auto corpus = rows_for(d, parse_role_flag(c.corpus_role, "corpus-role"), split);
  return pairwise_stats(queries, corpus, c.bins);
}

int cmd_stats(const RunConfig& c, const Io& io) {
  auto d = load_dataset(c.store, c.manifest, "store", "manifest");
  const auto out = prepare_out(c);
  const auto stats = run_stats(d, c, parse_split_or_all(c.split, "split"));
  write_text_file(out / "stats.json", stats_to_json(stats));
  write_text_file(out / "histogram.csv", histogram_to_csv(stats));
  echo_config(c, out);
  io.out << fmt::format("n={} mean={} std={}\n", stats.n, format_real(stats.mean), format_real(stats.std));
  return kExitOk;
}

MetricCurve run_full_curve(const Dataset& d, const RunConfig& c, std::optional<Split> split,
                           std::vector<std::string>* skipped) {
  const auto corpus_split = c.corpus_split.empty() ? split : parse_split_or_all(c.corpus_split, "corpus-split");
  const auto queries = rows_for(d, Role::original_image, split);
  const auto corpus = rows_for(d, Role::generated_image, corpus_split);
  auto result = curve(queries, corpus, d.manifest, {.k_max = c.k_max, .skip_childless = c.skip_childless});
  if (skipped) *skipped = std::move(result.skipped_queries);
  return result.curve;
}

SampledCurves run_sampled_curves(const Dataset& d, const RunConfig& c, Split split) {
  return sampled_curves(d.store, d.manifest, split,
                        {.sample_size = c.sample_size, .n_samples = c.n_samples, .seed = c.seed, .k_max = c.k_max});
}

int cmd_curves(const RunConfig& c, const Io& io) {
  auto d = load_dataset(c.store, c.manifest, "store", "manifest");
  const auto out = prepare_out(c);
  const auto split = parse_split_or_all(c.split, "split");
  if (c.mode == "full") {
    std::vector<std::string> skipped;
    const auto cv = run_full_curve(d, c, split, &skipped);
    for (const auto& id : skipped) io.log("skipped childless query {}", id);
    write_text_file(out / "curve.csv", curve_to_csv(cv));
    write_text_file(out / "curve.json", curve_to_json(cv));
    io.out << fmt::format("queries={} recall@{}={} precision@{}={}\n", cv.n_queries, cv.ks.back(),
                          format_real(cv.recall.back()), cv.ks.back(), format_real(cv.precision.back()));
  } else if (c.mode == "sampled") {
    if (!split) throw InputError("--split must name one split in sampled mode");
    const auto sc = run_sampled_curves(d, c, *split);
    write_text_file(out / "curve.csv", curve_to_csv(sc.aggregate));
    write_text_file(out / "curves.json", sampled_curves_to_json(sc));
    const auto& agg = sc.aggregate;
    io.out << fmt::format("samples={} recall@{}={} hits@{}={}\n", sc.samples.size(), agg.ks.back(),
                          format_real(agg.recall.back()), agg.ks.back(), format_real(agg.hits.back()));
  } else {
    throw InputError(fmt::format("--mode: unknown mode '{}' (full|sampled)", c.mode));
  }
  echo_config(c, out);
  return kExitOk;
}

struct TrainOutcome {
  TrainResult result;
  double dev_accuracy = 0.0;
};

TrainOutcome train_to(const Dataset& d, const std::vector<PairExample>& pairs, const RunConfig& c, const fs::path& out,
                      const Io& io) {
  const auto config = train_config(c);
  const auto train_pairs = filter_by_split(pairs, d.manifest, Split::train);
  const auto dev_pairs = filter_by_split(pairs, d.manifest, Split::dev);
  if (train_pairs.empty()) throw InputError("no pairs with a train-split premise");
  if (dev_pairs.empty()) throw InputError("no pairs with a dev-split premise");
  io.log("training on {} pairs, selecting on {} dev pairs, {} epochs", train_pairs.size(), dev_pairs.size(),
         config.epochs);
  TrainOutcome o;
  o.result = train(resolve_pairs(train_pairs, d.store), resolve_pairs(dev_pairs, d.store), config);
  const auto& h = o.result.history;
  o.dev_accuracy = h.epochs[h.best_epoch].dev_accuracy;
  fs::create_directories(out);
  save_model(o.result.model, out / "model.bin");
  write_text_file(out / "history.csv", history_to_csv(h));
  ordered_json summary = {{"best_epoch", h.best_epoch + 1},
                          {"dev_accuracy", o.dev_accuracy},
                          {"dev_macro_f1", h.epochs[h.best_epoch].dev_macro_f1},
                          {"train_pairs", train_pairs.size()},
                          {"dev_pairs", dev_pairs.size()}};
  write_text_file(out / "train_summary.json", dump(summary));
  io.log("best epoch {} dev accuracy {}", h.best_epoch + 1, format_real(o.dev_accuracy));
  return o;
}

int cmd_train(const RunConfig& c, const Io& io) {
  auto d = load_dataset(c.store, c.manifest, "store", "manifest");
  const auto pairs = load_nonempty_pairs(c.pairs, d, "pairs");
  const auto out = prepare_out(c);
  const auto o = train_to(d, pairs, c, out, io);
  echo_config(c, out);
  io.out << fmt::format("best_epoch={} dev_accuracy={}\n", o.result.history.best_epoch + 1,
                        format_real(o.dev_accuracy));
  return kExitOk;
}

MlpModel load_model_flag(const RunConfig& c) {
  require_file(c.model, "model");
  return load_model(c.model);
}

std::vector<PairExample> select_split(const std::vector<PairExample>& pairs, const Dataset& d,
                                      std::optional<Split> split) {
  auto selected = split ? filter_by_split(pairs, d.manifest, *split) : pairs;
  if (selected.empty()) throw InputError("no pairs in the selected split");
  return selected;
}

EvalReport eval_pairs(const MlpModel& model, const Dataset& d, const std::vector<PairExample>& pairs) {
  const auto resolved = resolve_pairs(pairs, d.store);
  return evaluate(resolved.labels, predict_all(model, resolved));
}

int cmd_eval(const RunConfig& c, const Io& io) {
  const auto model = load_model_flag(c);
  auto d = load_dataset(c.store, c.manifest, "store", "manifest");
  const auto pairs = load_nonempty_pairs(c.pairs, d, "pairs");
  const auto out = prepare_out(c);
  const auto split = parse_split_or_all(c.split.empty() ? "test" : c.split, "split");
  const auto report = eval_pairs(model, d, select_split(pairs, d, split));
  write_text_file(out / "report.json", eval_report_to_json(report));
  write_text_file(out / "confusion.csv", confusion_to_csv(report));
  echo_config(c, out);
  io.out << fmt::format("n={} accuracy={} macro_f1={}\n", report.n, format_real(report.accuracy),
                        format_real(report.macro_f1));
  return kExitOk;
}

TransferPolicy transfer_policy(const RunConfig& c) {
  auto h = parse_neutral_handling(c.neutral_policy);
  if (!h) throw InputError(fmt::format("--neutral-policy: unknown policy '{}'", c.neutral_policy));
  return {.neutral_handling = *h, .target_labels = std::nullopt};
}

TransferReport transfer_pairs(const MlpModel& model, const Dataset& d, const std::vector<PairExample>& pairs,
                              const TransferPolicy& policy) {
  return evaluate_transfer(model, resolve_pairs(pairs, d.store), policy);
}

int cmd_transfer(const RunConfig& c, const Io& io) {
  const auto model = load_model_flag(c);
  auto d = load_dataset(c.store, c.manifest, "store", "manifest");
  const auto pairs = load_nonempty_pairs(c.pairs, d, "pairs");
  const auto out = prepare_out(c);
  const auto split = parse_split_or_all(c.split, "split");
  const auto report = transfer_pairs(model, d, select_split(pairs, d, split), transfer_policy(c));
  write_text_file(out / "transfer.json", transfer_report_to_json(report));
  write_text_file(out / "confusion.csv", confusion_to_csv(report.report));
  echo_config(c, out);
  io.out << fmt::format("n={} accuracy={} macro_f1={} neutral_predictions={}\n", report.report.n,
                        format_real(report.report.accuracy), format_real(report.report.macro_f1),
                        report.neutral_predictions);
  return kExitOk;
}

std::string cell(double accuracy, double f1) { return fmt::format("{:.1f}% / {:.3f}", 100.0 * accuracy, f1); }

int cmd_run_all(const RunConfig& c, const Io& io) {
  auto d = load_dataset(c.store, c.manifest, "store", "manifest");
  const auto original_pairs = load_nonempty_pairs(c.pairs, d, "pairs");
  const auto generated_pairs = load_nonempty_pairs(c.gen_pairs, d, "gen-pairs");
  const auto out = prepare_out(c);
  ordered_json summary;
  summary["validation"] = {{"original", validation_report(d, original_pairs)},
                           {"generated", validation_report(d, generated_pairs)}};

  fs::create_directories(out / "intrinsic");
  ordered_json intrinsic;
  for (Split s : {Split::dev, Split::test}) {
    const std::string name(to_string(s));
    if (d.manifest.count(Role::original_image, s) == 0 || d.manifest.count(Role::generated_image, s) == 0) continue;
    const auto stats = run_stats(d, c, s);
    write_text_file(out / "intrinsic" / fmt::format("stats_{}.json", name), stats_to_json(stats));
    write_text_file(out / "intrinsic" / fmt::format("histogram_{}.csv", name), histogram_to_csv(stats));
    intrinsic["similarity"][name] = {{"mean", stats.mean}, {"std", stats.std}, {"n", stats.n}};
  }
  for (Split s : {Split::train, Split::dev, Split::test}) {
    const std::string name(to_string(s));
    const auto originals = d.manifest.count(Role::original_image, s);
    if (originals == 0) continue;
    std::vector<std::string> skipped;
    RunConfig full = c;
    full.corpus_split.clear();
    full.skip_childless = true;
    const auto cv = run_full_curve(d, full, s, &skipped);
    write_text_file(out / "intrinsic" / fmt::format("curve_full_{}.csv", name), curve_to_csv(cv));
    intrinsic["full"][name] = {{"recall_at_kmax", cv.recall.back()}, {"hits_at_kmax", cv.hits.back()}};
    if (originals >= c.sample_size) {
      const auto sc = run_sampled_curves(d, c, s);
      write_text_file(out / "intrinsic" / fmt::format("curve_sampled_{}.csv", name), curve_to_csv(sc.aggregate));
      write_text_file(out / "intrinsic" / fmt::format("curves_sampled_{}.json", name), sampled_curves_to_json(sc));
      intrinsic["sampled"][name] = {{"recall_at_kmax", sc.aggregate.recall.back()},
                                    {"hits_at_kmax", sc.aggregate.hits.back()},
                                    {"samples", sc.samples.size()}};
    } else {
      io.log("split {} has {} originals (< sample size {}); sampled curves skipped", name, originals, c.sample_size);
    }
  }
  summary["intrinsic"] = intrinsic;

  const auto original_model = train_to(d, original_pairs, c, out / "original", io).result.model;
  const auto generated_model = train_to(d, generated_pairs, c, out / "generated", io).result.model;

  const std::vector<std::pair<std::string, const MlpModel*>> models = {{"original", &original_model},
                                                                         {"generated", &generated_model}};
  const std::vector<std::pair<std::string, const std::vector<PairExample>*>> tests = {
      {"original", &original_pairs}, {"generated", &generated_pairs}};

  std::string table1 = "train_set,test_set,accuracy,macro_f1\n";
  ordered_json t1;
  for (const auto& [mname, model] : models) {
    for (const auto& [tname, pairs] : tests) {
      const auto report = eval_pairs(*model, d, select_split(*pairs, d, Split::test));
      write_text_file(out / mname / fmt::format("report_{}.json", tname), eval_report_to_json(report));
      table1 += fmt::format("{},{},{},{}\n", mname, tname, format_real(report.accuracy), format_real(report.macro_f1));
      t1[mname][tname] = {{"accuracy", report.accuracy}, {"macro_f1", report.macro_f1}};
      io.log("model={} test={} {}", mname, tname, cell(report.accuracy, report.macro_f1));
    }
  }
  write_text_file(out / "table1.csv", table1);
  summary["table1"] = t1;

  if (!c.target_store.empty() || !c.target_pairs.empty()) {
    auto target = load_dataset(c.target_store, c.target_manifest, "target-store", "target-manifest");
    std::vector<std::pair<std::string, std::vector<PairExample>>> target_sets;
    target_sets.emplace_back("original", load_nonempty_pairs(c.target_pairs, target, "target-pairs"));
    if (!c.target_gen_pairs.empty()) {
      target_sets.emplace_back("generated", load_nonempty_pairs(c.target_gen_pairs, target, "target-gen-pairs"));
    }
    const auto policy = transfer_policy(c);
    std::string table2 = "train_set,test_set,accuracy,macro_f1,neutral_predictions,majority_baseline\n";
    ordered_json t2;
    for (const auto& [mname, model] : models) {
      for (const auto& [tname, pairs] : target_sets) {
        const auto report = transfer_pairs(*model, target, pairs, policy);
        write_text_file(out / mname / fmt::format("transfer_{}.json", tname), transfer_report_to_json(report));
        table2 += fmt::format("{},{},{},{},{},{}\n", mname, tname, format_real(report.report.accuracy),
                              format_real(report.report.macro_f1), report.neutral_predictions,
                              format_real(report.report.majority_baseline_accuracy));
        t2[mname][tname] = {{"accuracy", report.report.accuracy},
                            {"macro_f1", report.report.macro_f1},
                            {"neutral_predictions", report.neutral_predictions}};
      }
    }
    write_text_file(out / "table2.csv", table2);
    summary["table2"] = t2;
  }

  write_text_file(out / "summary.json", dump(summary));
  echo_config(c, out);
  io.out << table1;
  return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Io io{out, err};
  RunConfig config;
  std::string config_path;

  CLI::App app{"synve: embedding-space validation and entailment classifier harness", "synve"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto common_data = [&](Command& cmd) {
    cmd.opt("store", config.store, "Binary embedding store (VEEM)", true)
        .opt("manifest", config.manifest, "JSONL manifest", true);
  };
  auto common_run = [&](Command& cmd) {
    cmd.opt("out", config.out, "Output directory").opt("threads", config.threads, "Worker threads (0 = all cores)");
    cmd.app()->add_option("--config", config_path, "JSON config file (flags take precedence)");
  };
  auto train_opts = [&](Command& cmd) {
    cmd.opt("epochs", config.epochs, "Training epochs")
        .opt("batch-size", config.batch_size, "Minibatch size")
        .opt("lr", config.lr, "Adam learning rate")
        .opt("seed", config.seed, "Random seed")
        .opt("hidden", config.hidden, "Hidden layer width")
        .opt("activation", config.activation, "Hidden nonlinearity: relu|identity|tanh");
  };

  Command validate(app, "validate", "Validate a store, manifest and pair file", config);
  common_data(validate);
  validate.opt("pairs", config.pairs, "JSONL pair file", true);
  common_run(validate);

  Command stats(app, "stats", "Cosine similarity distribution between two roles", config);
  common_data(stats);
  stats.opt("split", config.split, "train|dev|test|all")
      .opt("query-role", config.query_role, "Role of the query rows")
      .opt("corpus-role", config.corpus_role, "Role of the corpus rows")
      .opt("bins", config.bins, "Histogram bins over [-1, 1]");
  common_run(stats);

  Command curves(app, "curves", "Recall@k / precision@k curves for parent->children retrieval", config);
  common_data(curves);
  curves.opt("split", config.split, "Split of the query originals: train|dev|test|all")
      .opt("corpus-split", config.corpus_split, "Split of the candidate pool in full mode (default: --split)")
      .opt("mode", config.mode, "full|sampled")
      .opt("k-max", config.k_max, "Largest k")
      .opt("sample-size", config.sample_size, "Originals per sample")
      .opt("n-samples", config.n_samples, "Number of samples")
      .opt("seed", config.seed, "Sampling seed")
      .flag("skip-childless", config.skip_childless, "Skip queries without children instead of failing");
  common_run(curves);

  Command train_cmd(app, "train", "Train the fused-feature classifier with dev-epoch selection", config);
  common_data(train_cmd);
  train_cmd.opt("pairs", config.pairs, "JSONL pair file (split taken from the premise)", true);
  train_opts(train_cmd);
  common_run(train_cmd);

  Command eval_cmd(app, "eval", "Evaluate a checkpoint on a pair file", config);
  common_data(eval_cmd);
  eval_cmd.opt("model", config.model, "Checkpoint file", true)
      .opt("pairs", config.pairs, "JSONL pair file", true)
      .opt("split", config.split, "Split to evaluate (default test; 'all' for every pair)");
  common_run(eval_cmd);

  Command transfer_cmd(app, "transfer", "Evaluate a checkpoint on another dataset", config);
  common_data(transfer_cmd);
  transfer_cmd.opt("model", config.model, "Checkpoint file", true)
      .opt("pairs", config.pairs, "JSONL pair file of the target dataset", true)
      .opt("split", config.split, "Split to evaluate (default all)")
      .opt("neutral-policy", config.neutral_policy, "count_as_error|exclude_and_report");
  common_run(transfer_cmd);

  Command run_all(app, "run-all", "Full pipeline for an original/generated dataset pair", config);
  common_data(run_all);
  run_all.opt("pairs", config.pairs, "Pairs with original-image premises", true)
      .opt("gen-pairs", config.gen_pairs, "Pairs with generated-image premises", true)
      .opt("target-store", config.target_store, "Transfer target store")
      .opt("target-manifest", config.target_manifest, "Transfer target manifest")
      .opt("target-pairs", config.target_pairs, "Transfer target pairs (original premises)")
      .opt("target-gen-pairs", config.target_gen_pairs, "Transfer target pairs (generated premises)")
      .opt("query-role", config.query_role, "Role of similarity queries")
      .opt("corpus-role", config.corpus_role, "Role of similarity corpus")
      .opt("bins", config.bins, "Histogram bins")
      .opt("k-max", config.k_max, "Largest k")
      .opt("sample-size", config.sample_size, "Originals per sample")
      .opt("n-samples", config.n_samples, "Number of samples")
      .opt("neutral-policy", config.neutral_policy, "count_as_error|exclude_and_report");
  train_opts(run_all);
  common_run(run_all);

  const std::vector<std::pair<Command*, int (*)(const RunConfig&, const Io&)>> handlers = {
      {&validate, cmd_validate}, {&stats, cmd_stats},     {&curves, cmd_curves},  {&train_cmd, cmd_train},
      {&eval_cmd, cmd_eval},     {&transfer_cmd, cmd_transfer}, {&run_all, cmd_run_all}};

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    for (const auto& [cmd, handler] : handlers) {
      if (!cmd->app()->parsed()) continue;
      json file_config = json::object();
      if (!config_path.empty()) {
        file_config = json::parse(read_text_file(config_path), nullptr, false);
        if (file_config.is_discarded() || !file_config.is_object()) {
          throw InputError(fmt::format("--config: '{}' is not a JSON object", config_path));
        }
      }
      cmd->apply_config(file_config);
      if (config.threads > 0) omp_set_num_threads(static_cast<int>(config.threads));
      return handler(config, io);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace synve::cli
