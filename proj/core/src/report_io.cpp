#include "synve/report_io.hpp"

#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "json.hpp"
#include "synve/error.hpp"

namespace synve {

using nlohmann::ordered_json;

namespace {

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json curve_json(const MetricCurve& c) {
  ordered_json j;
  j["n_queries"] = c.n_queries;
  j["k"] = c.ks;
  j["recall_mean"] = c.recall;
  j["precision_mean"] = c.precision;
  j["hits_mean"] = c.hits;
  j["recall_std"] = c.std_recall ? ordered_json(*c.std_recall) : ordered_json(nullptr);
  j["precision_std"] = c.std_precision ? ordered_json(*c.std_precision) : ordered_json(nullptr);
  return j;
}

ordered_json eval_json(const EvalReport& r) {
  ordered_json j;
  j["n"] = r.n;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  j["majority_baseline_accuracy"] = r.majority_baseline_accuracy;
  ordered_json labels = ordered_json::array();
  for (Label l : r.label_order) labels.push_back(std::string(to_string(l)));
  j["label_order"] = labels;
  ordered_json per_class = ordered_json::object();
  for (Label l : r.label_order) {
    auto it = r.per_class.find(l);
    if (it == r.per_class.end()) continue;
    per_class[std::string(to_string(l))] = {{"precision", it->second.precision},
                                            {"recall", it->second.recall},
                                            {"f1", it->second.f1},
                                            {"support", it->second.support}};
  }
  j["per_class"] = per_class;
  j["confusion"] = r.confusion;
  return j;
}

}  // namespace

std::string format_real(double value) { return fmt::format("{}", value); }

std::string stats_to_json(const SimilarityStats& stats) {
  ordered_json j;
  j["n"] = stats.n;
  j["mean"] = stats.mean;
  j["std"] = stats.std;
  j["bins"] = stats.histogram.size();
  ordered_json hist = ordered_json::array();
  for (const auto& b : stats.histogram) hist.push_back({{"lower", b.lower}, {"count", b.count}});
  j["histogram"] = hist;
  return dump(j);
}

std::string histogram_to_csv(const SimilarityStats& stats) {
  std::string out = "bin_lower,bin_upper,count\n";
  const double width = stats.histogram.empty() ? 0.0 : 2.0 / static_cast<double>(stats.histogram.size());
  for (const auto& b : stats.histogram) {
    out += fmt::format("{},{},{}\n", format_real(b.lower), format_real(b.lower + width), b.count);
  }
  return out;
}

std::string curve_to_csv(const MetricCurve& curve) {
  std::string out = "k,recall_mean,recall_std,precision_mean,precision_std\n";
  for (std::size_t i = 0; i < curve.ks.size(); ++i) {
    const double rs = curve.std_recall ? (*curve.std_recall)[i] : 0.0;
    const double ps = curve.std_precision ? (*curve.std_precision)[i] : 0.0;
    out += fmt::format("{},{},{},{},{}\n", curve.ks[i], format_real(curve.recall[i]), format_real(rs),
                       format_real(curve.precision[i]), format_real(ps));
  }
  return out;
}

std::string curve_to_json(const MetricCurve& curve) { return dump(curve_json(curve)); }

std::string sampled_curves_to_json(const SampledCurves& curves) {
  ordered_json j;
  j["n_samples"] = curves.samples.size();
  j["aggregate"] = curve_json(curves.aggregate);
  ordered_json samples = ordered_json::array();
  for (std::size_t s = 0; s < curves.samples.size(); ++s) {
    ordered_json entry = curve_json(curves.per_sample[s]);
    entry["queries"] = curves.samples[s];
    samples.push_back(std::move(entry));
  }
  j["samples"] = samples;
  return dump(j);
}

std::string eval_report_to_json(const EvalReport& report) { return dump(eval_json(report)); }

std::string confusion_to_csv(const EvalReport& report) {
  std::string out = "gold\\predicted";
  for (Label l : report.label_order) out += fmt::format(",{}", to_string(l));
  out += '\n';
  for (std::size_t g = 0; g < report.label_order.size(); ++g) {
    out += to_string(report.label_order[g]);
    for (auto count : report.confusion[g]) out += fmt::format(",{}", count);
    out += '\n';
  }
  return out;
}

std::string transfer_report_to_json(const TransferReport& report) {
  ordered_json j = eval_json(report.report);
  j["neutral_handling"] = std::string(to_string(report.neutral_handling));
  ordered_json target = ordered_json::array();
  for (Label l : report.target_labels) target.push_back(std::string(to_string(l)));
  j["target_labels"] = target;
  j["neutral_predictions"] = report.neutral_predictions;
  j["excluded"] = report.excluded;
  return dump(j);
}

std::string history_to_csv(const TrainHistory& history) {
  std::string out = "epoch,train_loss,train_acc,dev_acc,dev_f1\n";
  for (std::size_t e = 0; e < history.epochs.size(); ++e) {
    const auto& r = history.epochs[e];
    out += fmt::format("{},{},{},{},{}\n", e + 1, format_real(r.train_loss), format_real(r.train_accuracy),
                       format_real(r.dev_accuracy), format_real(r.dev_macro_f1));
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InputError(fmt::format("write failed for '{}'", path.string()));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace synve
