#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "synve/eval_metrics.hpp"
#include "synve/retrieval_metrics.hpp"
#include "synve/similarity.hpp"
#include "synve/trainer.hpp"
#include "synve/transfer_eval.hpp"

// Machine-readable outputs. JSON is pretty-printed with two-space indent;
// CSV uses a header row and full round-trip precision for reals.
namespace synve {

std::string stats_to_json(const SimilarityStats& stats);
std::string histogram_to_csv(const SimilarityStats& stats);

// Columns: k, recall_mean, recall_std, precision_mean, precision_std.
std::string curve_to_csv(const MetricCurve& curve);
std::string curve_to_json(const MetricCurve& curve);
std::string sampled_curves_to_json(const SampledCurves& curves);

std::string eval_report_to_json(const EvalReport& report);
std::string confusion_to_csv(const EvalReport& report);
std::string transfer_report_to_json(const TransferReport& report);

// Columns: epoch (1-based), train_loss, train_acc, dev_acc, dev_f1.
std::string history_to_csv(const TrainHistory& history);

// Formats a real with the shortest representation that round-trips.
std::string format_real(double value);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace synve
