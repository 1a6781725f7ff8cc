#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "common/json_io.hpp"
#include "tensor/tensor.hpp"

namespace evoke::metrics {

inline constexpr std::size_t kLabels = 3;
inline constexpr std::array<const char*, kLabels> kLabelNames{"valence", "arousal", "dominance"};

struct LabelMetrics {
  double accuracy = 0.0;
  double f1 = 0.0;
};

struct MetricReport {
  std::array<LabelMetrics, kLabels> per_label{};
  double mean_accuracy = 0.0;
  double macro_f1 = 0.0;
  double subset_accuracy = 0.0;
  std::size_t n_samples = 0;
};

/// bit = 1 iff p >= 0.5. probs: [n,3].
Tensor<std::uint8_t> binarize_predictions(const Tensor<float>& probs);
/// Same decision made on logits: bit = 1 iff logit >= 0.
Tensor<std::uint8_t> binarize_logits(const Tensor<float>& logits);

/// F1 = 2TP/(2TP+FP+FN); a label never present and never predicted scores 1.
MetricReport multilabel_metrics(const Tensor<std::uint8_t>& pred, const Tensor<std::uint8_t>& truth);

/// Unweighted mean of every metric; n_samples is summed.
MetricReport aggregate_folds(const std::vector<MetricReport>& reports);

Json to_json(const MetricReport& report);
MetricReport metric_report_from_json(const Json& j);

/// Aligned text table of per-label and headline metrics.
std::string format_table(const MetricReport& report);

}  // namespace evoke::metrics
