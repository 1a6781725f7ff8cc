#include "eval/metrics.hpp"

#include <cstdio>

namespace evoke::metrics {

namespace {

Tensor<std::uint8_t> threshold(const Tensor<float>& values, float cut) {
  require(values.rank() == 2 && values.dim(1) == kLabels, ErrorCode::Shape,
          "expected [n,3], got " + shape_string(values.dims()));
  Tensor<std::uint8_t> bits(values.dims());
  for (std::size_t i = 0; i < values.size(); ++i) bits[i] = values[i] >= cut ? 1 : 0;
  return bits;
}

}  // namespace

Tensor<std::uint8_t> binarize_predictions(const Tensor<float>& probs) {
  return threshold(probs, 0.5f);
}

Tensor<std::uint8_t> binarize_logits(const Tensor<float>& logits) {
  return threshold(logits, 0.0f);
}

MetricReport multilabel_metrics(const Tensor<std::uint8_t>& pred,
                                const Tensor<std::uint8_t>& truth) {
  require(pred.dims() == truth.dims(), ErrorCode::Shape,
          "prediction dims " + shape_string(pred.dims()) + " vs truth " +
              shape_string(truth.dims()));
  require(pred.rank() == 2 && pred.dim(1) == kLabels, ErrorCode::Shape,
          "metrics expect [n,3] bit matrices");
  const std::size_t n = pred.dim(0);
  MetricReport r;
  r.n_samples = n;
  std::size_t subset = 0;
  std::array<std::size_t, kLabels> tp{}, fp{}, fn{}, match{};
  for (std::size_t i = 0; i < n; ++i) {
    bool all = true;
    for (std::size_t k = 0; k < kLabels; ++k) {
      const bool p = pred[i * kLabels + k] != 0;
      const bool t = truth[i * kLabels + k] != 0;
      if (p == t) ++match[k]; else all = false;
      if (p && t) ++tp[k];
      if (p && !t) ++fp[k];
      if (!p && t) ++fn[k];
    }
    if (all) ++subset;
  }
  for (std::size_t k = 0; k < kLabels; ++k) {
    auto& m = r.per_label[k];
    m.accuracy = static_cast<double>(match[k]) / static_cast<double>(n);
    const std::size_t denom = 2 * tp[k] + fp[k] + fn[k];
    m.f1 = denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp[k]) / static_cast<double>(denom);
    r.mean_accuracy += m.accuracy / kLabels;
    r.macro_f1 += m.f1 / kLabels;
  }
  r.subset_accuracy = static_cast<double>(subset) / static_cast<double>(n);
  return r;
}

MetricReport aggregate_folds(const std::vector<MetricReport>& reports) {
  require(!reports.empty(), ErrorCode::InvalidArgument, "aggregate_folds needs at least one report");
  const double inv = 1.0 / static_cast<double>(reports.size());
  MetricReport out;
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < kLabels; ++k) {
      out.per_label[k].accuracy += r.per_label[k].accuracy * inv;
      out.per_label[k].f1 += r.per_label[k].f1 * inv;
    }
    out.mean_accuracy += r.mean_accuracy * inv;
    out.macro_f1 += r.macro_f1 * inv;
    out.subset_accuracy += r.subset_accuracy * inv;
    out.n_samples += r.n_samples;
  }
  return out;
}

Json to_json(const MetricReport& r) {
  Json per = Json::object();
  for (std::size_t k = 0; k < kLabels; ++k) {
    per[kLabelNames[k]] = {{"accuracy", r.per_label[k].accuracy}, {"f1", r.per_label[k].f1}};
  }
  return {{"per_label", per},
          {"mean_accuracy", r.mean_accuracy},
          {"macro_f1", r.macro_f1},
          {"subset_accuracy", r.subset_accuracy},
          {"n_samples", r.n_samples}};
}

MetricReport metric_report_from_json(const Json& j) {
  MetricReport r;
  try {
    for (std::size_t k = 0; k < kLabels; ++k) {
      const Json& e = j.at("per_label").at(kLabelNames[k]);
      r.per_label[k] = {e.at("accuracy").get<double>(), e.at("f1").get<double>()};
    }
    r.mean_accuracy = j.at("mean_accuracy").get<double>();
    r.macro_f1 = j.at("macro_f1").get<double>();
    r.subset_accuracy = j.at("subset_accuracy").get<double>();
    r.n_samples = j.at("n_samples").get<std::size_t>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::Format, std::string("metric report: ") + e.what());
  }
  return r;
}

std::string format_table(const MetricReport& r) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-12s %10s %8s\n", "label", "accuracy", "f1");
  out += line;
  for (std::size_t k = 0; k < kLabels; ++k) {
    std::snprintf(line, sizeof(line), "%-12s %10.4f %8.4f\n", kLabelNames[k],
                  r.per_label[k].accuracy, r.per_label[k].f1);
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-12s %10.4f %8.4f\n", "mean", r.mean_accuracy, r.macro_f1);
  out += line;
  std::snprintf(line, sizeof(line), "%-12s %10.4f\n", "subset", r.subset_accuracy);
  out += line;
  std::snprintf(line, sizeof(line), "%-12s %10zu\n", "samples", r.n_samples);
  out += line;
  return out;
}

}  // namespace evoke::metrics
