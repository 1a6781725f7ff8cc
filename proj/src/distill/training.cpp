#include "distill/training.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>

#include "distill/kfold.hpp"

namespace evoke::kd {

namespace {

constexpr std::size_t kEvalBatch = 128;
constexpr std::size_t kWindowFloats = 4 * 9 * 9;
constexpr std::uint64_t kTeacherStream = 1;
constexpr std::uint64_t kStudentStream = 2;
constexpr std::uint64_t kShuffleStream = 3;

Tensor<float> gather_windows(const eeg::Dataset& ds, std::span<const std::size_t> idx) {
  Tensor<float> x({idx.size(), 4, 9, 9});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::memcpy(x.data().data() + i * kWindowFloats,
                ds.windows.data().data() + idx[i] * kWindowFloats, kWindowFloats * sizeof(float));
  }
  return x;
}

Tensor<float> gather_rows(const Tensor<float>& src, std::span<const std::size_t> idx) {
  const std::size_t width = src.dim(1);
  Tensor<float> out({idx.size(), width});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::memcpy(out.data().data() + i * width, src.data().data() + idx[i] * width,
                width * sizeof(float));
  }
  return out;
}

Tensor<std::uint8_t> label_bits(const eeg::Dataset& ds, const std::vector<std::size_t>& idx) {
  Tensor<std::uint8_t> bits({idx.size(), metrics::kLabels});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t k = 0; k < metrics::kLabels; ++k) {
      bits[i * metrics::kLabels + k] = ds.labels[idx[i] * metrics::kLabels + k] > 0.5f ? 1 : 0;
    }
  }
  return bits;
}

// Loss for one batch given student logits and the batch's window indices.
using BatchLoss = std::function<Variable<float>(const Variable<float>& logits,
                                                std::span<const std::size_t> batch,
                                                const Tensor<float>& labels)>;

CvResult run_cross_validation(const eeg::Dataset& ds, const DistillConfig& cfg,
                              const std::string& kind, std::uint64_t init_stream,
                              const std::function<nn::Model(Prng&)>& build,
                              const BatchLoss& batch_loss) {
  validate(cfg);
  require(ds.size() > 0, ErrorCode::Validation, "training dataset is empty");
  const auto splits = cross_validation_splits(ds, cfg.folds, cfg.seed);

  CvResult result;
  result.kind = kind;
  std::vector<metrics::MetricReport> fold_metrics;
  double best_accuracy = -1.0;

  for (std::size_t f = 0; f < splits.size(); ++f) {
    const FoldSplit& split = splits[f];
    require(!split.train_windows.empty(), ErrorCode::Validation,
            "fold " + std::to_string(f) + " has no training windows");
    const std::uint64_t fold_seed = derive_seed(cfg.seed, {f});
    Prng init(derive_seed(fold_seed, {init_stream}));
    nn::Model model = build(init);
    Adam<float> optimizer(model.parameters(), AdamOptions{cfg.lr});

    FoldReport report;
    report.fold = f;
    report.n_train_windows = split.train_windows.size();
    report.n_val_windows = split.val_windows.size();

    std::vector<std::size_t> order = split.train_windows;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      Prng shuffle(derive_seed(fold_seed, {kShuffleStream, epoch}));
      order = split.train_windows;
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

      double epoch_loss = 0.0;
      std::size_t batch_no = 0;
      for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_no) {
        const std::size_t len = std::min(cfg.batch_size, order.size() - start);
        const std::span<const std::size_t> batch(order.data() + start, len);
        const Tensor<float> labels = gather_rows(ds.labels, batch);
        const Variable<float> logits =
            model.forward(Variable<float>::leaf(gather_windows(ds, batch)));
        const Variable<float> loss = batch_loss(logits, batch, labels);
        const double value = loss.value()[0];
        require(std::isfinite(value), ErrorCode::Numeric,
                kind + " training diverged: loss " + std::to_string(value) + " at fold " +
                    std::to_string(f) + " epoch " + std::to_string(epoch) + " batch " +
                    std::to_string(batch_no));
        optimizer.zero_grad();
        backward(loss);
        optimizer.step();
        epoch_loss += value * static_cast<double>(len);
      }
      report.train_losses.push_back(epoch_loss / static_cast<double>(order.size()));
    }
    optimizer.zero_grad();

    report.validation = split.val_windows.empty()
                            ? metrics::MetricReport{}
                            : evaluate(model, ds, split.val_windows);
    fold_metrics.push_back(report.validation);
    if (report.validation.mean_accuracy > best_accuracy) {
      best_accuracy = report.validation.mean_accuracy;
      result.best_fold = f;
      result.checkpoint.model = std::move(model);
      result.checkpoint.metadata = {
          {"kind", kind},
          {"fold", f},
          {"folds", cfg.folds},
          {"seed", cfg.seed},
          {"epoch", cfg.epochs},
          {"lr", cfg.lr},
          {"batch_size", cfg.batch_size},
          {"temperature", cfg.temperature},
          {"alpha", cfg.alpha},
          {"n_trials", ds.trials.size()},
          {"n_windows", ds.size()},
          {"final_loss", report.train_losses.back()},
          {"validation", metrics::to_json(report.validation)},
      };
    }
    result.folds.push_back(std::move(report));
  }
  result.aggregate = metrics::aggregate_folds(fold_metrics);
  return result;
}

}  // namespace

std::vector<FoldSplit> cross_validation_splits(const eeg::Dataset& ds, std::size_t folds,
                                               std::uint64_t seed) {
  const auto trial_folds = kfold_split(ds.trials.size(), folds, seed);
  std::vector<FoldSplit> out(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    const std::set<std::size_t> val(trial_folds[f].begin(), trial_folds[f].end());
    for (std::size_t w = 0; w < ds.size(); ++w) {
      (val.count(ds.window_trial[w]) ? out[f].val_windows : out[f].train_windows).push_back(w);
    }
  }
  return out;
}

Tensor<float> predict_logits(const nn::Model& model, const eeg::Dataset& ds,
                             const std::vector<std::size_t>& windows) {
  std::vector<std::size_t> idx = windows;
  if (idx.empty()) {
    idx.resize(ds.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  }
  NoGradGuard guard;
  std::size_t width = 0;
  std::vector<float> all;
  for (std::size_t start = 0; start < idx.size(); start += kEvalBatch) {
    const std::size_t len = std::min(kEvalBatch, idx.size() - start);
    const Tensor<float> logits =
        model.predict_logits(gather_windows(ds, std::span(idx.data() + start, len)));
    width = logits.dim(1);
    all.insert(all.end(), logits.data().begin(), logits.data().end());
  }
  return Tensor<float>({idx.size(), width}, std::move(all));
}

metrics::MetricReport evaluate(const nn::Model& model, const eeg::Dataset& ds,
                               const std::vector<std::size_t>& windows) {
  std::vector<std::size_t> idx = windows;
  if (idx.empty()) {
    idx.resize(ds.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  }
  const Tensor<float> logits = predict_logits(model, ds, idx);
  return metrics::multilabel_metrics(metrics::binarize_logits(logits), label_bits(ds, idx));
}

metrics::MetricReport evaluate_checkpoint(const nn::Checkpoint& ck, const eeg::Dataset& ds) {
  const Json& meta = ck.metadata;
  if (meta.contains("fold") && meta.contains("folds") && meta.contains("seed")) {
    const auto folds = meta.at("folds").get<std::size_t>();
    const auto fold = meta.at("fold").get<std::size_t>();
    require(meta.value("n_trials", ds.trials.size()) == ds.trials.size(), ErrorCode::Validation,
            "checkpoint was trained on " + std::to_string(meta.value("n_trials", std::size_t{0})) +
                " trials, dataset has " + std::to_string(ds.trials.size()));
    const auto splits = cross_validation_splits(ds, folds, meta.at("seed").get<std::uint64_t>());
    return evaluate(ck.model, ds, splits.at(fold).val_windows);
  }
  return evaluate(ck.model, ds, {});
}

CvResult train_teacher(const eeg::Dataset& ds, const DistillConfig& cfg,
                       const nn::TeacherConfig& arch) {
  return run_cross_validation(
      ds, cfg, "teacher", kTeacherStream, [&](Prng& p) { return nn::build_teacher(arch, p); },
      [](const Variable<float>& logits, std::span<const std::size_t>, const Tensor<float>& y) {
        return bce_with_logits(logits, y);
      });
}

CvResult train_student(const eeg::Dataset& ds, const DistillConfig& cfg,
                       const nn::StudentConfig& arch) {
  return run_cross_validation(
      ds, cfg, "student", kStudentStream, [&](Prng& p) { return nn::build_student(arch, p); },
      [](const Variable<float>& logits, std::span<const std::size_t>, const Tensor<float>& y) {
        return hard_loss(logits, y);
      });
}

CvResult distill_student(const nn::Model& teacher, const eeg::Dataset& ds,
                         const DistillConfig& cfg, const nn::StudentConfig& arch) {
  validate(cfg);
  // The teacher is frozen, so its logits are computed once without a graph.
  const Tensor<float> teacher_logits = predict_logits(teacher, ds, {});
  require(teacher_logits.dim(1) == arch.n_labels, ErrorCode::Shape,
          "teacher emits " + std::to_string(teacher_logits.dim(1)) + " logits, student " +
              std::to_string(arch.n_labels));
  return run_cross_validation(
      ds, cfg, "distilled", kStudentStream, [&](Prng& p) { return nn::build_student(arch, p); },
      [&](const Variable<float>& logits, std::span<const std::size_t> batch,
          const Tensor<float>& y) {
        return distill_loss(gather_rows(teacher_logits, batch), logits, y, cfg);
      });
}

std::vector<SweepRow> sweep(const nn::Model& teacher, const eeg::Dataset& ds,
                            const std::vector<double>& temperatures,
                            const std::vector<double>& alphas, const DistillConfig& cfg,
                            const nn::StudentConfig& arch) {
  require(!temperatures.empty() && !alphas.empty(), ErrorCode::Validation,
          "sweep needs at least one temperature and one alpha");
  std::vector<double> ts = temperatures, as = alphas;
  std::sort(ts.begin(), ts.end());
  std::sort(as.begin(), as.end());
  std::vector<SweepRow> rows;
  for (double t : ts) {
    for (double a : as) {
      DistillConfig point = cfg;
      point.temperature = t;
      point.alpha = a;
      const CvResult r = distill_student(teacher, ds, point, arch);
      SweepRow row{t, a, r.aggregate, {}};
      for (const auto& f : r.folds) row.folds.push_back(f.validation);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

Json to_json(const FoldReport& r) {
  return {{"fold", r.fold},
          {"train_losses", r.train_losses},
          {"validation", metrics::to_json(r.validation)},
          {"n_train_windows", r.n_train_windows},
          {"n_val_windows", r.n_val_windows}};
}

Json to_json(const CvResult& r) {
  Json folds = Json::array();
  for (const auto& f : r.folds) folds.push_back(to_json(f));
  return {{"kind", r.kind},
          {"folds", folds},
          {"aggregate", metrics::to_json(r.aggregate)},
          {"best_fold", r.best_fold},
          {"checkpoint_metadata", r.checkpoint.metadata}};
}

Json sweep_to_json(const std::vector<SweepRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json folds = Json::array();
    for (std::size_t f = 0; f < r.folds.size(); ++f) {
      folds.push_back({{"fold", f},
                       {"accuracy", r.folds[f].mean_accuracy},
                       {"f1", r.folds[f].macro_f1}});
    }
    out.push_back({{"T", r.temperature},
                   {"alpha", r.alpha},
                   {"accuracy", r.aggregate.mean_accuracy},
                   {"f1", r.aggregate.macro_f1},
                   {"subset_accuracy", r.aggregate.subset_accuracy},
                   {"folds", folds}});
  }
  return out;
}

namespace {
std::string csv_row(double t, double a, const std::string& fold, double acc, double f1) {
  char line[160];
  std::snprintf(line, sizeof(line), "%.17g,%.17g,%s,%.17g,%.17g\n", t, a, fold.c_str(), acc, f1);
  return line;
}
}  // namespace

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "T,alpha,fold,accuracy,f1\n";
  for (const auto& r : rows) {
    for (std::size_t f = 0; f < r.folds.size(); ++f) {
      out += csv_row(r.temperature, r.alpha, std::to_string(f), r.folds[f].mean_accuracy,
                     r.folds[f].macro_f1);
    }
    out += csv_row(r.temperature, r.alpha, "mean", r.aggregate.mean_accuracy, r.aggregate.macro_f1);
  }
  return out;
}

std::string folds_to_csv(const CvResult& result, const DistillConfig& cfg) {
  std::string out = "T,alpha,fold,accuracy,f1\n";
  for (const auto& f : result.folds) {
    out += csv_row(cfg.temperature, cfg.alpha, std::to_string(f.fold), f.validation.mean_accuracy,
                   f.validation.macro_f1);
  }
  out += csv_row(cfg.temperature, cfg.alpha, "mean", result.aggregate.mean_accuracy,
                 result.aggregate.macro_f1);
  return out;
}

}  // namespace evoke::kd
