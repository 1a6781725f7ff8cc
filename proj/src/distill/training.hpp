#pragma once

#include <string>
#include <vector>

#include "distill/losses.hpp"
#include "eeg/dataset.hpp"
#include "eval/metrics.hpp"
#include "models/checkpoint.hpp"

namespace evoke::kd {

struct FoldReport {
  std::size_t fold = 0;
  std::vector<double> train_losses;  // mean loss per epoch
  metrics::MetricReport validation;
  std::size_t n_train_windows = 0;
  std::size_t n_val_windows = 0;
};

/// Cross-validated training outcome. The checkpoint holds the model of the
/// fold with the best validation mean accuracy (earliest fold on ties).
struct CvResult {
  std::string kind;  // "teacher", "student" or "distilled"
  std::vector<FoldReport> folds;
  metrics::MetricReport aggregate;
  std::size_t best_fold = 0;
  nn::Checkpoint checkpoint;
};

Json to_json(const FoldReport& report);
Json to_json(const CvResult& result);  // reports only, no weights

/// Trial-level split: fold f validates on the windows of trials in fold f.
struct FoldSplit {
  std::vector<std::size_t> train_windows;
  std::vector<std::size_t> val_windows;
};
std::vector<FoldSplit> cross_validation_splits(const eeg::Dataset& ds, std::size_t folds,
                                               std::uint64_t seed);

/// Plain BCE-with-logits training of the teacher on every fold.
CvResult train_teacher(const eeg::Dataset& ds, const DistillConfig& cfg,
                       const nn::TeacherConfig& arch = {});

/// Student trained from scratch on the hard loss only.
CvResult train_student(const eeg::Dataset& ds, const DistillConfig& cfg,
                       const nn::StudentConfig& arch = {});

/// Student trained on alpha * soft + (1 - alpha) * hard against a frozen
/// teacher. Uses the same initialisation and batch order as train_student.
CvResult distill_student(const nn::Model& teacher, const eeg::Dataset& ds,
                         const DistillConfig& cfg, const nn::StudentConfig& arch = {});

/// Batched inference over selected windows (all windows when empty).
Tensor<float> predict_logits(const nn::Model& model, const eeg::Dataset& ds,
                             const std::vector<std::size_t>& windows);

metrics::MetricReport evaluate(const nn::Model& model, const eeg::Dataset& ds,
                               const std::vector<std::size_t>& windows);

/// Re-derives the validation split recorded in the checkpoint metadata and
/// evaluates on it; falls back to every window when no split is recorded.
metrics::MetricReport evaluate_checkpoint(const nn::Checkpoint& ck, const eeg::Dataset& ds);

struct SweepRow {
  double temperature = 0.0;
  double alpha = 0.0;
  metrics::MetricReport aggregate;
  std::vector<metrics::MetricReport> folds;
};

/// Runs distill_student per (T, alpha), ordered by T then alpha. Every grid
/// point shares cfg.seed, so points differ only in T and alpha.
std::vector<SweepRow> sweep(const nn::Model& teacher, const eeg::Dataset& ds,
                            const std::vector<double>& temperatures,
                            const std::vector<double>& alphas, const DistillConfig& cfg,
                            const nn::StudentConfig& arch = {});

Json sweep_to_json(const std::vector<SweepRow>& rows);
/// Header "T,alpha,fold,accuracy,f1"; one row per fold plus a "mean" row.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string folds_to_csv(const CvResult& result, const DistillConfig& cfg);

}  // namespace evoke::kd
