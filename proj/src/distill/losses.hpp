#pragma once

#include "tensor/ops.hpp"

namespace evoke::kd {

/// Hyperparameters of the distillation objective and its training loop.
struct DistillConfig {
  double temperature = 1.25;
  double alpha = 0.25;
  double lr = 1e-3;
  std::size_t batch_size = 128;
  std::size_t epochs = 100;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
};

/// Throws ErrorCode::Validation for T <= 0, alpha outside [0,1], or zero
/// batch/epochs/folds.
void validate(const DistillConfig& cfg);

/// Elementwise sigmoid(z / T).
template <typename T>
Tensor<T> temperature_sigmoid(const Tensor<T>& logits, double temperature);

/// Soft-target loss: T^2 * BCE-with-logits(v/T, sigmoid(z/T)), batch mean,
/// class sum. The teacher logits are constants.
template <typename T>
Variable<T> soft_target_loss(const Tensor<T>& teacher_logits, const Variable<T>& student_logits,
                             double temperature);

/// Hard loss against binary labels, student probabilities at T = 1.
template <typename T>
Variable<T> hard_loss(const Variable<T>& student_logits, const Tensor<T>& labels);

/// alpha * soft + (1 - alpha) * hard.
template <typename T>
Variable<T> distill_loss(const Tensor<T>& teacher_logits, const Variable<T>& student_logits,
                         const Tensor<T>& labels, const DistillConfig& cfg);

}  // namespace evoke::kd
