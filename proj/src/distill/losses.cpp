#include "distill/losses.hpp"

namespace evoke::kd {

void validate(const DistillConfig& cfg) {
  require(cfg.temperature > 0.0, ErrorCode::Validation,
          "temperature must be > 0, got " + std::to_string(cfg.temperature));
  require(cfg.alpha >= 0.0 && cfg.alpha <= 1.0, ErrorCode::Validation,
          "alpha must lie in [0,1], got " + std::to_string(cfg.alpha));
  require(cfg.lr > 0.0, ErrorCode::Validation, "learning rate must be > 0");
  require(cfg.batch_size > 0 && cfg.epochs > 0, ErrorCode::Validation,
          "batch size and epochs must be positive");
  require(cfg.folds >= 2, ErrorCode::Validation, "cross-validation needs at least 2 folds");
}

template <typename T>
Tensor<T> temperature_sigmoid(const Tensor<T>& logits, double temperature) {
  require(temperature > 0.0, ErrorCode::Validation,
          "temperature must be > 0, got " + std::to_string(temperature));
  Tensor<T> out(logits.dims());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<T>(stable_sigmoid(static_cast<double>(logits[i]) / temperature));
  }
  return out;
}

template <typename T>
Variable<T> soft_target_loss(const Tensor<T>& teacher_logits, const Variable<T>& student_logits,
                             double temperature) {
  require(teacher_logits.dims() == student_logits.dims(), ErrorCode::Shape,
          "soft_target_loss: teacher " + shape_string(teacher_logits.dims()) + " vs student " +
              shape_string(student_logits.dims()));
  const Tensor<T> q = temperature_sigmoid(teacher_logits, temperature);
  const Variable<T> scaled = temperature == 1.0 ? student_logits
                                                : scale(student_logits, 1.0 / temperature);
  const Variable<T> bce = bce_with_logits(scaled, q);
  return temperature == 1.0 ? bce : scale(bce, temperature * temperature);
}

template <typename T>
Variable<T> hard_loss(const Variable<T>& student_logits, const Tensor<T>& labels) {
  for (T y : labels.data()) {
    if (y != T{0} && y != T{1}) {
      fail(ErrorCode::Validation,
           "hard_loss labels must be 0 or 1, got " + std::to_string(static_cast<double>(y)));
    }
  }
  return bce_with_logits(student_logits, labels);
}

template <typename T>
Variable<T> distill_loss(const Tensor<T>& teacher_logits, const Variable<T>& student_logits,
                         const Tensor<T>& labels, const DistillConfig& cfg) {
  require(cfg.alpha >= 0.0 && cfg.alpha <= 1.0, ErrorCode::Validation,
          "alpha must lie in [0,1]");
  const Variable<T> soft = soft_target_loss(teacher_logits, student_logits, cfg.temperature);
  const Variable<T> hard = hard_loss(student_logits, labels);
  return add(scale(soft, cfg.alpha), scale(hard, 1.0 - cfg.alpha));
}

#define EVOKE_INSTANTIATE_LOSSES(T)                                                        \
  template Tensor<T> temperature_sigmoid(const Tensor<T>&, double);                        \
  template Variable<T> soft_target_loss(const Tensor<T>&, const Variable<T>&, double);     \
  template Variable<T> hard_loss(const Variable<T>&, const Tensor<T>&);                    \
  template Variable<T> distill_loss(const Tensor<T>&, const Variable<T>&, const Tensor<T>&, \
                                    const DistillConfig&);

EVOKE_INSTANTIATE_LOSSES(float)
EVOKE_INSTANTIATE_LOSSES(double)

#undef EVOKE_INSTANTIATE_LOSSES

}  // namespace evoke::kd
