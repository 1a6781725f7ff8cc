#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eeg/signal.hpp"
#include "tensor/tensor.hpp"

namespace evoke::eeg {

inline constexpr double kRatingThreshold = 5.0;
inline constexpr std::size_t kLabelCount = 3;  // valence, arousal, dominance

struct Ratings {
  double valence = 5.0;
  double arousal = 5.0;
  double dominance = 5.0;
};

using LabelBits = std::array<std::uint8_t, kLabelCount>;

/// bit = 1 iff rating > 5.0; ratings must lie in [1, 9].
LabelBits threshold_labels(const Ratings& ratings);

struct TrialRecording {
  std::string subject_id;
  std::string trial_id;
  double sample_rate_hz = 128.0;
  std::vector<std::string> channels;
  Tensor<float> samples;  // [channels, time]
  Ratings ratings;
};

struct FeatureOptions {
  double window_secs = 1.0;
  double baseline_secs = 3.0;
};

/// Windows [n_windows, 4, 9, 9] in band order theta, alpha, beta, gamma,
/// plus the thresholded labels.
struct FeatureGrid {
  Tensor<float> windows;
  LabelBits labels{};
};

/// Average reference, 1 s windows, per-band DE, baseline-mean subtraction and
/// scatter onto the electrode grid. Unassigned grid cells stay exactly zero.
FeatureGrid extract_features(const TrialRecording& trial, const FeatureOptions& options = {});

/// Number of post-baseline windows a recording of `samples` yields.
std::size_t trial_window_count(std::size_t samples, double sample_rate_hz,
                               const FeatureOptions& options);

}  // namespace evoke::eeg
