#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "eeg/features.hpp"
#include "eeg/manifest.hpp"
#include "tensor/prng.hpp"

namespace evoke::eeg {

// Synthetic stand-in for DEAP. Every channel carries white noise plus one
// on-bin sinusoid per band. After the baseline, one band per label is driven
// high or low at a designated electrode group:
//   valence   <- alpha at occipital channels
//   arousal   <- beta at frontal channels
//   dominance <- gamma at central channels
struct SynthOptions {
  std::size_t n_subjects = 1;
  std::size_t n_trials = 40;  // per subject
  std::uint64_t seed = 0;
  double sample_rate_hz = 128.0;
  double baseline_secs = 3.0;
  double trial_secs = 4.0;
  double noise_std = 1.0;
  double background_amplitude = 1.5;
  double high_amplitude = 6.0;
  double low_amplitude = 0.5;
};

struct MarkerGroup {
  std::size_t label;  // 0 valence, 1 arousal, 2 dominance
  std::size_t band;   // index into default_bands()
  std::vector<std::string_view> channels;
};

const std::array<MarkerGroup, kLabelCount>& marker_groups();

using LabelFlags = std::array<bool, kLabelCount>;

/// One recording whose marker bands follow `flags`; ratings fall strictly
/// above (flag set) or below 5.0.
TrialRecording synth_trial(Prng& prng, const LabelFlags& flags, const SynthOptions& options);

/// Writes trial containers and a raw manifest under out_dir.
DatasetManifest synth_dataset(const SynthOptions& options, const std::filesystem::path& out_dir);

}  // namespace evoke::eeg
