#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eeg/manifest.hpp"

namespace evoke::eeg {

struct TrialInfo {
  std::string subject;
  std::string trial;
  LabelBits bits{};
  std::size_t first_window = 0;
  std::size_t n_windows = 0;
};

/// All feature windows of a manifest, stacked in manifest order.
struct Dataset {
  Tensor<float> windows;  // [N, 4, 9, 9]
  Tensor<float> labels;   // [N, 3], values 0/1
  std::vector<std::size_t> window_trial;
  std::vector<TrialInfo> trials;

  std::size_t size() const { return window_trial.size(); }
};

TrialRecording load_trial(const DatasetManifest& manifest, const TrialEntry& entry,
                          const std::filesystem::path& root);

/// Loads a raw or features manifest. Raw recordings are converted on the fly
/// using the manifest's window and baseline lengths unless overridden.
Dataset load_dataset(const std::filesystem::path& dir_or_manifest,
                     std::optional<FeatureOptions> options = std::nullopt);

/// Builds a dataset from already-extracted grids (one per trial).
Dataset stack_grids(const std::vector<FeatureGrid>& grids,
                    const std::vector<std::pair<std::string, std::string>>& ids);

/// Converts a raw manifest into feature containers plus a "features" manifest
/// under out_dir. Returns the written manifest.
DatasetManifest preprocess_dataset(const std::filesystem::path& in,
                                   const std::filesystem::path& out_dir,
                                   const FeatureOptions& options);

/// Extracts features from a single raw [channels,time] container assumed to
/// hold the 32 Geneva-ordered channels at `sample_rate_hz`.
Tensor<float> preprocess_raw_container(const std::filesystem::path& in, double sample_rate_hz,
                                       const FeatureOptions& options);

}  // namespace evoke::eeg
