#include "eeg/features.hpp"

#include <cmath>
#include <set>

#include "eeg/montage.hpp"

namespace evoke::eeg {

namespace {

std::size_t whole_samples(double secs, double fs, const char* what) {
  const double n = secs * fs;
  const double rounded = std::round(n);
  require(secs >= 0.0 && std::abs(n - rounded) < 1e-9, ErrorCode::Validation,
          std::string(what) + " must span a whole number of samples");
  return static_cast<std::size_t>(rounded);
}

void check_rating(double r, const char* name) {
  require(r >= 1.0 && r <= 9.0, ErrorCode::Validation,
          std::string(name) + " rating " + std::to_string(r) + " outside [1,9]");
}

}  // namespace

LabelBits threshold_labels(const Ratings& ratings) {
  check_rating(ratings.valence, "valence");
  check_rating(ratings.arousal, "arousal");
  check_rating(ratings.dominance, "dominance");
  auto bit = [](double r) -> std::uint8_t { return r > kRatingThreshold ? 1 : 0; };
  return {bit(ratings.valence), bit(ratings.arousal), bit(ratings.dominance)};
}

std::size_t trial_window_count(std::size_t samples, double fs, const FeatureOptions& options) {
  const std::size_t win = whole_samples(options.window_secs, fs, "window");
  const std::size_t base = whole_samples(options.baseline_secs, fs, "baseline");
  require(win > 0, ErrorCode::Validation, "window must be positive");
  if (samples < base) return 0;
  return (samples - base) / win;
}

FeatureGrid extract_features(const TrialRecording& trial, const FeatureOptions& options) {
  const double fs = trial.sample_rate_hz;
  require(fs > 0.0, ErrorCode::Validation, "sample rate must be positive");
  require(trial.samples.rank() == 2, ErrorCode::Shape, "trial samples must be [channels,time]");
  const std::size_t channels = trial.samples.dim(0);
  const std::size_t time = trial.samples.dim(1);
  require(trial.channels.size() == channels, ErrorCode::Validation,
          "trial " + trial.trial_id + ": " + std::to_string(trial.channels.size()) +
              " channel names for " + std::to_string(channels) + " rows");

  std::vector<GridCell> cells;
  std::set<std::string> seen;
  for (const auto& name : trial.channels) {
    require(seen.insert(name).second, ErrorCode::Validation, "duplicate channel " + name);
    cells.push_back(grid_position(name));
  }

  const std::size_t win = whole_samples(options.window_secs, fs, "window");
  const std::size_t base = whole_samples(options.baseline_secs, fs, "baseline");
  const std::size_t base_windows = base / win;
  require(base_windows * win == base, ErrorCode::Validation,
          "baseline must be a whole number of windows");
  const std::size_t n_windows = trial_window_count(time, fs, options);
  require(n_windows >= 1, ErrorCode::Validation,
          "trial " + trial.trial_id + " too short: " + std::to_string(time) +
              " samples for baseline " + std::to_string(base) + " + window " +
              std::to_string(win));

  FeatureGrid grid;
  grid.labels = threshold_labels(trial.ratings);

  const Tensor<double> referenced = average_reference(trial.samples.cast<double>());
  const auto& bands = default_bands();
  const std::size_t n_bands = bands.size();

  auto window_de = [&](std::size_t channel, std::size_t start) {
    const std::span<const double> w(referenced.data().data() + channel * time + start, win);
    std::vector<double> de = band_variances(w, bands, fs);
    for (double& v : de) v = differential_entropy(v);
    return de;
  };

  // Mean baseline DE per channel/band.
  std::vector<double> baseline(channels * n_bands, 0.0);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t b = 0; b < base_windows; ++b) {
      const auto de = window_de(c, b * win);
      for (std::size_t k = 0; k < n_bands; ++k) baseline[c * n_bands + k] += de[k];
    }
  }
  if (base_windows > 0) {
    for (double& v : baseline) v /= static_cast<double>(base_windows);
  }

  grid.windows = Tensor<float>({n_windows, n_bands, kGridSize, kGridSize});
  const std::size_t plane = kGridSize * kGridSize;
  for (std::size_t c = 0; c < channels; ++c) {
    const std::size_t cell = cells[c].row * kGridSize + cells[c].col;
    for (std::size_t w = 0; w < n_windows; ++w) {
      const auto de = window_de(c, base + w * win);
      for (std::size_t k = 0; k < n_bands; ++k) {
        grid.windows[(w * n_bands + k) * plane + cell] =
            static_cast<float>(de[k] - baseline[c * n_bands + k]);
      }
    }
  }
  return grid;
}

}  // namespace evoke::eeg
