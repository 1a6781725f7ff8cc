#include "eeg/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "eeg/container.hpp"
#include "eeg/montage.hpp"

namespace evoke::eeg {

namespace fs = std::filesystem;

const std::array<MarkerGroup, kLabelCount>& marker_groups() {
  static const std::array<MarkerGroup, kLabelCount> groups{{
      {0, 1, {"PO3", "O1", "Oz", "O2", "PO4"}},
      {1, 2, {"Fp1", "AF3", "F3", "Fz", "F4", "AF4", "Fp2"}},
      {2, 3, {"FC1", "C3", "Cz", "C4", "FC2", "CP1", "CP2"}},
  }};
  return groups;
}

namespace {

// Integer frequency inside [lo, hi) so 1 s windows stay on-bin.
double pick_frequency(Prng& prng, const Band& band) {
  const auto lo = static_cast<std::uint64_t>(std::ceil(band.lo_hz));
  const auto hi = static_cast<std::uint64_t>(std::ceil(band.hi_hz));  // exclusive
  return static_cast<double>(lo + prng.below(hi - lo));
}

std::string two_digits(std::size_t v, const char* prefix) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02zu", prefix, v);
  return buf;
}

}  // namespace

TrialRecording synth_trial(Prng& prng, const LabelFlags& flags, const SynthOptions& o) {
  const auto& names = geneva_channels();
  const auto& bands = default_bands();
  const double fs = o.sample_rate_hz;
  const auto base_samples = static_cast<std::size_t>(std::llround(o.baseline_secs * fs));
  const auto total = base_samples + static_cast<std::size_t>(std::llround(o.trial_secs * fs));

  // Marker amplitude during the trial segment per channel/band; 0 = not a marker.
  std::array<std::array<double, 4>, kChannelCount> marker{};
  for (const auto& group : marker_groups()) {
    for (auto name : group.channels) {
      for (std::size_t c = 0; c < kChannelCount; ++c) {
        if (names[c] == name) {
          marker[c][group.band] = flags[group.label] ? o.high_amplitude : o.low_amplitude;
        }
      }
    }
  }

  std::array<double, 4> freq{};
  for (std::size_t b = 0; b < bands.size(); ++b) freq[b] = pick_frequency(prng, bands[b]);

  TrialRecording rec;
  rec.sample_rate_hz = fs;
  rec.channels.assign(names.begin(), names.end());
  rec.samples = Tensor<float>({kChannelCount, total});
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    std::array<double, 4> phase{};
    for (auto& p : phase) p = prng.uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t t = 0; t < total; ++t) {
      const double time = static_cast<double>(t) / fs;
      double x = o.noise_std * prng.normal();
      for (std::size_t b = 0; b < bands.size(); ++b) {
        const double amp =
            (t >= base_samples && marker[c][b] > 0.0) ? marker[c][b] : o.background_amplitude;
        x += amp * std::sin(2.0 * std::numbers::pi * freq[b] * time + phase[b]);
      }
      rec.samples[c * total + t] = static_cast<float>(x);
    }
  }

  auto rating = [&](bool high) { return high ? prng.uniform(5.5, 9.0) : prng.uniform(1.0, 4.5); };
  rec.ratings = {rating(flags[0]), rating(flags[1]), rating(flags[2])};
  return rec;
}

DatasetManifest synth_dataset(const SynthOptions& o, const fs::path& out_dir) {
  require(o.n_trials >= 1 && o.n_subjects >= 1, ErrorCode::InvalidArgument,
          "synth needs at least one subject and one trial");
  fs::create_directories(out_dir / "trials");

  DatasetManifest m;
  m.kind = ManifestKind::Raw;
  m.sample_rate_hz = o.sample_rate_hz;
  m.window_secs = 1.0;
  m.baseline_secs = o.baseline_secs;
  m.band_edges.assign(default_bands().begin(), default_bands().end());
  m.channels.assign(geneva_channels().begin(), geneva_channels().end());

  Prng prng(o.seed);
  for (std::size_t s = 0; s < o.n_subjects; ++s) {
    for (std::size_t t = 0; t < o.n_trials; ++t) {
      const LabelFlags flags{prng.below(2) == 1, prng.below(2) == 1, prng.below(2) == 1};
      Prng trial_prng(derive_seed(o.seed, {s, t}));
      TrialRecording rec = synth_trial(trial_prng, flags, o);
      rec.subject_id = two_digits(s + 1, "s");
      rec.trial_id = two_digits(t + 1, "t");

      TrialEntry e;
      e.subject = rec.subject_id;
      e.trial = rec.trial_id;
      e.file = "trials/" + e.subject + "_" + e.trial + ".evkt";
      e.ratings = rec.ratings;
      e.bits = threshold_labels(rec.ratings);
      e.dims = rec.samples.dims();
      write_container(rec.samples, out_dir / e.file);
      m.trials.push_back(std::move(e));
    }
  }
  save_manifest(m, out_dir / kManifestFile);
  return m;
}

}  // namespace evoke::eeg
