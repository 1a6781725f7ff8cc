#include "eeg/dataset.hpp"

#include <cstring>

#include "eeg/container.hpp"
#include "eeg/montage.hpp"

namespace evoke::eeg {

namespace fs = std::filesystem;

TrialRecording load_trial(const DatasetManifest& manifest, const TrialEntry& entry,
                          const fs::path& root) {
  TrialRecording rec;
  rec.subject_id = entry.subject;
  rec.trial_id = entry.trial;
  rec.sample_rate_hz = manifest.sample_rate_hz;
  rec.channels = manifest.channels;
  rec.samples = read_container(root / entry.file);
  rec.ratings = entry.ratings;
  return rec;
}

Dataset stack_grids(const std::vector<FeatureGrid>& grids,
                    const std::vector<std::pair<std::string, std::string>>& ids) {
  require(!grids.empty(), ErrorCode::Validation, "dataset has no trials");
  std::size_t total = 0;
  for (const auto& g : grids) {
    require(g.windows.rank() == 4 && g.windows.dim(1) == 4 && g.windows.dim(2) == kGridSize &&
                g.windows.dim(3) == kGridSize,
            ErrorCode::Shape, "feature grid must be [n,4,9,9], got " + shape_string(g.windows.dims()));
    total += g.windows.dim(0);
  }
  constexpr std::size_t per_window = 4 * kGridSize * kGridSize;
  Dataset ds;
  ds.windows = Tensor<float>({total, 4, kGridSize, kGridSize});
  ds.labels = Tensor<float>({total, kLabelCount});
  std::size_t row = 0;
  for (std::size_t t = 0; t < grids.size(); ++t) {
    const auto& g = grids[t];
    const std::size_t n = g.windows.dim(0);
    std::memcpy(ds.windows.data().data() + row * per_window, g.windows.data().data(),
                n * per_window * sizeof(float));
    for (std::size_t w = 0; w < n; ++w) {
      for (std::size_t k = 0; k < kLabelCount; ++k) {
        ds.labels[(row + w) * kLabelCount + k] = static_cast<float>(g.labels[k]);
      }
      ds.window_trial.push_back(t);
    }
    ds.trials.push_back({ids.at(t).first, ids.at(t).second, g.labels, row, n});
    row += n;
  }
  return ds;
}

Dataset load_dataset(const fs::path& dir_or_manifest, std::optional<FeatureOptions> options) {
  const fs::path file = manifest_path(dir_or_manifest);
  const DatasetManifest m = load_manifest(file);
  const fs::path root = file.parent_path();
  const FeatureOptions opts = options.value_or(FeatureOptions{m.window_secs, m.baseline_secs});
  std::vector<FeatureGrid> grids;
  std::vector<std::pair<std::string, std::string>> ids;
  for (const auto& entry : m.trials) {
    if (m.kind == ManifestKind::Raw) {
      grids.push_back(extract_features(load_trial(m, entry, root), opts));
    } else {
      grids.push_back({read_container(root / entry.file), entry.bits});
    }
    ids.emplace_back(entry.subject, entry.trial);
  }
  return stack_grids(grids, ids);
}

DatasetManifest preprocess_dataset(const fs::path& in, const fs::path& out_dir,
                                   const FeatureOptions& options) {
  const fs::path file = manifest_path(in);
  const DatasetManifest m = load_manifest(file);
  require(m.kind == ManifestKind::Raw, ErrorCode::Validation,
          "preprocess expects a raw manifest, got features");
  const fs::path root = file.parent_path();
  fs::create_directories(out_dir / "features");

  DatasetManifest out = m;
  out.kind = ManifestKind::Features;
  out.window_secs = options.window_secs;
  out.baseline_secs = options.baseline_secs;
  out.band_edges.assign(default_bands().begin(), default_bands().end());
  out.trials.clear();
  for (const auto& entry : m.trials) {
    const FeatureGrid grid = extract_features(load_trial(m, entry, root), options);
    TrialEntry e = entry;
    e.file = "features/" + entry.subject + "_" + entry.trial + ".evkt";
    e.bits = grid.labels;
    e.dims = grid.windows.dims();
    write_container(grid.windows, out_dir / e.file);
    out.trials.push_back(std::move(e));
  }
  save_manifest(out, out_dir / kManifestFile);
  return out;
}

Tensor<float> preprocess_raw_container(const fs::path& in, double sample_rate_hz,
                                       const FeatureOptions& options) {
  TrialRecording rec;
  rec.trial_id = in.stem().string();
  rec.sample_rate_hz = sample_rate_hz;
  rec.channels.assign(geneva_channels().begin(), geneva_channels().end());
  rec.samples = read_container(in);
  return extract_features(rec, options).windows;
}

}  // namespace evoke::eeg
