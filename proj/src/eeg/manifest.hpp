#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "common/json_io.hpp"
#include "eeg/features.hpp"

namespace evoke::eeg {

inline constexpr int kManifestVersion = 1;
inline constexpr const char* kManifestFile = "manifest.json";

/// "raw": each entry is a [channels, time] recording.
/// "features": each entry is a [n_windows, 4, 9, 9] feature grid.
enum class ManifestKind { Raw, Features };

struct TrialEntry {
  std::string file;  // relative to the manifest directory
  std::string subject;
  std::string trial;
  Ratings ratings;
  LabelBits bits{};  // always recomputed from ratings on load
  Shape dims;
};

struct DatasetManifest {
  int version = kManifestVersion;
  ManifestKind kind = ManifestKind::Raw;
  double sample_rate_hz = 128.0;
  double window_secs = 1.0;
  double baseline_secs = 3.0;
  std::vector<Band> band_edges;
  std::vector<std::string> channels;
  std::vector<TrialEntry> trials;
};

Json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const Json& json);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Parses and validates: every referenced file must exist and its container
/// header dims must equal the entry's dims. Accepts a directory (reads its
/// manifest.json) or a manifest file path.
DatasetManifest load_manifest(const std::filesystem::path& path);

std::filesystem::path manifest_path(const std::filesystem::path& dir_or_file);

}  // namespace evoke::eeg
