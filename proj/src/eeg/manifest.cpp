#include "eeg/manifest.hpp"

#include "eeg/container.hpp"

namespace evoke::eeg {

namespace fs = std::filesystem;

namespace {

const char* kind_name(ManifestKind kind) {
  return kind == ManifestKind::Raw ? "raw" : "features";
}

ManifestKind kind_from_name(const std::string& name) {
  if (name == "raw") return ManifestKind::Raw;
  if (name == "features") return ManifestKind::Features;
  fail(ErrorCode::Format, "manifest: unknown kind '" + name + "'");
}

}  // namespace

Json manifest_to_json(const DatasetManifest& m) {
  Json bands = Json::array();
  for (const auto& b : m.band_edges) bands.push_back({{"name", b.name}, {"lo_hz", b.lo_hz}, {"hi_hz", b.hi_hz}});
  Json trials = Json::array();
  for (const auto& t : m.trials) {
    trials.push_back({
        {"file", t.file},
        {"subject", t.subject},
        {"trial", t.trial},
        {"ratings",
         {{"valence", t.ratings.valence},
          {"arousal", t.ratings.arousal},
          {"dominance", t.ratings.dominance}}},
        {"bits", {t.bits[0], t.bits[1], t.bits[2]}},
        {"dims", t.dims},
    });
  }
  return {
      {"version", m.version},
      {"kind", kind_name(m.kind)},
      {"sample_rate_hz", m.sample_rate_hz},
      {"window_secs", m.window_secs},
      {"baseline_secs", m.baseline_secs},
      {"band_edges", bands},
      {"channels", m.channels},
      {"trials", trials},
  };
}

DatasetManifest manifest_from_json(const Json& j) {
  DatasetManifest m;
  try {
    m.version = j.at("version").get<int>();
    require(m.version == kManifestVersion, ErrorCode::Unsupported,
            "manifest: unsupported version " + std::to_string(m.version));
    m.kind = kind_from_name(j.value("kind", std::string("raw")));
    m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    m.window_secs = j.at("window_secs").get<double>();
    m.baseline_secs = j.at("baseline_secs").get<double>();
    if (j.contains("band_edges")) {
      for (const auto& b : j.at("band_edges")) {
        m.band_edges.push_back({b.at("name").get<std::string>(), b.at("lo_hz").get<double>(),
                                b.at("hi_hz").get<double>()});
      }
    }
    if (j.contains("channels")) m.channels = j.at("channels").get<std::vector<std::string>>();
    for (const auto& t : j.at("trials")) {
      TrialEntry e;
      e.file = t.at("file").get<std::string>();
      e.subject = t.at("subject").get<std::string>();
      e.trial = t.at("trial").get<std::string>();
      const auto& r = t.at("ratings");
      e.ratings = {r.at("valence").get<double>(), r.at("arousal").get<double>(),
                   r.at("dominance").get<double>()};
      e.bits = threshold_labels(e.ratings);
      e.dims = t.at("dims").get<Shape>();
      m.trials.push_back(std::move(e));
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::Format, std::string("manifest: ") + e.what());
  }
  require(m.sample_rate_hz > 0.0, ErrorCode::Validation, "manifest: sample rate must be positive");
  if (m.kind == ManifestKind::Raw) {
    require(!m.channels.empty(), ErrorCode::Validation, "manifest: raw data needs channel names");
  }
  return m;
}

fs::path manifest_path(const fs::path& dir_or_file) {
  return fs::is_directory(dir_or_file) ? dir_or_file / kManifestFile : dir_or_file;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  write_json_file(path, manifest_to_json(manifest));
}

DatasetManifest load_manifest(const fs::path& path) {
  const fs::path file = manifest_path(path);
  DatasetManifest m = manifest_from_json(read_json_file(file));
  const fs::path root = file.parent_path();
  for (const auto& t : m.trials) {
    const fs::path p = root / t.file;
    require(fs::exists(p), ErrorCode::Io, "manifest references missing file " + p.string());
    const Shape dims = read_container_dims(p);
    require(dims == t.dims, ErrorCode::Validation,
            "manifest dims " + shape_string(t.dims) + " disagree with " + p.string() + " " +
                shape_string(dims));
    if (m.kind == ManifestKind::Raw) {
      require(dims.size() == 2 && dims[0] == m.channels.size(), ErrorCode::Validation,
              p.string() + ": expected [" + std::to_string(m.channels.size()) + ",time]");
    }
  }
  return m;
}

}  // namespace evoke::eeg
