#include "eeg/montage.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace evoke::eeg {

namespace {

struct Placement {
  std::string_view name;
  GridCell cell;
};

constexpr std::array<Placement, kChannelCount> kPlacements{{
    {"Fp1", {0, 3}}, {"AF3", {1, 3}}, {"F3", {2, 2}},  {"F7", {2, 0}},
    {"FC5", {3, 1}}, {"FC1", {3, 3}}, {"C3", {4, 2}},  {"T7", {4, 0}},
    {"CP5", {5, 1}}, {"CP1", {5, 3}}, {"P3", {6, 2}},  {"P7", {6, 0}},
    {"PO3", {7, 3}}, {"O1", {8, 3}},  {"Oz", {8, 4}},  {"Pz", {6, 4}},
    {"Fp2", {0, 5}}, {"AF4", {1, 5}}, {"Fz", {2, 4}},  {"F4", {2, 6}},
    {"F8", {2, 8}},  {"FC6", {3, 7}}, {"FC2", {3, 5}}, {"Cz", {4, 4}},
    {"C4", {4, 6}},  {"T8", {4, 8}},  {"CP6", {5, 7}}, {"CP2", {5, 5}},
    {"P4", {6, 6}},  {"P8", {6, 8}},  {"PO4", {7, 5}}, {"O2", {8, 5}},
}};

}  // namespace

const std::array<std::string, kChannelCount>& geneva_channels() {
  static const std::array<std::string, kChannelCount> names = [] {
    std::array<std::string, kChannelCount> out;
    for (std::size_t i = 0; i < kChannelCount; ++i) out[i] = std::string(kPlacements[i].name);
    return out;
  }();
  return names;
}

GridCell grid_position(std::string_view channel) {
  auto it = std::find_if(kPlacements.begin(), kPlacements.end(),
                         [&](const Placement& p) { return p.name == channel; });
  require(it != kPlacements.end(), ErrorCode::Lookup,
          "unknown EEG channel '" + std::string(channel) + "'");
  return it->cell;
}

bool is_known_channel(std::string_view channel) {
  return std::any_of(kPlacements.begin(), kPlacements.end(),
                     [&](const Placement& p) { return p.name == channel; });
}

}  // namespace evoke::eeg
