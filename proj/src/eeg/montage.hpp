#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace evoke::eeg {

inline constexpr std::size_t kGridSize = 9;
inline constexpr std::size_t kChannelCount = 32;

struct GridCell {
  std::size_t row;
  std::size_t col;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// The 32 EEG channel names in Geneva order.
const std::array<std::string, kChannelCount>& geneva_channels();

/// Planar 10-20 projection onto the 9x9 grid. Throws ErrorCode::Lookup for
/// names outside the 32-channel set.
GridCell grid_position(std::string_view channel);

bool is_known_channel(std::string_view channel);

}  // namespace evoke::eeg
