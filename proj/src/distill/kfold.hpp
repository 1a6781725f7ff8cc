#pragma once

#include <cstdint>
#include <vector>

namespace evoke::kd {

/// Shuffles 0..n-1 with the seed and deals it into k folds whose sizes differ
/// by at most one. Each fold is returned sorted.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n_items, std::size_t k,
                                                  std::uint64_t seed);

}  // namespace evoke::kd
