#include "distill/kfold.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "common/error.hpp"
#include "tensor/prng.hpp"

namespace evoke::kd {

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n_items, std::size_t k,
                                                  std::uint64_t seed) {
  require(k >= 1, ErrorCode::Validation, "kfold_split needs k >= 1");
  require(n_items >= k, ErrorCode::Validation,
          "kfold_split: " + std::to_string(n_items) + " items cannot fill " + std::to_string(k) +
              " folds");
  std::vector<std::size_t> order(n_items);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Prng prng(seed);
  for (std::size_t i = n_items; i > 1; --i) {
    std::swap(order[i - 1], order[prng.below(i)]);
  }
  std::vector<std::vector<std::size_t>> folds(k);
  const std::size_t base = n_items / k;
  const std::size_t extra = n_items % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(folds[f].begin(), folds[f].end());
    pos += len;
  }
  return folds;
}

}  // namespace evoke::kd
