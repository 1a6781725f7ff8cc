#include "tensor/init.hpp"

#include <cmath>

namespace evoke {

std::size_t fan_in(const Shape& dims) {
  require(!dims.empty(), ErrorCode::Shape, "fan_in needs at least one extent");
  if (dims.size() == 1) return dims[0];
  return shape_size(Shape(dims.begin() + 1, dims.end()));
}

template <typename T>
Tensor<T> kaiming_init(Prng& prng, const Shape& dims) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in(dims)));
  Tensor<T> out(dims);
  for (auto& x : out.data()) x = static_cast<T>(prng.uniform(-bound, bound));
  return out;
}

template Tensor<float> kaiming_init(Prng&, const Shape&);
template Tensor<double> kaiming_init(Prng&, const Shape&);

}  // namespace evoke
