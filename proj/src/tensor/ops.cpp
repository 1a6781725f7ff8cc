#include "tensor/ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace evoke {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;
template <typename T>
using ConstMapVec = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>;
template <typename T>
using MapVec = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>;

struct ConvGeometry {
  std::size_t cin, h, w, cout, kh, kw, ho, wo;
  Padding pad;
  std::size_t patch() const { return cin * kh * kw; }
  std::size_t out_plane() const { return ho * wo; }
};

template <typename T>
void im2col(const T* image, const ConvGeometry& g, T* col, std::size_t ld) {
  const std::size_t hw = ld;
  for (std::size_t c = 0; c < g.cin; ++c) {
    const T* plane = image + c * g.h * g.w;
    for (std::size_t i = 0; i < g.kh; ++i) {
      for (std::size_t j = 0; j < g.kw; ++j) {
        T* row = col + ((c * g.kh + i) * g.kw + j) * hw;
        for (std::size_t y = 0; y < g.ho; ++y) {
          const long iy = static_cast<long>(y + i) - static_cast<long>(g.pad.top);
          for (std::size_t x = 0; x < g.wo; ++x) {
            const long ix = static_cast<long>(x + j) - static_cast<long>(g.pad.left);
            const bool inside = iy >= 0 && iy < static_cast<long>(g.h) && ix >= 0 &&
                                ix < static_cast<long>(g.w);
            row[y * g.wo + x] = inside ? plane[iy * g.w + ix] : T{0};
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, const ConvGeometry& g, T* image, std::size_t ld) {
  const std::size_t hw = ld;
  for (std::size_t c = 0; c < g.cin; ++c) {
    T* plane = image + c * g.h * g.w;
    for (std::size_t i = 0; i < g.kh; ++i) {
      for (std::size_t j = 0; j < g.kw; ++j) {
        const T* row = col + ((c * g.kh + i) * g.kw + j) * hw;
        for (std::size_t y = 0; y < g.ho; ++y) {
          const long iy = static_cast<long>(y + i) - static_cast<long>(g.pad.top);
          if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
          for (std::size_t x = 0; x < g.wo; ++x) {
            const long ix = static_cast<long>(x + j) - static_cast<long>(g.pad.left);
            if (ix < 0 || ix >= static_cast<long>(g.w)) continue;
            plane[iy * g.w + ix] += row[y * g.wo + x];
          }
        }
      }
    }
  }
}

// Samples per GEMM. Buffers near 1M elements stay cache resident; much
// larger ones measured slower than per-sample GEMMs.
std::size_t conv_chunk(const ConvGeometry& g, std::size_t n) {
  const std::size_t per_sample = g.patch() * g.out_plane();
  const std::size_t cap = std::max<std::size_t>(1, (std::size_t{1} << 20) / per_sample);
  return std::max<std::size_t>(1, std::min(n, cap));
}

template <typename T>
void require_same_dims(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  require(a.dims() == b.dims(), ErrorCode::Shape,
          std::string(what) + ": dims " + shape_string(a.dims()) + " vs " +
              shape_string(b.dims()));
}

}  // namespace

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Padding same_padding(std::size_t kernel) {
  require(kernel >= 1, ErrorCode::InvalidArgument, "kernel must be >= 1");
  const std::size_t total = kernel - 1;
  const std::size_t before = total / 2;
  return {before, total - before, before, total - before};
}

template <typename T>
Variable<T> conv2d(const Variable<T>& input, const Variable<T>& weight,
                   const Variable<T>& bias, Padding pad) {
  const Tensor<T>& x = input.value();
  const Tensor<T>& w = weight.value();
  require(x.rank() == 4, ErrorCode::Shape, "conv2d input must be [n,cin,h,w], got " +
                                               shape_string(x.dims()));
  require(w.rank() == 4, ErrorCode::Shape, "conv2d weight must be [cout,cin,kh,kw], got " +
                                               shape_string(w.dims()));
  require(x.dim(1) == w.dim(1), ErrorCode::Shape,
          "conv2d channel mismatch: input " + shape_string(x.dims()) + " weight " +
              shape_string(w.dims()));
  require(bias.value().dims() == Shape{w.dim(0)}, ErrorCode::Shape,
          "conv2d bias must be [cout], got " + shape_string(bias.dims()));
  const long ho = static_cast<long>(x.dim(2) + pad.top + pad.bottom) - static_cast<long>(w.dim(2)) + 1;
  const long wo = static_cast<long>(x.dim(3) + pad.left + pad.right) - static_cast<long>(w.dim(3)) + 1;
  require(ho > 0 && wo > 0, ErrorCode::Shape, "conv2d kernel larger than padded input");

  const ConvGeometry g{x.dim(1), x.dim(2), x.dim(3), w.dim(0), w.dim(2), w.dim(3),
                       static_cast<std::size_t>(ho), static_cast<std::size_t>(wo), pad};
  const std::size_t n = x.dim(0);
  const std::size_t in_sample = g.cin * g.h * g.w;
  const std::size_t out_sample = g.cout * g.out_plane();

  Tensor<T> out({n, g.cout, g.ho, g.wo});
  const std::size_t plane = g.out_plane();
  const std::size_t chunk = conv_chunk(g, n);
  std::vector<T> col(g.patch() * chunk * plane);
  std::vector<T> prod(g.cout * chunk * plane);
  ConstMapMat<T> wm(w.data().data(), g.cout, g.patch());
  ConstMapVec<T> bv(bias.value().data().data(), g.cout);
  // Samples are laid side by side as columns so each chunk is one GEMM.
  for (std::size_t s0 = 0; s0 < n; s0 += chunk) {
    const std::size_t m = std::min(chunk, n - s0);
    const std::size_t ld = m * plane;
    for (std::size_t s = 0; s < m; ++s) {
      im2col(x.data().data() + (s0 + s) * in_sample, g, col.data() + s * plane, ld);
    }
    ConstMapMat<T> cm(col.data(), g.patch(), ld);
    MapMat<T> pm(prod.data(), g.cout, ld);
    pm.noalias() = wm * cm;
    pm.colwise() += bv;
    for (std::size_t s = 0; s < m; ++s) {
      T* dst = out.data().data() + (s0 + s) * out_sample;
      for (std::size_t c = 0; c < g.cout; ++c) {
        std::copy_n(prod.data() + c * ld + s * plane, plane, dst + c * plane);
      }
    }
  }

  return make_result<T>(
      "conv2d", std::move(out), {input.node(), weight.node(), bias.node()},
      [g, n, in_sample, out_sample, plane, chunk](Node<T>& self) {
        Node<T>& xn = *self.inputs[0];
        Node<T>& wn = *self.inputs[1];
        Node<T>& bn = *self.inputs[2];
        std::vector<T> col(wn.requires_grad ? g.patch() * chunk * plane : 0);
        std::vector<T> dcol(xn.requires_grad ? g.patch() * chunk * plane : 0);
        std::vector<T> dprod(g.cout * chunk * plane);
        ConstMapMat<T> wm(wn.value.data().data(), g.cout, g.patch());
        for (std::size_t s0 = 0; s0 < n; s0 += chunk) {
          const std::size_t m = std::min(chunk, n - s0);
          const std::size_t ld = m * plane;
          for (std::size_t s = 0; s < m; ++s) {
            const T* src = self.grad.data().data() + (s0 + s) * out_sample;
            for (std::size_t c = 0; c < g.cout; ++c) {
              std::copy_n(src + c * plane, plane, dprod.data() + c * ld + s * plane);
            }
          }
          ConstMapMat<T> dout(dprod.data(), g.cout, ld);
          if (wn.requires_grad) {
            for (std::size_t s = 0; s < m; ++s) {
              im2col(xn.value.data().data() + (s0 + s) * in_sample, g, col.data() + s * plane, ld);
            }
            ConstMapMat<T> cm(col.data(), g.patch(), ld);
            MapMat<T> dw(wn.grad_buffer().data().data(), g.cout, g.patch());
            dw.noalias() += dout * cm.transpose();
          }
          if (bn.requires_grad) {
            // plain loops: Eigen reductions vary with buffer alignment
            T* db = bn.grad_buffer().data().data();
            for (std::size_t c = 0; c < g.cout; ++c) {
              const T* row = dprod.data() + c * ld;
              T acc = 0;
              for (std::size_t j = 0; j < m * plane; ++j) acc += row[j];
              db[c] += acc;
            }
          }
          if (xn.requires_grad) {
            MapMat<T> dc(dcol.data(), g.patch(), ld);
            dc.noalias() = wm.transpose() * dout;
            for (std::size_t s = 0; s < m; ++s) {
              col2im_add(dcol.data() + s * plane, g,
                         xn.grad_buffer().data().data() + (s0 + s) * in_sample, ld);
            }
          }
        }
      });
}

template <typename T>
Variable<T> linear(const Variable<T>& input, const Variable<T>& weight,
                   const Variable<T>& bias) {
  const Tensor<T>& x = input.value();
  const Tensor<T>& w = weight.value();
  require(x.rank() == 2 && w.rank() == 2, ErrorCode::Shape,
          "linear expects [n,f] input and [out,f] weight");
  require(x.dim(1) == w.dim(1), ErrorCode::Shape,
          "linear extent mismatch: input " + shape_string(x.dims()) + " weight " +
              shape_string(w.dims()));
  require(bias.value().dims() == Shape{w.dim(0)}, ErrorCode::Shape,
          "linear bias must be [out], got " + shape_string(bias.dims()));
  const std::size_t n = x.dim(0), f = x.dim(1), o = w.dim(0);
  Tensor<T> out({n, o});
  ConstMapMat<T> xm(x.data().data(), n, f);
  ConstMapMat<T> wm(w.data().data(), o, f);
  MapMat<T> ym(out.data().data(), n, o);
  ym.noalias() = xm * wm.transpose();
  ym.rowwise() += ConstMapVec<T>(bias.value().data().data(), o).transpose();

  return make_result<T>(
      "linear", std::move(out), {input.node(), weight.node(), bias.node()},
      [n, f, o](Node<T>& self) {
        Node<T>& xn = *self.inputs[0];
        Node<T>& wn = *self.inputs[1];
        Node<T>& bn = *self.inputs[2];
        ConstMapMat<T> dy(self.grad.data().data(), n, o);
        if (xn.requires_grad) {
          MapMat<T> dx(xn.grad_buffer().data().data(), n, f);
          dx.noalias() += dy * ConstMapMat<T>(wn.value.data().data(), o, f);
        }
        if (wn.requires_grad) {
          MapMat<T> dw(wn.grad_buffer().data().data(), o, f);
          dw.noalias() += dy.transpose() * ConstMapMat<T>(xn.value.data().data(), n, f);
        }
        if (bn.requires_grad) {
          T* db = bn.grad_buffer().data().data();
          const T* g = self.grad.data().data();
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < o; ++k) db[k] += g[i * o + k];
          }
        }
      });
}

template <typename T>
Variable<T> relu(const Variable<T>& input) {
  Tensor<T> out(input.dims());
  const auto in = input.value().data();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > T{0} ? in[i] : T{0};
  return make_result<T>("relu", std::move(out), {input.node()}, [](Node<T>& self) {
    Node<T>& xn = *self.inputs[0];
    auto& dx = xn.grad_buffer();
    for (std::size_t i = 0; i < dx.size(); ++i) {
      // Subgradient at exactly 0 is 0.
      if (xn.value[i] > T{0}) dx[i] += self.grad[i];
    }
  });
}

template <typename T>
Variable<T> sigmoid(const Variable<T>& input) {
  Tensor<T> out(input.dims());
  const auto in = input.value().data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = static_cast<T>(stable_sigmoid(static_cast<double>(in[i])));
  }
  return make_result<T>("sigmoid", std::move(out), {input.node()}, [](Node<T>& self) {
    auto& dx = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const T s = self.value[i];
      dx[i] += self.grad[i] * s * (T{1} - s);
    }
  });
}

template <typename T>
Variable<T> flatten(const Variable<T>& input) {
  require(input.value().rank() >= 2, ErrorCode::Shape, "flatten expects rank >= 2");
  const std::size_t n = input.dims()[0];
  const std::size_t rest = input.value().size() / n;
  return make_result<T>("flatten", input.value().reshaped({n, rest}), {input.node()},
                        [](Node<T>& self) {
                          auto& dx = self.inputs[0]->grad_buffer();
                          for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += self.grad[i];
                        });
}

template <typename T>
Variable<T> scale(const Variable<T>& input, double factor) {
  const T k = static_cast<T>(factor);
  Tensor<T> out(input.dims());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = input.value()[i] * k;
  return make_result<T>("scale", std::move(out), {input.node()}, [k](Node<T>& self) {
    auto& dx = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += self.grad[i] * k;
  });
}

template <typename T>
Variable<T> add(const Variable<T>& a, const Variable<T>& b) {
  require_same_dims(a.value(), b.value(), "add");
  Tensor<T> out(a.dims());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] + b.value()[i];
  return make_result<T>("add", std::move(out), {a.node(), b.node()}, [](Node<T>& self) {
    for (auto& in : self.inputs) {
      if (!in->requires_grad) continue;
      auto& d = in->grad_buffer();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += self.grad[i];
    }
  });
}

template <typename T>
Variable<T> sum(const Variable<T>& input) {
  double acc = 0.0;
  for (T v : input.value().data()) acc += static_cast<double>(v);
  return make_result<T>("sum", Tensor<T>({1}, static_cast<T>(acc)), {input.node()},
                        [](Node<T>& self) {
                          auto& dx = self.inputs[0]->grad_buffer();
                          for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += self.grad[0];
                        });
}

template <typename T>
Variable<T> bce_with_logits(const Variable<T>& logits, const Tensor<T>& targets) {
  require_same_dims(logits.value(), targets, "bce_with_logits");
  require(logits.value().rank() == 2, ErrorCode::Shape, "bce_with_logits expects [n,c]");
  for (T t : targets.data()) {
    if (!(t >= T{0} && t <= T{1})) {
      fail(ErrorCode::Validation,
           "bce_with_logits target outside [0,1]: " + std::to_string(static_cast<double>(t)));
    }
  }
  const std::size_t n = logits.dims()[0];
  double acc = 0.0;
  const auto z = logits.value().data();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double zi = z[i];
    // -[t log s(z) + (1-t) log(1-s(z))] = softplus(z) - t z
    acc += softplus(zi) - static_cast<double>(targets[i]) * zi;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  return make_result<T>(
      "bce_with_logits", Tensor<T>({1}, static_cast<T>(acc * inv_n)), {logits.node()},
      [targets, inv_n](Node<T>& self) {
        Node<T>& zn = *self.inputs[0];
        auto& dz = zn.grad_buffer();
        const double g = static_cast<double>(self.grad[0]) * inv_n;
        for (std::size_t i = 0; i < dz.size(); ++i) {
          const double p = stable_sigmoid(static_cast<double>(zn.value[i]));
          dz[i] += static_cast<T>(g * (p - static_cast<double>(targets[i])));
        }
      });
}

#define EVOKE_INSTANTIATE_OPS(T)                                                        \
  template Variable<T> conv2d(const Variable<T>&, const Variable<T>&,                   \
                              const Variable<T>&, Padding);                             \
  template Variable<T> linear(const Variable<T>&, const Variable<T>&,                   \
                              const Variable<T>&);                                      \
  template Variable<T> relu(const Variable<T>&);                                        \
  template Variable<T> sigmoid(const Variable<T>&);                                     \
  template Variable<T> flatten(const Variable<T>&);                                     \
  template Variable<T> scale(const Variable<T>&, double);                               \
  template Variable<T> add(const Variable<T>&, const Variable<T>&);                     \
  template Variable<T> sum(const Variable<T>&);                                         \
  template Variable<T> bce_with_logits(const Variable<T>&, const Tensor<T>&);

EVOKE_INSTANTIATE_OPS(float)
EVOKE_INSTANTIATE_OPS(double)

#undef EVOKE_INSTANTIATE_OPS

}  // namespace evoke
