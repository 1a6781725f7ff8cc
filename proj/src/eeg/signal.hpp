#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tensor/tensor.hpp"

namespace evoke::eeg {

struct Band {
  std::string name;
  double lo_hz;
  double hi_hz;
};

/// theta 4-8, alpha 8-14, beta 14-31, gamma 31-49 Hz, in feature-plane order.
const std::array<Band, 4>& default_bands();

inline constexpr double kVarianceFloor = 1e-12;

/// Subtracts the cross-channel mean at every time step.
/// samples: [channels, time]; requires at least two channels.
Tensor<double> average_reference(const Tensor<double>& samples);

/// Variance of the band-limited component of `window`, as the periodogram
/// power summed over DFT bins with lo <= f < hi. The DC bin never counts.
double band_variance(std::span<const double> window, const Band& band, double fs);

/// band_variance for several bands sharing one pass over the window.
std::vector<double> band_variances(std::span<const double> window,
                                   std::span<const Band> bands, double fs);

/// Gaussian differential entropy 0.5*ln(2*pi*e*var) in nats. Variances at or
/// below kVarianceFloor are clamped to it and counted.
double differential_entropy(double variance);

/// Number of clamps performed by differential_entropy in this process.
std::uint64_t variance_floor_clamps();

}  // namespace evoke::eeg
