#include "eeg/signal.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

namespace evoke::eeg {

namespace {
std::atomic<std::uint64_t> g_floor_clamps{0};
}

const std::array<Band, 4>& default_bands() {
  static const std::array<Band, 4> bands{{
      {"theta", 4.0, 8.0},
      {"alpha", 8.0, 14.0},
      {"beta", 14.0, 31.0},
      {"gamma", 31.0, 49.0},
  }};
  return bands;
}

Tensor<double> average_reference(const Tensor<double>& samples) {
  require(samples.rank() == 2, ErrorCode::Shape, "average_reference expects [channels,time]");
  const std::size_t channels = samples.dim(0);
  const std::size_t time = samples.dim(1);
  require(channels >= 2, ErrorCode::Contract,
          "average_reference needs at least two channels, got " + std::to_string(channels));
  Tensor<double> out(samples.dims());
  for (std::size_t t = 0; t < time; ++t) {
    double mean = 0.0;
    for (std::size_t c = 0; c < channels; ++c) mean += samples[c * time + t];
    mean /= static_cast<double>(channels);
    for (std::size_t c = 0; c < channels; ++c) out[c * time + t] = samples[c * time + t] - mean;
  }
  return out;
}

std::vector<double> band_variances(std::span<const double> window,
                                   std::span<const Band> bands, double fs) {
  const std::size_t n = window.size();
  require(fs > 0.0, ErrorCode::Validation, "sample rate must be positive");
  require(static_cast<double>(n) >= fs, ErrorCode::Validation,
          "band_variance window shorter than one second (" + std::to_string(n) + " samples)");
  const double nyquist = fs / 2.0;
  for (const Band& b : bands) {
    require(b.lo_hz >= 0.0 && b.lo_hz < b.hi_hz && b.hi_hz < nyquist, ErrorCode::Validation,
            "band " + b.name + " [" + std::to_string(b.lo_hz) + "," + std::to_string(b.hi_hz) +
                ") outside (0, Nyquist=" + std::to_string(nyquist) + ")");
  }

  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    cos_table[m] = std::cos(phase);
    sin_table[m] = std::sin(phase);
  }
  const double bin_hz = fs / static_cast<double>(n);
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));

  std::vector<double> out(bands.size(), 0.0);
  for (std::size_t k = 1; 2 * k <= n; ++k) {
    const double f = static_cast<double>(k) * bin_hz;
    bool wanted = false;
    for (const Band& b : bands) wanted = wanted || (f >= b.lo_hz && f < b.hi_hz);
    if (!wanted) continue;
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      re += window[t] * cos_table[idx];
      im -= window[t] * sin_table[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    // Bins k and n-k carry the same power; the Nyquist bin has no mirror.
    const double mirror = (2 * k == n) ? 1.0 : 2.0;
    const double power = mirror * (re * re + im * im) * norm;
    for (std::size_t b = 0; b < bands.size(); ++b) {
      if (f >= bands[b].lo_hz && f < bands[b].hi_hz) out[b] += power;
    }
  }
  return out;
}

double band_variance(std::span<const double> window, const Band& band, double fs) {
  return band_variances(window, std::span<const Band>(&band, 1), fs)[0];
}

double differential_entropy(double variance) {
  if (!(variance > kVarianceFloor)) {
    g_floor_clamps.fetch_add(1, std::memory_order_relaxed);
    variance = kVarianceFloor;
  }
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * variance);
}

std::uint64_t variance_floor_clamps() { return g_floor_clamps.load(std::memory_order_relaxed); }

}  // namespace evoke::eeg
