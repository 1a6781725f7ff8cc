#pragma once

#include <string>
#include <vector>

#include "common/json_io.hpp"
#include "models/model.hpp"
#include "tensor/prng.hpp"

namespace evoke::bench {

struct BenchReport {
  std::string model_tag;
  std::size_t batch_size = 0;
  std::size_t iterations = 0;
  std::size_t warmup = 0;
  std::size_t workers = 1;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double throughput = 0.0;  // samples per second
  std::size_t param_count = 0;
  std::size_t flops = 0;  // per forward of one batch
  std::size_t checkpoint_bytes = 0;
};

/// Times `iterations` no-grad forwards of a fixed random [batch,4,9,9] batch
/// after `warmup` unrecorded ones. Requires iterations >= 10, warmup >= 1.
BenchReport measure(const nn::Model& model, std::size_t batch_size, std::size_t iterations,
                    std::size_t warmup, Prng& prng);

/// Aggregate throughput with `workers` threads sharing the read-only model.
/// Latency fields describe the per-forward latency seen by the workers.
BenchReport measure_parallel(const nn::Model& model, std::size_t batch_size,
                             std::size_t iterations, std::size_t warmup, std::size_t workers,
                             Prng& prng);

struct RankedEntry {
  BenchReport report;
  double param_ratio = 1.0;  // largest model's params / this model's params
  double flop_ratio = 1.0;
};

/// Sorted by throughput, highest first. Ratios are relative to the model with
/// the most parameters.
std::vector<RankedEntry> compare(const std::vector<BenchReport>& reports);

Json to_json(const BenchReport& r);
BenchReport bench_report_from_json(const Json& j);
Json to_json(const std::vector<RankedEntry>& ranking);
std::string format_table(const std::vector<RankedEntry>& ranking);

}  // namespace evoke::bench
