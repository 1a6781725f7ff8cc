#include "bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <thread>

#include "models/checkpoint.hpp"

namespace evoke::bench {

namespace {

using Clock = std::chrono::steady_clock;

Tensor<float> random_batch(std::size_t batch, Prng& prng) {
  Tensor<float> x({batch, 4, 9, 9});
  for (auto& v : x.data()) v = static_cast<float>(prng.normal());
  return x;
}

double percentile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BenchReport base_report(const nn::Model& model, std::size_t batch, std::size_t iterations,
                        std::size_t warmup) {
  require(iterations >= 10, ErrorCode::InvalidArgument, "benchmark needs at least 10 iterations");
  require(warmup >= 1, ErrorCode::InvalidArgument, "benchmark needs at least 1 warmup run");
  require(batch >= 1, ErrorCode::InvalidArgument, "batch size must be positive");
  BenchReport r;
  r.model_tag = model.architecture();
  r.batch_size = batch;
  r.iterations = iterations;
  r.warmup = warmup;
  r.param_count = nn::count_params(model);
  r.flops = nn::count_flops(model, {batch, 4, 9, 9});
  r.checkpoint_bytes = nn::encode_checkpoint(model, Json::object()).size();
  return r;
}

void fill_latency(BenchReport& r, const std::vector<double>& ms) {
  double total = 0.0;
  for (double v : ms) total += v;
  r.mean_ms = total / static_cast<double>(ms.size());
  r.median_ms = percentile(ms, 0.5);
  r.p95_ms = percentile(ms, 0.95);
}

}  // namespace

BenchReport measure(const nn::Model& model, std::size_t batch_size, std::size_t iterations,
                    std::size_t warmup, Prng& prng) {
  BenchReport r = base_report(model, batch_size, iterations, warmup);
  const Tensor<float> x = random_batch(batch_size, prng);
  for (std::size_t i = 0; i < warmup; ++i) (void)model.predict_logits(x);
  std::vector<double> ms;
  ms.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto t0 = Clock::now();
    const Tensor<float> y = model.predict_logits(x);
    const auto t1 = Clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  fill_latency(r, ms);
  r.throughput = static_cast<double>(batch_size) / (r.mean_ms / 1000.0);
  return r;
}

BenchReport measure_parallel(const nn::Model& model, std::size_t batch_size,
                             std::size_t iterations, std::size_t warmup, std::size_t workers,
                             Prng& prng) {
  require(workers >= 1, ErrorCode::InvalidArgument, "workers must be >= 1");
  if (workers == 1) return measure(model, batch_size, iterations, warmup, prng);
  BenchReport r = base_report(model, batch_size, iterations, warmup);
  r.workers = workers;
  const Tensor<float> x = random_batch(batch_size, prng);
  std::vector<std::vector<double>> per(workers);
  const auto start = Clock::now();
  {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t i = 0; i < warmup; ++i) (void)model.predict_logits(x);
        for (std::size_t i = 0; i < iterations; ++i) {
          const auto t0 = Clock::now();
          (void)model.predict_logits(x);
          per[w].push_back(
              std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
        }
      });
    }
  }
  const double wall_s = std::chrono::duration<double>(Clock::now() - start).count();
  std::vector<double> ms;
  for (const auto& v : per) ms.insert(ms.end(), v.begin(), v.end());
  fill_latency(r, ms);
  // The wall clock includes warmup, so this understates steady-state rate.
  r.throughput = static_cast<double>(batch_size * iterations * workers) / wall_s;
  return r;
}

std::vector<RankedEntry> compare(const std::vector<BenchReport>& reports) {
  require(reports.size() >= 2, ErrorCode::InvalidArgument, "compare needs at least two reports");
  const auto largest = std::max_element(
      reports.begin(), reports.end(),
      [](const BenchReport& a, const BenchReport& b) { return a.param_count < b.param_count; });
  std::vector<RankedEntry> out;
  for (const auto& r : reports) {
    RankedEntry e{r, 1.0, 1.0};
    if (r.param_count > 0) {
      e.param_ratio = static_cast<double>(largest->param_count) / static_cast<double>(r.param_count);
    }
    if (r.flops > 0) {
      e.flop_ratio = static_cast<double>(largest->flops) / static_cast<double>(r.flops);
    }
    out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedEntry& a, const RankedEntry& b) {
    return a.report.throughput > b.report.throughput;
  });
  return out;
}

Json to_json(const BenchReport& r) {
  return {{"model", r.model_tag},       {"batch_size", r.batch_size},
          {"iterations", r.iterations}, {"warmup", r.warmup},
          {"workers", r.workers},       {"mean_ms", r.mean_ms},
          {"median_ms", r.median_ms},   {"p95_ms", r.p95_ms},
          {"throughput", r.throughput}, {"param_count", r.param_count},
          {"flops", r.flops},           {"checkpoint_bytes", r.checkpoint_bytes}};
}

BenchReport bench_report_from_json(const Json& j) {
  BenchReport r;
  try {
    r.model_tag = j.at("model").get<std::string>();
    r.batch_size = j.at("batch_size").get<std::size_t>();
    r.iterations = j.at("iterations").get<std::size_t>();
    r.warmup = j.at("warmup").get<std::size_t>();
    r.workers = j.value("workers", std::size_t{1});
    r.mean_ms = j.at("mean_ms").get<double>();
    r.median_ms = j.at("median_ms").get<double>();
    r.p95_ms = j.at("p95_ms").get<double>();
    r.throughput = j.at("throughput").get<double>();
    r.param_count = j.at("param_count").get<std::size_t>();
    r.flops = j.at("flops").get<std::size_t>();
    r.checkpoint_bytes = j.at("checkpoint_bytes").get<std::size_t>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::Format, std::string("bench report: ") + e.what());
  }
  return r;
}

Json to_json(const std::vector<RankedEntry>& ranking) {
  Json out = Json::array();
  for (const auto& e : ranking) {
    Json row = to_json(e.report);
    row["param_ratio"] = e.param_ratio;
    row["flop_ratio"] = e.flop_ratio;
    out.push_back(row);
  }
  return out;
}

std::string format_table(const std::vector<RankedEntry>& ranking) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %12s %14s %12s %12s %14s %10s %10s\n", "model",
                "params", "flops", "weight_kb", "mean_ms", "samples/s", "param_x", "flop_x");
  out += line;
  for (const auto& e : ranking) {
    const auto& r = e.report;
    std::snprintf(line, sizeof(line), "%-10s %12zu %14zu %12.2f %12.4f %14.2f %10.2f %10.2f\n",
                  r.model_tag.c_str(), r.param_count, r.flops,
                  static_cast<double>(r.checkpoint_bytes) / 1024.0, r.mean_ms, r.throughput,
                  e.param_ratio, e.flop_ratio);
    out += line;
  }
  return out;
}

}  // namespace evoke::bench
