#include <algorithm>
#include <numeric>

#include "bench/bench.hpp"
#include "doctest.h"
#include "eval/metrics.hpp"

using namespace evoke;
using namespace evoke::metrics;

namespace {

Tensor<std::uint8_t> bits(std::vector<std::uint8_t> v) {
  const std::size_t n = v.size() / 3;
  return Tensor<std::uint8_t>({n, 3}, std::move(v));
}

}  // namespace

TEST_CASE("hand-enumerated four-sample example") {
  const auto truth = bits({1, 0, 0, 1, 1, 0, 0, 0, 1, 0, 1, 1});
  const auto pred = bits({1, 0, 0, 1, 0, 0, 0, 0, 1, 1, 1, 1});
  const MetricReport r = multilabel_metrics(pred, truth);
  CHECK(r.per_label[0].accuracy == doctest::Approx(0.75));
  CHECK(r.per_label[1].accuracy == doctest::Approx(0.75));
  CHECK(r.per_label[2].accuracy == doctest::Approx(1.0));
  CHECK(r.per_label[0].f1 == doctest::Approx(0.8));
  CHECK(r.per_label[1].f1 == doctest::Approx(2.0 / 3.0));
  CHECK(r.per_label[2].f1 == doctest::Approx(1.0));
  CHECK(std::abs(r.mean_accuracy - 0.8333) < 1e-4);
  CHECK(std::abs(r.subset_accuracy - 0.5) < 1e-4);
  CHECK(std::abs(r.macro_f1 - 0.8222) < 1e-4);
  CHECK(r.n_samples == 4);
}

TEST_CASE("perfect, inverted and empty-label conventions") {
  const auto truth = bits({1, 0, 1, 0, 1, 0});
  auto inverted = truth;
  for (auto& b : inverted.data()) b = 1 - b;
  const auto perfect = multilabel_metrics(truth, truth);
  CHECK(perfect.mean_accuracy == 1.0);
  CHECK(perfect.macro_f1 == 1.0);
  CHECK(perfect.subset_accuracy == 1.0);
  const auto worst = multilabel_metrics(inverted, truth);
  CHECK(worst.mean_accuracy == 0.0);
  CHECK(worst.macro_f1 == 0.0);

  // label absent and never predicted scores F1 = 1; only FP scores 0
  const auto none = bits({0, 0, 0, 0, 0, 0});
  CHECK(multilabel_metrics(none, none).macro_f1 == 1.0);
  CHECK(multilabel_metrics(bits({1, 0, 0, 0, 0, 0}), none).per_label[0].f1 == 0.0);
  CHECK_THROWS_AS(multilabel_metrics(bits({1, 0, 0}), none), Error);
}

TEST_CASE("binarization boundary") {
  const auto b = binarize_predictions(Tensor<float>({2, 3}, {0.5f, 0.9f, 0.1f, 0.4999f, 0.0f, 1.0f}));
  CHECK(b == bits({1, 1, 0, 0, 0, 1}));
  Prng prng(1);
  Tensor<float> logits({50, 3}), probs({50, 3});
  for (std::size_t i = 0; i < logits.size(); ++i) {
    logits[i] = static_cast<float>(prng.normal() * 3);
    probs[i] = static_cast<float>(stable_sigmoid(logits[i]));
  }
  logits[0] = 0.0f;
  probs[0] = 0.5f;
  CHECK(binarize_logits(logits) == binarize_predictions(probs));
}

TEST_CASE("metric invariants over random predictions") {
  Prng prng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + prng.below(20);
    Tensor<std::uint8_t> p({n, 3}), t({n, 3});
    for (auto& v : p.data()) v = prng.below(2);
    for (auto& v : t.data()) v = prng.below(2);
    const auto r = multilabel_metrics(p, t);
    double min_acc = 1.0;
    for (const auto& l : r.per_label) {
      CHECK(l.accuracy >= 0.0);
      CHECK(l.accuracy <= 1.0);
      CHECK(l.f1 >= 0.0);
      CHECK(l.f1 <= 1.0);
      min_acc = std::min(min_acc, l.accuracy);
    }
    CHECK(r.subset_accuracy <= min_acc + 1e-12);
    CHECK(r.subset_accuracy <= r.mean_accuracy + 1e-12);
    CHECK(multilabel_metrics(t, p).mean_accuracy == doctest::Approx(r.mean_accuracy));

    // permuting rows changes nothing
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[prng.below(i)]);
    Tensor<std::uint8_t> pp({n, 3}), tp({n, 3});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        pp[i * 3 + k] = p[perm[i] * 3 + k];
        tp[i * 3 + k] = t[perm[i] * 3 + k];
      }
    }
    CHECK(to_json(multilabel_metrics(pp, tp)) == to_json(r));
  }
}

TEST_CASE("fold aggregation") {
  MetricReport a, b;
  a.mean_accuracy = 0.8;
  b.mean_accuracy = 0.9;
  a.n_samples = 10;
  b.n_samples = 12;
  a.per_label[1].f1 = 0.2;
  b.per_label[1].f1 = 0.4;
  const auto m = aggregate_folds({a, b});
  CHECK(m.mean_accuracy == doctest::Approx(0.85));
  CHECK(m.per_label[1].f1 == doctest::Approx(0.3));
  CHECK(m.n_samples == 22);
  CHECK(to_json(aggregate_folds({a, a, a})) == to_json(MetricReport{a.per_label, a.mean_accuracy, a.macro_f1, a.subset_accuracy, 30}));
  CHECK_THROWS_AS(aggregate_folds({}), Error);

  std::vector<MetricReport> five(5);
  double manual = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    five[i].macro_f1 = 0.1 * static_cast<double>(i + 3);
    manual += five[i].macro_f1;
  }
  CHECK(aggregate_folds(five).macro_f1 == doctest::Approx(manual / 5));
}

TEST_CASE("metric report JSON and table") {
  const auto r = multilabel_metrics(bits({1, 0, 1, 0, 1, 1}), bits({1, 1, 1, 0, 1, 0}));
  CHECK(to_json(metric_report_from_json(to_json(r))) == to_json(r));
  const std::string table = format_table(r);
  CHECK(table.find("valence") != std::string::npos);
  CHECK(table.find("subset") != std::string::npos);
}

TEST_CASE("benchmark contracts") {
  Prng prng(3);
  const nn::Model s = nn::build_student({}, prng);
  Prng bp(4);
  const bench::BenchReport r = bench::measure(s, 16, 10, 1, bp);
  CHECK(r.mean_ms > 0);
  CHECK(r.median_ms > 0);
  CHECK(r.p95_ms >= r.median_ms);
  CHECK(std::abs(r.throughput - 16.0 / (r.mean_ms / 1000.0)) / r.throughput < 0.01);
  CHECK(r.param_count == 341555);
  CHECK(r.flops == nn::count_flops(s, {16, 4, 9, 9}));
  CHECK_THROWS_AS(bench::measure(s, 16, 5, 1, bp), Error);
  CHECK_THROWS_AS(bench::measure(s, 16, 10, 0, bp), Error);

  const auto j = bench::to_json(r);
  CHECK(bench::to_json(bench::bench_report_from_json(j)) == j);

  const auto par = bench::measure_parallel(s, 16, 10, 1, 2, bp);
  CHECK(par.workers == 2);
  CHECK(par.throughput > 0);
}

TEST_CASE("benchmark comparison ordering and ratios") {
  bench::BenchReport big, small;
  big.model_tag = "teacher";
  big.throughput = 100;
  big.param_count = 5988867;
  big.flops = 4000;
  small.model_tag = "student";
  small.throughput = 900;
  small.param_count = 341555;
  small.flops = 100;
  const auto ranked = bench::compare({big, small});
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].report.model_tag == "student");
  CHECK(ranked[0].param_ratio == doctest::Approx(5988867.0 / 341555.0));
  CHECK(ranked[0].param_ratio == doctest::Approx(17.53).epsilon(0.01));
  CHECK(ranked[1].param_ratio == 1.0);
  CHECK(ranked[0].flop_ratio == doctest::Approx(40.0));
  const auto same = bench::compare({big, big});
  CHECK(same[0].param_ratio == 1.0);
  CHECK(same[1].flop_ratio == 1.0);
  CHECK(bench::format_table(ranked).find("student") != std::string::npos);
}
