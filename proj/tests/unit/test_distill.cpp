#include <cmath>
#include <filesystem>
#include <set>

#include "distill/kfold.hpp"
#include "distill/losses.hpp"
#include "distill/training.hpp"
#include "doctest.h"
#include "eeg/synth.hpp"

using namespace evoke;
using namespace evoke::kd;
namespace fs = std::filesystem;
using VarD = Variable<double>;

namespace {

double sp(double x) { return softplus(x); }

// BCE of target q against logit u, one element.
double bce(double u, double q) { return sp(u) - q * u; }

const eeg::Dataset& small_dataset() {
  static const eeg::Dataset ds = [] {
    eeg::SynthOptions o;
    o.n_trials = 24;
    o.seed = 3;
    const fs::path dir = fs::temp_directory_path() / "evoke_unit_train";
    fs::remove_all(dir);
    eeg::synth_dataset(o, dir);
    return eeg::load_dataset(dir);
  }();
  return ds;
}

nn::TeacherConfig tiny_teacher() {
  nn::TeacherConfig c;
  c.conv_channels = {8, 8, 8};
  c.fuse_channels = 4;
  c.fc_hidden = 16;
  return c;
}

DistillConfig quick_config() {
  DistillConfig c;
  c.epochs = 4;
  c.folds = 3;
  c.batch_size = 16;
  c.seed = 9;
  return c;
}

bool same_weights(const nn::Model& a, const nn::Model& b) {
  const auto pa = a.parameters(), pb = b.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (!(pa[i].var.value() == pb[i].var.value())) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("temperature sigmoid") {
  for (double t : {0.5, 1.0, 7.0}) {
    CHECK(temperature_sigmoid(Tensor<double>({1}, {0.0}), t)[0] == 0.5);
  }
  CHECK(temperature_sigmoid(Tensor<double>({1}, {2.0}), 2.0)[0] ==
        doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(std::abs(temperature_sigmoid(Tensor<double>({1}, {37.0}), 1e9)[0] - 0.5) < 1e-8);
}

TEST_CASE("soft target loss oracles") {
  const Tensor<double> z({1, 3}, {0, 0, 0});
  CHECK(soft_target_loss(z, VarD::leaf(Tensor<double>({1, 3}, {0, 0, 0})), 1.0).value()[0] ==
        doctest::Approx(3 * std::log(2.0)).epsilon(1e-12));

  const Tensor<double> z2({1, 3}, {2, 0, -2});
  const std::vector<double> v{1, 0, -1};
  double expect = 0;
  for (int j = 0; j < 3; ++j) {
    const double q = 1 / (1 + std::exp(-z2[j] / 2));
    expect += bce(v[j] / 2, q);
  }
  expect *= 4;
  CHECK(soft_target_loss(z2, VarD::leaf(Tensor<double>({1, 3}, v)), 2.0).value()[0] ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("soft target loss at T=1 is plain BCE against teacher probabilities") {
  Prng prng(1);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor<double> z({4, 3}), v({4, 3});
    for (auto& x : z.data()) x = prng.uniform(-6, 6);
    for (auto& x : v.data()) x = prng.uniform(-6, 6);
    const double soft = soft_target_loss(z, VarD::leaf(v), 1.0).value()[0];
    const double plain = bce_with_logits(VarD::leaf(v), temperature_sigmoid(z, 1.0)).value()[0];
    CHECK(std::abs(soft - plain) < 1e-7);
  }
}

TEST_CASE("hard loss oracles") {
  CHECK(hard_loss(VarD::leaf(Tensor<double>({1, 3})), Tensor<double>({1, 3}, {1, 1, 1})).value()[0] ==
        doctest::Approx(3 * std::log(2.0)));
  CHECK(hard_loss(VarD::leaf(Tensor<double>({1, 3}, {50, -50, 50})), Tensor<double>({1, 3}, {1, 0, 1}))
            .value()[0] < 1e-9);
  CHECK(hard_loss(VarD::leaf(Tensor<double>({1, 3}, {1, -1, 0})), Tensor<double>({1, 3}, {1, 0, 1}))
            .value()[0] == doctest::Approx(2 * sp(-1) + std::log(2.0)).epsilon(1e-12));
  CHECK(2 * sp(-1) + std::log(2.0) == doctest::Approx(1.319671).epsilon(1e-6));
  CHECK_THROWS_AS(hard_loss(VarD::leaf(Tensor<double>({1, 3})), Tensor<double>({1, 3}, {0.5, 0, 1})),
                  Error);
}

TEST_CASE("combined loss identities") {
  Prng prng(2);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor<double> z({3, 3}), v({3, 3}), y({3, 3});
    for (auto& x : z.data()) x = prng.uniform(-5, 5);
    for (auto& x : v.data()) x = prng.uniform(-5, 5);
    for (auto& x : y.data()) x = prng.uniform() < 0.5 ? 0.0 : 1.0;
    DistillConfig cfg;
    cfg.temperature = prng.uniform(0.5, 4);
    const auto l1 = soft_target_loss(z, VarD::leaf(v), cfg.temperature).value()[0];
    const auto l2 = hard_loss(VarD::leaf(v), y).value()[0];
    cfg.alpha = 0.0;
    const double at0 = distill_loss(z, VarD::leaf(v), y, cfg).value()[0];
    cfg.alpha = 1.0;
    const double at1 = distill_loss(z, VarD::leaf(v), y, cfg).value()[0];
    cfg.alpha = 0.5;
    const double mid = distill_loss(z, VarD::leaf(v), y, cfg).value()[0];
    CHECK(at0 == l2);
    CHECK(at1 == l1);
    CHECK(std::abs(mid - 0.5 * (at0 + at1)) < 1e-9);
  }

  DistillConfig cfg;
  cfg.temperature = 1.0;
  cfg.alpha = 0.25;
  const double v = distill_loss(Tensor<double>({1, 3}), VarD::leaf(Tensor<double>({1, 3})),
                                Tensor<double>({1, 3}, {1, 1, 1}), cfg)
                       .value()[0];
  CHECK(v == doctest::Approx(2.079442).epsilon(1e-6));
}

TEST_CASE("config validation") {
  DistillConfig c;
  CHECK_NOTHROW(validate(c));
  c.temperature = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.alpha = 1.5;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.folds = 1;
  CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("kfold split") {
  const auto folds = kfold_split(10, 5, 1);
  REQUIRE(folds.size() == 5);
  std::set<std::size_t> all;
  std::size_t total = 0;
  for (const auto& f : folds) {
    CHECK(f.size() == 2);
    total += f.size();
    all.insert(f.begin(), f.end());
  }
  CHECK(total == 10);
  CHECK(all.size() == 10);
  CHECK(*all.rbegin() == 9);
  CHECK(kfold_split(10, 5, 1) == folds);
  CHECK(kfold_split(10, 5, 2) != folds);

  for (const auto& f : kfold_split(13, 5, 3)) CHECK((f.size() == 2 || f.size() == 3));
  CHECK_THROWS_AS(kfold_split(3, 5, 0), Error);
}

TEST_CASE("cross-validation splits stay at trial level") {
  const auto& ds = small_dataset();
  const auto splits = cross_validation_splits(ds, 3, 4);
  REQUIRE(splits.size() == 3);
  std::size_t val_total = 0;
  for (const auto& s : splits) {
    std::set<std::size_t> train_trials, val_trials;
    for (auto w : s.train_windows) train_trials.insert(ds.window_trial[w]);
    for (auto w : s.val_windows) val_trials.insert(ds.window_trial[w]);
    for (auto t : val_trials) CHECK(train_trials.count(t) == 0);
    CHECK(s.train_windows.size() + s.val_windows.size() == ds.size());
    val_total += s.val_windows.size();
  }
  CHECK(val_total == ds.size());
}

TEST_CASE("teacher training makes progress and is deterministic") {
  const auto& ds = small_dataset();
  const auto cfg = quick_config();
  const CvResult a = train_teacher(ds, cfg, tiny_teacher());
  const CvResult b = train_teacher(ds, cfg, tiny_teacher());
  REQUIRE(a.folds.size() == 3);
  for (const auto& f : a.folds) CHECK(f.train_losses.back() < f.train_losses.front());
  CHECK(to_json(a) == to_json(b));
  CHECK(nn::encode_checkpoint(a.checkpoint.model, a.checkpoint.metadata) ==
        nn::encode_checkpoint(b.checkpoint.model, b.checkpoint.metadata));
  CHECK(a.checkpoint.metadata.at("fold") == a.best_fold);
}

TEST_CASE("evaluate_checkpoint reproduces the recorded fold metrics") {
  const auto& ds = small_dataset();
  const CvResult r = train_teacher(ds, quick_config(), tiny_teacher());
  const auto bytes = nn::encode_checkpoint(r.checkpoint.model, r.checkpoint.metadata);
  const nn::Checkpoint back = nn::decode_checkpoint(bytes);
  const auto again = evaluate_checkpoint(back, ds);
  CHECK(metrics::to_json(again) == metrics::to_json(r.folds[r.best_fold].validation));
}

TEST_CASE("distillation leaves the teacher untouched and alpha=0 equals scratch training") {
  const auto& ds = small_dataset();
  auto cfg = quick_config();
  const CvResult teacher = train_teacher(ds, cfg, tiny_teacher());
  const auto before = nn::encode_checkpoint(teacher.checkpoint.model, Json::object());

  cfg.alpha = 0.0;
  cfg.temperature = 1.0;
  const CvResult kd0 = distill_student(teacher.checkpoint.model, ds, cfg);
  const CvResult scratch = train_student(ds, cfg);
  CHECK(nn::encode_checkpoint(teacher.checkpoint.model, Json::object()) == before);
  CHECK(same_weights(kd0.checkpoint.model, scratch.checkpoint.model));
  for (std::size_t f = 0; f < kd0.folds.size(); ++f) {
    CHECK(kd0.folds[f].train_losses == scratch.folds[f].train_losses);
  }

  cfg.alpha = 0.25;
  cfg.temperature = 1.25;
  const CvResult kd = distill_student(teacher.checkpoint.model, ds, cfg);
  CHECK(kd.kind == "distilled");
  CHECK(nn::encode_checkpoint(teacher.checkpoint.model, Json::object()) == before);
}

TEST_CASE("sweep grid shape and the hard-loss corner") {
  const auto& ds = small_dataset();
  auto cfg = quick_config();
  cfg.epochs = 2;
  const CvResult teacher = train_teacher(ds, cfg, tiny_teacher());
  const auto rows = sweep(teacher.checkpoint.model, ds, {1.5, 1.0}, {0.5, 0.0, 1.0}, cfg);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].temperature == 1.0);
  CHECK(rows[0].alpha == 0.0);
  CHECK(rows[5].temperature == 1.5);
  CHECK(rows[5].alpha == 1.0);

  const CvResult scratch = train_student(ds, cfg);
  CHECK(metrics::to_json(rows[0].aggregate) == metrics::to_json(scratch.aggregate));

  const std::string csv = sweep_to_csv(rows);
  CHECK(csv.rfind("T,alpha,fold,accuracy,f1\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 1 + 6 * (cfg.folds + 1));
  CHECK(sweep_to_json(rows).size() == 6);
}
