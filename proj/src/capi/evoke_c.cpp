#include "evoke/evoke.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>

#include "bench/bench.hpp"
#include "common/error.hpp"
#include "distill/training.hpp"
#include "eeg/container.hpp"
#include "eeg/dataset.hpp"
#include "eeg/synth.hpp"
#include "mapping/emotion.hpp"
#include "models/checkpoint.hpp"
#include "service/server.hpp"

using namespace evoke;

struct evoke_model {
  nn::Checkpoint ck;
};

struct evoke_mapper {
  mapping::EmotionTable table;
  mapping::AvatarManifest manifest;
};

struct evoke_server {
  std::unique_ptr<service::Server> server;
};

namespace {

thread_local std::string g_last_error;

evoke_status set_error(evoke_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into a status plus last-error message.
template <typename Fn>
evoke_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    fn();
    return EVOKE_OK;
  } catch (const Error& e) {
    return set_error(static_cast<evoke_status>(e.code()), e.what());
  } catch (const Json::exception& e) {
    return set_error(EVOKE_ERR_FORMAT, std::string("json: ") + e.what());
  } catch (const std::bad_alloc&) {
    return set_error(EVOKE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(EVOKE_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(EVOKE_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

void emit(char** out, const Json& j) { emit(out, j.dump(2)); }

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

kd::DistillConfig to_config(const evoke_train_options* o) {
  need(o, "options");
  kd::DistillConfig cfg;
  cfg.temperature = o->temperature;
  cfg.alpha = o->alpha;
  cfg.lr = o->learning_rate;
  cfg.batch_size = o->batch_size;
  cfg.epochs = o->epochs;
  cfg.folds = o->folds;
  cfg.seed = o->seed;
  kd::validate(cfg);
  return cfg;
}

Json train_report(const kd::CvResult& r, const kd::DistillConfig& cfg, const char* ckpt) {
  Json out = kd::to_json(r);
  out["checkpoint"] = ckpt;
  out["config"] = {{"temperature", cfg.temperature}, {"alpha", cfg.alpha},
                   {"lr", cfg.lr},                   {"batch_size", cfg.batch_size},
                   {"epochs", cfg.epochs},           {"folds", cfg.folds},
                   {"seed", cfg.seed}};
  return out;
}

}  // namespace

extern "C" {

const char* evoke_version(void) { return "1.0.0"; }

const char* evoke_last_error(void) { return g_last_error.c_str(); }

const char* evoke_status_name(evoke_status status) {
  if (status == EVOKE_OK) return "ok";
  return error_code_name(static_cast<ErrorCode>(status));
}

void evoke_string_free(char* s) { std::free(s); }

evoke_status evoke_model_load(const char* path, const char* expected_architecture,
                              evoke_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    std::optional<std::string> arch;
    if (expected_architecture) arch = expected_architecture;
    auto m = std::make_unique<evoke_model>(evoke_model{nn::load_checkpoint(path, arch)});
    *out = m.release();
  });
}

evoke_status evoke_model_create(const char* architecture, const char* config_json, uint64_t seed,
                                evoke_model** out) {
  return guarded([&] {
    need(architecture, "architecture");
    need(out, "out");
    const Json config = config_json ? Json::parse(config_json) : Json::object();
    Prng prng(seed);
    auto m = std::make_unique<evoke_model>(
        evoke_model{nn::Checkpoint{nn::build_model(architecture, config, prng), Json::object()}});
    *out = m.release();
  });
}

evoke_status evoke_model_save(const evoke_model* model, const char* path,
                              const char* metadata_json) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    const Json meta = metadata_json ? Json::parse(metadata_json) : model->ck.metadata;
    nn::save_checkpoint(model->ck.model, meta, path);
  });
}

void evoke_model_free(evoke_model* model) { delete model; }

evoke_status evoke_model_info_json(const evoke_model* model, char** out_json) {
  return guarded([&] {
    need(model, "model");
    const nn::Model& m = model->ck.model;
    const Shape input{1, 4, 9, 9};
    Json shapes = Json::array();
    for (const auto& s : m.shape_ladder(input)) shapes.push_back(s);
    Json layers = Json::array();
    for (const auto& l : m.layers()) layers.push_back(nn::layer_kind_name(l.kind));
    emit(out_json, Json{{"architecture", m.architecture()},
                        {"config", m.config()},
                        {"params", nn::count_params(m)},
                        {"flops_per_sample", nn::count_flops(m, input)},
                        {"layers", layers},
                        {"layer_count", m.layer_count()},
                        {"shapes", shapes},
                        {"metadata", model->ck.metadata}});
  });
}

evoke_status evoke_model_forward(const evoke_model* model, const float* input, size_t batch,
                                 float* logits) {
  return guarded([&] {
    need(model, "model");
    need(input, "input");
    need(logits, "logits");
    require(batch > 0, ErrorCode::Shape, "batch must be positive");
    Tensor<float> x({batch, 4, 9, 9});
    std::memcpy(x.data().data(), input, x.size() * sizeof(float));
    const Tensor<float> y = model->ck.model.predict_logits(x);
    std::memcpy(logits, y.data().data(), y.size() * sizeof(float));
  });
}

evoke_status evoke_mapper_create(const char* table_path, const char* manifest_path,
                                 evoke_mapper** out) {
  return guarded([&] {
    need(out, "out");
    auto table = table_path ? mapping::EmotionTable::load(table_path)
                            : mapping::EmotionTable::defaults();
    auto manifest = manifest_path ? mapping::AvatarManifest::load(manifest_path, table)
                                  : mapping::AvatarManifest::defaults(table);
    *out = new evoke_mapper{std::move(table), std::move(manifest)};
  });
}

void evoke_mapper_free(evoke_mapper* mapper) { delete mapper; }

evoke_status evoke_mapper_lookup(const evoke_mapper* mapper, int valence, int arousal,
                                 int dominance, char** out_json) {
  return guarded([&] {
    need(mapper, "mapper");
    for (int b : {valence, arousal, dominance}) {
      require(b == 0 || b == 1, ErrorCode::Validation, "VAD bits must be 0 or 1");
    }
    const mapping::VadBits bits{static_cast<std::uint8_t>(valence),
                                static_cast<std::uint8_t>(arousal),
                                static_cast<std::uint8_t>(dominance)};
    const std::string emotion = mapping::bits_to_emotion(bits, mapper->table);
    emit(out_json, Json{{"bits", {valence, arousal, dominance}},
                        {"emotion", emotion},
                        {"avatar", mapping::emotion_to_avatar(emotion, mapper->manifest)}});
  });
}

evoke_status evoke_mapper_names(const evoke_mapper* mapper, int valence, int arousal,
                                int dominance, char** out_emotion, char** out_avatar) {
  return guarded([&] {
    need(mapper, "mapper");
    for (int b : {valence, arousal, dominance}) {
      require(b == 0 || b == 1, ErrorCode::Validation, "VAD bits must be 0 or 1");
    }
    const mapping::VadBits bits{static_cast<std::uint8_t>(valence),
                                static_cast<std::uint8_t>(arousal),
                                static_cast<std::uint8_t>(dominance)};
    const std::string emotion = mapping::bits_to_emotion(bits, mapper->table);
    const std::string avatar = mapping::emotion_to_avatar(emotion, mapper->manifest);
    emit(out_emotion, emotion);
    emit(out_avatar, avatar);
  });
}

evoke_status evoke_classify_window(const evoke_model* model, const evoke_mapper* mapper,
                                   const float* window, char** out_json) {
  return guarded([&] {
    need(model, "model");
    need(mapper, "mapper");
    need(window, "window");
    Tensor<float> x({4, 9, 9});
    std::memcpy(x.data().data(), window, x.size() * sizeof(float));
    const auto r = mapping::classify_window(model->ck.model, x, mapper->table, mapper->manifest);
    emit(out_json, mapping::to_json(r));
  });
}

void evoke_train_options_default(evoke_train_options* options) {
  if (!options) return;
  const kd::DistillConfig d;
  options->temperature = d.temperature;
  options->alpha = d.alpha;
  options->learning_rate = d.lr;
  options->batch_size = d.batch_size;
  options->epochs = d.epochs;
  options->folds = d.folds;
  options->seed = d.seed;
}

evoke_status evoke_synth(const char* out_dir, size_t n_subjects, size_t n_trials, uint64_t seed,
                         double trial_secs, char** out_json) {
  return guarded([&] {
    need(out_dir, "out_dir");
    eeg::SynthOptions o;
    o.n_subjects = n_subjects;
    o.n_trials = n_trials;
    o.seed = seed;
    if (trial_secs > 0) o.trial_secs = trial_secs;
    const auto m = eeg::synth_dataset(o, out_dir);
    emit(out_json, Json{{"manifest", eeg::manifest_path(out_dir).string()},
                        {"kind", "raw"},
                        {"subjects", n_subjects},
                        {"trials", m.trials.size()},
                        {"sample_rate_hz", m.sample_rate_hz},
                        {"trial_secs", o.trial_secs},
                        {"seed", seed}});
  });
}

evoke_status evoke_preprocess(const char* in, const char* out_dir, double window_secs,
                              double baseline_secs, char** out_json) {
  return guarded([&] {
    need(in, "in");
    need(out_dir, "out_dir");
    const eeg::FeatureOptions opts{window_secs, baseline_secs};
    const std::filesystem::path src(in);
    const bool is_manifest =
        std::filesystem::is_directory(src) || src.extension() == ".json";
    if (is_manifest) {
      const auto m = eeg::preprocess_dataset(src, out_dir, opts);
      std::size_t windows = 0;
      for (const auto& t : m.trials) windows += t.dims.empty() ? 0 : t.dims[0];
      emit(out_json, Json{{"manifest", eeg::manifest_path(out_dir).string()},
                          {"kind", "features"},
                          {"trials", m.trials.size()},
                          {"windows", windows}});
    } else {
      // A lone raw container: assumed 128 Hz Geneva-ordered channels.
      const Tensor<float> grid = eeg::preprocess_raw_container(src, 128.0, opts);
      std::filesystem::create_directories(out_dir);
      const auto dst = std::filesystem::path(out_dir) / (src.stem().string() + ".features.evkt");
      eeg::write_container(grid, dst);
      emit(out_json, Json{{"container", dst.string()}, {"kind", "features"},
                          {"windows", grid.dims()[0]}});
    }
  });
}

evoke_status evoke_train_teacher(const char* data, const char* out_ckpt,
                                 const evoke_train_options* options, char** out_json) {
  return guarded([&] {
    need(data, "data");
    need(out_ckpt, "out_ckpt");
    const auto cfg = to_config(options);
    const auto ds = eeg::load_dataset(data);
    const auto r = kd::train_teacher(ds, cfg);
    nn::save_checkpoint(r.checkpoint.model, r.checkpoint.metadata, out_ckpt);
    emit(out_json, train_report(r, cfg, out_ckpt));
  });
}

evoke_status evoke_train_student(const char* data, const char* out_ckpt,
                                 const evoke_train_options* options, char** out_json) {
  return guarded([&] {
    need(data, "data");
    need(out_ckpt, "out_ckpt");
    const auto cfg = to_config(options);
    const auto ds = eeg::load_dataset(data);
    const auto r = kd::train_student(ds, cfg);
    nn::save_checkpoint(r.checkpoint.model, r.checkpoint.metadata, out_ckpt);
    emit(out_json, train_report(r, cfg, out_ckpt));
  });
}

evoke_status evoke_distill(const char* teacher_ckpt, const char* data, const char* out_ckpt,
                           const evoke_train_options* options, char** out_json) {
  return guarded([&] {
    need(teacher_ckpt, "teacher_ckpt");
    need(data, "data");
    need(out_ckpt, "out_ckpt");
    const auto cfg = to_config(options);
    const auto teacher = nn::load_checkpoint(teacher_ckpt, "teacher");
    const auto ds = eeg::load_dataset(data);
    const auto r = kd::distill_student(teacher.model, ds, cfg);
    nn::save_checkpoint(r.checkpoint.model, r.checkpoint.metadata, out_ckpt);
    Json report = train_report(r, cfg, out_ckpt);
    report["teacher"] = teacher_ckpt;
    emit(out_json, report);
  });
}

evoke_status evoke_sweep(const char* teacher_ckpt, const char* data, const double* temperatures,
                         size_t n_temperatures, const double* alphas, size_t n_alphas,
                         const evoke_train_options* options, char** out_json, char** out_csv) {
  return guarded([&] {
    need(teacher_ckpt, "teacher_ckpt");
    need(data, "data");
    require(temperatures && n_temperatures > 0 && alphas && n_alphas > 0,
            ErrorCode::InvalidArgument, "sweep needs at least one temperature and one alpha");
    const auto cfg = to_config(options);
    const auto teacher = nn::load_checkpoint(teacher_ckpt, "teacher");
    const auto ds = eeg::load_dataset(data);
    const auto rows = kd::sweep(teacher.model, ds, {temperatures, temperatures + n_temperatures},
                                {alphas, alphas + n_alphas}, cfg);
    emit(out_json, kd::sweep_to_json(rows));
    emit(out_csv, kd::sweep_to_csv(rows));
  });
}

evoke_status evoke_eval(const char* ckpt, const char* data, char** out_json) {
  return guarded([&] {
    need(ckpt, "ckpt");
    need(data, "data");
    const auto ck = nn::load_checkpoint(ckpt);
    const auto ds = eeg::load_dataset(data);
    const auto report = kd::evaluate_checkpoint(ck, ds);
    emit(out_json, Json{{"checkpoint", ckpt},
                        {"architecture", ck.model.architecture()},
                        {"metadata", ck.metadata},
                        {"validation", metrics::to_json(report)}});
  });
}

evoke_status evoke_format_metrics(const char* report_json, char** out_table) {
  return guarded([&] {
    need(report_json, "report_json");
    const Json j = Json::parse(report_json);
    // Accepts a bare MetricReport or any report carrying one.
    const Json* m = &j;
    if (j.contains("aggregate")) m = &j.at("aggregate");
    else if (j.contains("validation")) m = &j.at("validation");
    emit(out_table, metrics::format_table(metrics::metric_report_from_json(*m)));
  });
}

evoke_status evoke_bench(const char* ckpt, size_t batch_size, size_t iterations, size_t warmup,
                         size_t workers, uint64_t seed, char** out_json) {
  return guarded([&] {
    need(ckpt, "ckpt");
    const auto ck = nn::load_checkpoint(ckpt);
    Prng prng(seed);
    auto r = workers > 1
                 ? bench::measure_parallel(ck.model, batch_size, iterations, warmup, workers, prng)
                 : bench::measure(ck.model, batch_size, iterations, warmup, prng);
    r.checkpoint_bytes = std::filesystem::file_size(ckpt);
    emit(out_json, bench::to_json(r));
  });
}

evoke_status evoke_bench_compare(const char* const* reports, size_t n, char** out_json,
                                 char** out_table) {
  return guarded([&] {
    need(reports, "reports");
    std::vector<bench::BenchReport> parsed;
    for (size_t i = 0; i < n; ++i) {
      need(reports[i], "report");
      parsed.push_back(bench::bench_report_from_json(Json::parse(reports[i])));
    }
    const auto ranking = bench::compare(parsed);
    emit(out_json, bench::to_json(ranking));
    emit(out_table, bench::format_table(ranking));
  });
}

evoke_status evoke_server_start(const evoke_model* model, const evoke_mapper* mapper,
                                const char* listen, size_t max_connections, evoke_server** out) {
  return guarded([&] {
    need(model, "model");
    need(mapper, "mapper");
    need(listen, "listen");
    need(out, "out");
    const service::ServiceContext ctx{&model->ck.model, &mapper->table, &mapper->manifest};
    auto s = std::make_unique<evoke_server>();
    s->server = std::make_unique<service::Server>(ctx, service::parse_listen_address(listen),
                                                  max_connections ? max_connections : 64);
    s->server->start();
    *out = s.release();
  });
}

uint16_t evoke_server_port(const evoke_server* server) {
  return server && server->server ? server->server->port() : 0;
}

evoke_status evoke_server_stop(evoke_server* server) {
  return guarded([&] {
    need(server, "server");
    server->server->stop();
  });
}

void evoke_server_free(evoke_server* server) { delete server; }

}  // extern "C"
