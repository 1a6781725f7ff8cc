// evoke command-line front end. Talks to the library only through evoke.h.

#include <evoke/evoke.h>

#include <csignal>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct RuntimeFailure {
  int status;
};

// Owns a string returned by the library.
struct LibString {
  char* ptr = nullptr;
  ~LibString() { evoke_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

void check(evoke_status s, const char* what) {
  if (s == EVOKE_OK) return;
  std::cerr << "evoke " << what << ": " << evoke_status_name(s) << ": " << evoke_last_error()
            << "\n";
  throw RuntimeFailure{static_cast<int>(s)};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "evoke: cannot write " << path << "\n";
    throw RuntimeFailure{EVOKE_ERR_IO};
  }
}

struct TrainFlags {
  evoke_train_options opts{};
  std::string report;
  bool json = false;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_kd) {
  evoke_train_options_default(&f.opts);
  cmd->add_option("--epochs", f.opts.epochs, "training epochs per fold")->capture_default_str();
  cmd->add_option("--lr", f.opts.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--batch", f.opts.batch_size, "mini-batch size")->capture_default_str();
  cmd->add_option("--folds", f.opts.folds, "cross-validation folds")->capture_default_str();
  cmd->add_option("--seed", f.opts.seed, "experiment seed")
      ->envname("EVOKE_SEED")
      ->capture_default_str();
  if (with_kd) {
    cmd->add_option("--T", f.opts.temperature, "distillation temperature")->capture_default_str();
    cmd->add_option("--alpha", f.opts.alpha, "soft-loss weight")->capture_default_str();
  }
  cmd->add_option("--report", f.report, "write the JSON report here (default <out>.report.json)");
  cmd->add_flag("--json", f.json, "print JSON instead of a table");
}

void print_report(const std::string& json, bool as_json) {
  if (as_json) {
    std::cout << json << "\n";
    return;
  }
  LibString table;
  check(evoke_format_metrics(json.c_str(), &table.ptr), "format");
  std::cout << table.str();
}

void finish_training(const std::string& json, const TrainFlags& f, const std::string& out) {
  write_text(f.report.empty() ? out + ".report.json" : f.report, json + "\n");
  print_report(json, f.json);
}

std::vector<int> parse_bits(const std::string& text) {
  std::vector<int> bits;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item != "0" && item != "1") throw CLI::ValidationError("--bits", "expected v,a,d with 0/1 values");
    bits.push_back(item == "1");
  }
  if (bits.size() != 3) throw CLI::ValidationError("--bits", "expected exactly three bits v,a,d");
  return bits;
}

int run_serve(const std::string& model_path, const std::string& table, const std::string& manifest,
              const std::string& listen, std::size_t max_connections) {
  // Block the shutdown signals before any thread starts so only sigwait sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  evoke_model* model = nullptr;
  check(evoke_model_load(model_path.c_str(), nullptr, &model), "serve");
  std::unique_ptr<evoke_model, decltype(&evoke_model_free)> model_guard(model, evoke_model_free);
  evoke_mapper* mapper = nullptr;
  check(evoke_mapper_create(table.empty() ? nullptr : table.c_str(),
                            manifest.empty() ? nullptr : manifest.c_str(), &mapper),
        "serve");
  std::unique_ptr<evoke_mapper, decltype(&evoke_mapper_free)> mapper_guard(mapper,
                                                                            evoke_mapper_free);
  evoke_server* server = nullptr;
  check(evoke_server_start(model, mapper, listen.c_str(), max_connections, &server), "serve");
  std::unique_ptr<evoke_server, decltype(&evoke_server_free)> server_guard(server,
                                                                            evoke_server_free);
  const auto colon = listen.rfind(':');
  const std::string host = colon == std::string::npos || colon == 0 ? "127.0.0.1"
                                                                    : listen.substr(0, colon);
  std::cout << "listening on " << host << ":" << evoke_server_port(server) << std::endl;

  int sig = 0;
  sigwait(&set, &sig);
  std::cerr << "evoke serve: signal " << sig << ", draining connections\n";
  check(evoke_server_stop(server), "serve");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evoke: EEG emotion recognition with knowledge distillation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", evoke_version());

  // preprocess
  std::string pre_in, pre_out;
  double window_secs = 1.0, baseline_secs = 3.0;
  auto* pre = app.add_subcommand("preprocess", "raw EEG -> differential-entropy grid features");
  pre->add_option("--in", pre_in, "raw manifest, dataset directory or single container")->required();
  pre->add_option("--out", pre_out, "output directory")->required();
  pre->add_option("--window-secs", window_secs)->capture_default_str();
  pre->add_option("--baseline-secs", baseline_secs)->capture_default_str();

  // synth
  std::string synth_out;
  std::size_t synth_trials = 40, synth_subjects = 1;
  std::uint64_t synth_seed = 0;
  double synth_secs = 0.0;
  auto* synth = app.add_subcommand("synth", "write a synthetic raw EEG dataset");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--trials", synth_trials, "trials per subject")->capture_default_str();
  synth->add_option("--subjects", synth_subjects)->capture_default_str();
  synth->add_option("--seed", synth_seed)->envname("EVOKE_SEED")->capture_default_str();
  synth->add_option("--trial-secs", synth_secs, "stimulus length in seconds (default 4)");

  // train-teacher / train-student
  std::string tt_data, tt_out;
  TrainFlags tt;
  auto* teach = app.add_subcommand("train-teacher", "cross-validated teacher training");
  teach->add_option("--data", tt_data, "dataset directory or manifest")->required();
  teach->add_option("--out", tt_out, "checkpoint path")->required();
  add_train_flags(teach, tt, false);

  std::string ts_data, ts_out;
  TrainFlags ts;
  auto* stud = app.add_subcommand("train-student", "student trained without a teacher");
  stud->add_option("--data", ts_data)->required();
  stud->add_option("--out", ts_out)->required();
  add_train_flags(stud, ts, false);

  // distill
  std::string kd_teacher, kd_data, kd_out;
  TrainFlags kdf;
  auto* distill = app.add_subcommand("distill", "train the student against a frozen teacher");
  distill->add_option("--teacher", kd_teacher, "teacher checkpoint")->required();
  distill->add_option("--data", kd_data)->required();
  distill->add_option("--out", kd_out)->required();
  add_train_flags(distill, kdf, true);

  // sweep
  std::string sw_teacher, sw_data, sw_json, sw_csv;
  std::vector<double> sw_T{1.0, 1.25, 1.5, 2.0}, sw_alpha{0.0, 0.25, 0.5, 0.75, 1.0};
  TrainFlags swf;
  auto* sweep = app.add_subcommand("sweep", "grid over temperature and alpha");
  sweep->add_option("--teacher", sw_teacher)->required();
  sweep->add_option("--data", sw_data)->required();
  evoke_train_options_default(&swf.opts);
  sweep->add_option("--T", sw_T, "temperatures")->delimiter(',')->capture_default_str();
  sweep->add_option("--alpha", sw_alpha, "alphas")->delimiter(',')->capture_default_str();
  sweep->add_option("--epochs", swf.opts.epochs)->capture_default_str();
  sweep->add_option("--lr", swf.opts.learning_rate)->capture_default_str();
  sweep->add_option("--batch", swf.opts.batch_size)->capture_default_str();
  sweep->add_option("--folds", swf.opts.folds)->capture_default_str();
  sweep->add_option("--seed", swf.opts.seed)->envname("EVOKE_SEED")->capture_default_str();
  sweep->add_option("--out-json", sw_json, "write the sweep JSON here");
  sweep->add_option("--out-csv", sw_csv, "write per-fold CSV here");

  // eval
  std::string ev_model, ev_data;
  bool ev_json = false;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on its recorded validation fold");
  eval->add_option("--model", ev_model)->required();
  eval->add_option("--data", ev_data)->required();
  eval->add_flag("--json", ev_json, "print JSON instead of a table");

  // bench
  std::vector<std::string> bn_models;
  std::size_t bn_batch = 128, bn_iters = 200, bn_warmup = 20, bn_workers = 1;
  std::uint64_t bn_seed = 0;
  std::string bn_out;
  auto* bench = app.add_subcommand("bench", "latency and throughput of one or more checkpoints");
  bench->add_option("--model", bn_models, "checkpoint (repeat to compare)")->required();
  bench->add_option("--batch", bn_batch)->capture_default_str();
  bench->add_option("--iters", bn_iters)->capture_default_str();
  bench->add_option("--warmup", bn_warmup)->capture_default_str();
  bench->add_option("--workers", bn_workers)->capture_default_str();
  bench->add_option("--seed", bn_seed)->envname("EVOKE_SEED")->capture_default_str();
  bench->add_option("--out", bn_out, "write the JSON here");

  // map
  std::string mp_table, mp_manifest, mp_bits;
  bool mp_json = false;
  auto* map = app.add_subcommand("map", "VAD bits -> emotion and avatar");
  map->add_option("--table", mp_table, "emotion table JSON");
  map->add_option("--manifest", mp_manifest, "avatar manifest JSON");
  map->add_option("--bits", mp_bits, "v,a,d")->required();
  map->add_flag("--json", mp_json, "print the full record");

  // serve
  std::string sv_model, sv_table, sv_manifest, sv_listen = "127.0.0.1:7878";
  std::size_t sv_max = 64;
  auto* serve = app.add_subcommand("serve", "NDJSON inference service");
  serve->add_option("--model", sv_model)->required();
  serve->add_option("--table", sv_table);
  serve->add_option("--manifest", sv_manifest);
  serve->add_option("--listen", sv_listen, "host:port (port 0 picks one)")->capture_default_str();
  serve->add_option("--max-connections", sv_max)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    if (argc <= 1) std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*pre) {
      LibString out;
      check(evoke_preprocess(pre_in.c_str(), pre_out.c_str(), window_secs, baseline_secs, &out.ptr),
            "preprocess");
      std::cout << out.str() << "\n";
    } else if (*synth) {
      LibString out;
      check(evoke_synth(synth_out.c_str(), synth_subjects, synth_trials, synth_seed, synth_secs,
                        &out.ptr),
            "synth");
      std::cout << out.str() << "\n";
    } else if (*teach) {
      LibString out;
      check(evoke_train_teacher(tt_data.c_str(), tt_out.c_str(), &tt.opts, &out.ptr),
            "train-teacher");
      finish_training(out.str(), tt, tt_out);
    } else if (*stud) {
      LibString out;
      check(evoke_train_student(ts_data.c_str(), ts_out.c_str(), &ts.opts, &out.ptr),
            "train-student");
      finish_training(out.str(), ts, ts_out);
    } else if (*distill) {
      LibString out;
      check(evoke_distill(kd_teacher.c_str(), kd_data.c_str(), kd_out.c_str(), &kdf.opts,
                          &out.ptr),
            "distill");
      finish_training(out.str(), kdf, kd_out);
    } else if (*sweep) {
      LibString json, csv;
      check(evoke_sweep(sw_teacher.c_str(), sw_data.c_str(), sw_T.data(), sw_T.size(),
                        sw_alpha.data(), sw_alpha.size(), &swf.opts, &json.ptr, &csv.ptr),
            "sweep");
      if (!sw_json.empty()) write_text(sw_json, json.str() + "\n");
      if (!sw_csv.empty()) write_text(sw_csv, csv.str());
      std::cout << csv.str();
    } else if (*eval) {
      LibString out;
      check(evoke_eval(ev_model.c_str(), ev_data.c_str(), &out.ptr), "eval");
      print_report(out.str(), ev_json);
    } else if (*bench) {
      std::vector<std::string> reports;
      for (const auto& m : bn_models) {
        LibString out;
        check(evoke_bench(m.c_str(), bn_batch, bn_iters, bn_warmup, bn_workers, bn_seed, &out.ptr),
              "bench");
        reports.push_back(out.str());
      }
      std::vector<const char*> ptrs;
      for (const auto& r : reports) ptrs.push_back(r.c_str());
      LibString ranking, table;
      check(evoke_bench_compare(ptrs.data(), ptrs.size(), &ranking.ptr, &table.ptr), "bench");
      std::string json = "{\"reports\": [";
      for (std::size_t i = 0; i < reports.size(); ++i) json += (i ? ",\n" : "\n") + reports[i];
      json += "],\n\"ranking\": " + ranking.str() + "}\n";
      if (!bn_out.empty()) write_text(bn_out, json);
      std::cout << json << table.str();
    } else if (*map) {
      const auto bits = parse_bits(mp_bits);
      evoke_mapper* mapper = nullptr;
      check(evoke_mapper_create(mp_table.empty() ? nullptr : mp_table.c_str(),
                                mp_manifest.empty() ? nullptr : mp_manifest.c_str(), &mapper),
            "map");
      std::unique_ptr<evoke_mapper, decltype(&evoke_mapper_free)> guard(mapper, evoke_mapper_free);
      if (mp_json) {
        LibString out;
        check(evoke_mapper_lookup(mapper, bits[0], bits[1], bits[2], &out.ptr), "map");
        std::cout << out.str() << "\n";
      } else {
        LibString emotion;
        check(evoke_mapper_names(mapper, bits[0], bits[1], bits[2], &emotion.ptr, nullptr), "map");
        std::cout << emotion.str() << "\n";
      }
    } else if (*serve) {
      return run_serve(sv_model, sv_table, sv_manifest, sv_listen, sv_max);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const RuntimeFailure&) {
    return kExitRuntime;
  }
  return kExitOk;
}
