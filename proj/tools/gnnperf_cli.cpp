// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

// gnnperf: generate labeled datasets, train and evaluate the GNN, and build
// comparison reports. Every command writes a run manifest before it starts;
// `gnnperf --from-manifest run.manifest.json` replays it.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gnnperf/gnnperf.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestVersion = "gnnperf-manifest/1";

// Carries a status code out of a command.
struct Failure {
  int code;
  std::string message;
};

void check(gnnperf_status s, const std::string& what) {
  if (s != GNNPERF_OK) throw Failure{static_cast<int>(s), what + ": " + gnnperf_last_error()};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  gnnperf_string_free(s);
  return out;
}

struct DatasetDeleter {
  void operator()(gnnperf_dataset* d) const { gnnperf_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(gnnperf_model* m) const { gnnperf_model_free(m); }
};
using DatasetPtr = std::unique_ptr<gnnperf_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<gnnperf_model, ModelDeleter>;

std::string read_file(const fs::path& p, int code_on_error = 3) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Failure{code_on_error, "cannot read '" + p.string() + "'"};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
  if (!out) throw Failure{3, "cannot write '" + p.string() + "'"};
}

json read_json(const fs::path& p, int code_on_error) {
  try {
    return json::parse(read_file(p, code_on_error));
  } catch (const json::parse_error& e) {
    throw Failure{code_on_error, p.string() + ": malformed JSON at byte " + std::to_string(e.byte)};
  }
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string hash_text(const std::string& s) {
  char* out = nullptr;
  check(gnnperf_hash_bytes(s.data(), s.size(), &out), "hash");
  return take(out);
}

fs::path in_dir(const fs::path& dir, const std::string& name) {
  const fs::path p(name);
  return p.is_absolute() ? p : dir / p;
}

std::string absolute(const std::string& p) { return fs::absolute(fs::path(p)).lexically_normal().string(); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Manifest that is rewritten as the run progresses; the first write happens
// before any work.
struct Manifest {
  fs::path path;
  json body;

  void write() const { write_file(path, body.dump(2) + "\n"); }
};

Manifest start_manifest(const std::string& command, const json& config, const fs::path& out_dir) {
  Manifest m;
  m.path = in_dir(out_dir, config.at("manifest").get<std::string>());
  m.body = json{{"format", kManifestVersion},
                {"command", command},
                {"version", gnnperf_version()},
                {"config", config},
                {"output_dir", absolute(out_dir.string())},
                {"status", "running"}};
  m.write();
  return m;
}

std::string seed_text(const json& cfg) {
  return cfg.at("seed").is_string() ? cfg.at("seed").get<std::string>() : cfg.at("seed").dump();
}

// ---------------------------------------------------------------------------

int run_generate(json cfg, const fs::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!cfg.contains("seed")) cfg["seed"] = std::to_string(entropy_seed());
  if (!cfg.contains("out")) cfg["out"] = "dataset.jsonl";
  if (!cfg.contains("manifest")) cfg["manifest"] = cfg["out"].get<std::string>() + ".manifest.json";
  json gen = cfg;
  for (const char* k : {"out", "manifest"}) gen.erase(k);

  char* resolved_text = nullptr;
  check(gnnperf_generate_config_resolve(gen.dump().c_str(), &resolved_text), "generate");
  json resolved = json::parse(take(resolved_text));
  json full = resolved;
  full["out"] = cfg["out"];
  full["manifest"] = cfg["manifest"];

  Manifest man = start_manifest("generate", full, out_dir);
  man.body["seeds"] = {{"generate", seed_text(resolved)}};
  const auto out_path = in_dir(out_dir, cfg["out"].get<std::string>());
  man.body["artifacts"] = {{"dataset", absolute(out_path.string())}};
  man.write();

  gnnperf_dataset* raw = nullptr;
  check(gnnperf_dataset_generate(resolved.dump().c_str(), &raw), "generate");
  DatasetPtr ds(raw);
  fs::create_directories(out_path.has_parent_path() ? out_path.parent_path() : fs::path("."));
  check(gnnperf_dataset_save(ds.get(), out_path.string().c_str()), "save dataset");
  char* hash = nullptr;
  check(gnnperf_dataset_hash(ds.get(), &hash), "hash dataset");
  const auto h = take(hash);

  man.body["dataset_hashes"] = {{"dataset", h}};
  man.body["samples"] = gnnperf_dataset_size(ds.get());
  man.body["wall_seconds"] = seconds_since(t0);
  man.body["status"] = "complete";
  man.write();
  std::cout << "wrote " << gnnperf_dataset_size(ds.get()) << " samples to " << out_path.string() << " (hash " << h
            << ")\n";
  return 0;
}

int run_train(json cfg, const fs::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!cfg.contains("data")) throw Failure{2, "train: --data is required"};
  cfg["data"] = absolute(cfg["data"].get<std::string>());
  if (cfg.contains("resume")) cfg["resume"] = absolute(cfg["resume"].get<std::string>());
  if (!cfg.contains("seed")) cfg["seed"] = std::to_string(entropy_seed());
  if (!cfg.contains("task")) cfg["task"] = "delay";
  if (!cfg.contains("cell")) cfg["cell"] = "gru";
  if (!cfg.contains("validation-fraction")) cfg["validation-fraction"] = 0.2;
  if (cfg["validation-fraction"].is_string()) {
    try {
      cfg["validation-fraction"] = std::stod(cfg["validation-fraction"].get<std::string>());
    } catch (const std::exception&) {
      throw Failure{2, "train: --validation-fraction must be a number"};
    }
  }
  if (!cfg["validation-fraction"].is_number()) throw Failure{2, "train: --validation-fraction must be a number"};
  const std::string stem = "model_" + cfg["cell"].get<std::string>() + "_" + cfg["task"].get<std::string>();
  if (!cfg.contains("out")) cfg["out"] = stem + ".json";
  if (!cfg.contains("metrics")) cfg["metrics"] = "metrics_" + stem.substr(6) + ".csv";
  if (!cfg.contains("manifest")) cfg["manifest"] = cfg["out"].get<std::string>() + ".manifest.json";

  json model_cfg = json::object(), train_cfg = json::object();
  for (const char* k : {"cell", "hidden", "iterations", "readout-width"})
    if (cfg.contains(k)) model_cfg[k] = cfg[k];
  for (const char* k : {"task", "lr", "epochs", "samples-per-update", "task-weights", "patience", "threads"})
    if (cfg.contains(k)) train_cfg[k] = cfg[k];
  model_cfg["seed"] = cfg["seed"];
  train_cfg["seed"] = cfg["seed"];

  char* resolved_text = nullptr;
  check(gnnperf_train_config_resolve(model_cfg.dump().c_str(), train_cfg.dump().c_str(), &resolved_text), "train");
  const json resolved = json::parse(take(resolved_text));
  json full = cfg;
  for (const auto& [k, v] : resolved["model"].items()) full[k] = v;
  for (const auto& [k, v] : resolved["train"].items()) full[k] = v;
  full["seed"] = seed_text(cfg);

  gnnperf_dataset* raw = nullptr;
  check(gnnperf_dataset_load(cfg["data"].get<std::string>().c_str(), &raw), "load dataset");
  DatasetPtr all(raw);
  char* hash = nullptr;
  check(gnnperf_dataset_hash(all.get(), &hash), "hash dataset");
  const auto data_hash = take(hash);

  const auto model_path = in_dir(out_dir, cfg["out"].get<std::string>());
  const auto metrics_path = in_dir(out_dir, cfg["metrics"].get<std::string>());
  Manifest man = start_manifest("train", full, out_dir);
  man.body["seeds"] = {{"train", seed_text(cfg)}, {"model_init", seed_text(cfg)}};
  man.body["dataset_hashes"] = {{"data", data_hash}};
  man.body["config_hash"] = resolved["config_hash"];
  man.body["cell"] = resolved["model"]["cell"];
  man.body["artifacts"] = {{"checkpoint", absolute(model_path.string())}, {"metrics", absolute(metrics_path.string())}};
  man.write();

  if (cfg.contains("expect-dataset-hash") && cfg["expect-dataset-hash"] != data_hash) {
    throw Failure{3, "dataset hash " + data_hash + " differs from the manifest's " +
                         cfg["expect-dataset-hash"].get<std::string>()};
  }

  gnnperf_dataset *tr = nullptr, *va = nullptr;
  check(gnnperf_dataset_split(all.get(), cfg["validation-fraction"].get<double>(), &tr, &va), "split dataset");
  DatasetPtr train_set(tr), val_set(va);

  ModelPtr resume;
  if (cfg.contains("resume")) {
    gnnperf_model* r = nullptr;
    check(gnnperf_model_load(cfg["resume"].get<std::string>().c_str(), &r), "load checkpoint");
    resume.reset(r);
  }

  std::cerr << "training " << resolved["model"]["cell"].get<std::string>() << " on "
            << gnnperf_dataset_size(train_set.get()) << " samples (" << gnnperf_dataset_size(val_set.get())
            << " validation)\n";
  gnnperf_model* best = nullptr;
  char* result_text = nullptr;
  check(gnnperf_train(train_set.get(), val_set.get(), resolved["model"].dump().c_str(), train_cfg.dump().c_str(),
                      resume.get(), &best, &result_text),
        "train");
  ModelPtr model(best);
  const json result = json::parse(take(result_text));

  fs::create_directories(model_path.has_parent_path() ? model_path.parent_path() : fs::path("."));
  check(gnnperf_model_save(model.get(), model_path.string().c_str()), "save checkpoint");
  write_file(metrics_path, result["metrics_csv"].get<std::string>());

  man.body["best_epoch"] = result["best_epoch"];
  man.body["epochs_run"] = result["epochs_run"];
  man.body["wall_seconds"] = seconds_since(t0);
  man.body["status"] = "complete";
  man.write();
  std::cout << "best epoch " << result["best_epoch"] << " of " << result["epochs_run"] << "; checkpoint "
            << model_path.string() << ", metrics " << metrics_path.string() << "\n";
  return 0;
}

int run_evaluate(json cfg, const fs::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!cfg.contains("model") || !cfg.contains("data")) throw Failure{2, "evaluate: --model and --data are required"};
  cfg["model"] = absolute(cfg["model"].get<std::string>());
  cfg["data"] = absolute(cfg["data"].get<std::string>());
  if (!cfg.contains("context")) cfg["context"] = "scheduling";
  if (!cfg.contains("out")) cfg["out"] = "evaluation.json";
  if (!cfg.contains("manifest")) cfg["manifest"] = cfg["out"].get<std::string>() + ".manifest.json";

  gnnperf_dataset* raw = nullptr;
  check(gnnperf_dataset_load(cfg["data"].get<std::string>().c_str(), &raw), "load dataset");
  DatasetPtr ds(raw);
  char* hash = nullptr;
  check(gnnperf_dataset_hash(ds.get(), &hash), "hash dataset");
  const auto out_path = in_dir(out_dir, cfg["out"].get<std::string>());

  Manifest man = start_manifest("evaluate", cfg, out_dir);
  man.body["dataset_hashes"] = {{"data", take(hash)}};
  man.body["checkpoint_hash"] = hash_text(read_file(cfg["model"].get<std::string>()));
  man.body["artifacts"] = {{"evaluation", absolute(out_path.string())}};
  man.write();

  gnnperf_model* m = nullptr;
  check(gnnperf_model_load(cfg["model"].get<std::string>().c_str(), &m), "load checkpoint");
  ModelPtr model(m);
  char* eval_text = nullptr;
  check(gnnperf_evaluate(model.get(), ds.get(), cfg["context"].get<std::string>().c_str(), &eval_text), "evaluate");
  json eval = json::parse(take(eval_text));
  if (cfg.contains("predictions")) {
    char* pred = nullptr;
    check(gnnperf_predict(model.get(), ds.get(), &pred), "predict");
    const auto pred_path = in_dir(out_dir, cfg["predictions"].get<std::string>());
    write_file(pred_path, json::parse(take(pred)).dump(1) + "\n");
    man.body["artifacts"]["predictions"] = absolute(pred_path.string());
  }
  write_file(out_path, eval.dump(2) + "\n");

  man.body["wall_seconds"] = seconds_since(t0);
  man.body["status"] = "complete";
  man.write();
  for (const auto& [task, v] : eval["tasks"].items()) {
    std::cout << task << " " << v["metric"].get<std::string>() << " " << v["value"].get<double>() << "\n";
  }
  std::cout << "baseline delay mape " << eval["baseline"]["delay"]["mape"].get<double>() << "\n";
  return 0;
}

int run_report(json cfg, const fs::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!cfg.contains("runs") || cfg["runs"].empty()) throw Failure{2, "report: give at least one metrics CSV"};
  if (!cfg.contains("context")) cfg["context"] = "scheduling";
  if (!cfg.contains("manifest")) cfg["manifest"] = "report.manifest.json";
  json runs = json::array();
  json normalized = json::array();
  json hashes = json::object();
  for (const auto& r : cfg["runs"]) {
    std::string spec = r.get<std::string>(), label, path = spec;
    const auto eq = spec.find('=');
    if (eq != std::string::npos) {
      label = spec.substr(0, eq);
      path = spec.substr(eq + 1);
    } else {
      label = fs::path(spec).stem().string();
    }
    path = absolute(path);
    const auto text = read_file(path);
    runs.push_back({{"label", label}, {"csv", text}});
    normalized.push_back(label + "=" + path);
    hashes[label] = hash_text(text);
  }
  cfg["runs"] = normalized;

  Manifest man = start_manifest("report", cfg, out_dir);
  man.body["dataset_hashes"] = json::object();
  man.body["input_hashes"] = hashes;
  man.write();

  char* files = nullptr;
  check(gnnperf_report(runs.dump().c_str(), cfg["context"].get<std::string>().c_str(), out_dir.string().c_str(),
                       &files),
        "report");
  const json listed = json::parse(take(files));
  man.body["artifacts"] = listed;
  man.body["wall_seconds"] = seconds_since(t0);
  man.body["status"] = "complete";
  man.write();
  for (const auto& f : listed) std::cout << f.get<std::string>() << "\n";
  return 0;
}

int dispatch(const std::string& command, const json& cfg, const fs::path& out_dir) {
  if (command == "generate") return run_generate(cfg, out_dir);
  if (command == "train") return run_train(cfg, out_dir);
  if (command == "evaluate") return run_evaluate(cfg, out_dir);
  if (command == "report") return run_report(cfg, out_dir);
  throw Failure{2, "unknown command '" + command + "'"};
}

int replay(const std::string& manifest_path, const std::optional<fs::path>& out_dir) {
  const json m = read_json(manifest_path, 3);
  if (!m.is_object() || m.value("format", "") != kManifestVersion) {
    throw Failure{3, manifest_path + ": not a gnnperf manifest"};
  }
  json cfg = m.at("config");
  const std::string command = m.at("command").get<std::string>();
  if (command == "train") {
    if (m.contains("dataset_hashes")) cfg["expect-dataset-hash"] = m["dataset_hashes"]["data"];
  }
  return dispatch(command, cfg, out_dir ? *out_dir : fs::path(m.at("output_dir").get<std::string>()));
}

// Options bound to strings so only flags actually given reach the config.
struct Flags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, const std::string& name, const std::string& help) {
    opts[name] = app->add_option("--" + name, values[name], help);
  }
  // Config file keys first, then flags given on the command line.
  json collect(const std::string& config_path) const {
    json cfg = json::object();
    if (!config_path.empty()) {
      cfg = read_json(config_path, 2);
      if (!cfg.is_object()) throw Failure{2, config_path + ": config must be a JSON object"};
    }
    for (const auto& [name, opt] : opts)
      if (opt->count()) cfg[name] = values.at(name);
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gnnperf: GNN flow-level network performance models with RNN, GRU and LSTM cells"};
  app.set_version_flag("--version", std::string(gnnperf_version()));
  std::string from_manifest, out_dir_flag;
  app.add_option("--from-manifest", from_manifest, "Replay the run recorded in a manifest");
  app.add_option("--out-dir", out_dir_flag, "Directory for outputs (default: $GNNPERF_OUTPUT_DIR, else .)");
  app.require_subcommand(0, 1);

  std::string gen_config, train_config, eval_config, report_config;

  auto* gen = app.add_subcommand("generate", "Build samples, simulate them and write a labeled dataset");
  Flags gf;
  gen->add_option("--config", gen_config, "JSON file with the same keys as the flags");
  gf.add(gen, "topology", "power-law | fat-tree | grid");
  gf.add(gen, "nodes", "Node count or range for power-law, e.g. 8..12");
  gf.add(gen, "k", "Fat-tree arity");
  gf.add(gen, "rows", "Grid rows");
  gf.add(gen, "cols", "Grid columns");
  gf.add(gen, "exponent", "Power-law degree exponent");
  gf.add(gen, "capacities", "Comma-separated link capacities in bits/s");
  gf.add(gen, "flows", "Flows per sample, count or range");
  gf.add(gen, "traffic", "Comma-separated traffic models: poisson, cbr, on-off, autocorrelated-exp, modulated-exp");
  gf.add(gen, "max-lambda", "Range of the per-sample maximum flow rate in bits/s");
  gf.add(gen, "size-dist", "binomial | exponential | fixed");
  gf.add(gen, "size-mean", "Mean packet size in bits for exponential and fixed sizes");
  gf.add(gen, "policy", "Comma-separated scheduling policies: fifo, sp, wfq, drr");
  gf.add(gen, "buffer-bits", "Comma-separated queue sizes in bits");
  gf.add(gen, "weights", "Comma-separated WFQ/DRR weight sets, e.g. 0.5/0.3/0.2");
  gf.add(gen, "duration", "Simulated seconds per sample");
  gf.add(gen, "warmup", "Seconds excluded from labels (default 10% of duration)");
  gf.add(gen, "samples", "Number of samples");
  gf.add(gen, "seed", "Seed; drawn from entropy and recorded when omitted");
  gf.add(gen, "threads", "Samples generated concurrently");
  gf.add(gen, "out", "Dataset file name");
  gf.add(gen, "manifest", "Manifest file name");
  bool fixed_tos = false;
  gen->add_flag("--fixed-tos", fixed_tos, "Put every flow in ToS class 0");

  auto* trn = app.add_subcommand("train", "Train a model and write its checkpoint and metrics CSV");
  Flags tf;
  trn->add_option("--config", train_config, "JSON file with the same keys as the flags");
  tf.add(trn, "data", "Labeled dataset");
  tf.add(trn, "validation-fraction", "Share of samples held out for validation (default 0.2)");
  tf.add(trn, "cell", "rnn | gru | lstm");
  tf.add(trn, "task", "delay | jitter | loss");
  tf.add(trn, "hidden", "Hidden state width (default 32)");
  tf.add(trn, "iterations", "Message-passing iterations (default 8)");
  tf.add(trn, "readout-width", "Readout hidden width (default: hidden)");
  tf.add(trn, "lr", "Adam learning rate (default 0.001)");
  tf.add(trn, "epochs", "Epoch budget (default 50, 100 for jitter)");
  tf.add(trn, "samples-per-update", "Samples per Adam step (default 8)");
  tf.add(trn, "patience", "Early-stopping patience in epochs, 0 disables (default 10)");
  tf.add(trn, "seed", "Seed; drawn from entropy and recorded when omitted");
  tf.add(trn, "threads", "Samples evaluated concurrently within an update");
  tf.add(trn, "resume", "Checkpoint to continue from");
  tf.add(trn, "out", "Checkpoint file name");
  tf.add(trn, "metrics", "Metrics CSV file name");
  tf.add(trn, "manifest", "Manifest file name");

  auto* evl = app.add_subcommand("evaluate", "Score a checkpoint on a labeled dataset");
  Flags ef;
  evl->add_option("--config", eval_config, "JSON file with the same keys as the flags");
  ef.add(evl, "model", "Checkpoint");
  ef.add(evl, "data", "Labeled dataset");
  ef.add(evl, "context", "scheduling | scalability | traffic-model (selects the jitter metric)");
  ef.add(evl, "out", "Evaluation JSON file name");
  ef.add(evl, "predictions", "Also write per-flow predictions to this file");
  ef.add(evl, "manifest", "Manifest file name");

  auto* rep = app.add_subcommand("report", "Comparison tables and SVG charts from metrics CSVs");
  Flags rf;
  std::vector<std::string> run_specs;
  rep->add_option("--config", report_config, "JSON file with the same keys as the flags");
  rep->add_option("runs", run_specs, "Metrics CSVs, optionally labeled as label=path");
  rf.add(rep, "context", "scheduling | scalability | traffic-model");
  rf.add(rep, "manifest", "Manifest file name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::optional<fs::path> out_dir;
  if (!out_dir_flag.empty()) {
    out_dir = out_dir_flag;
  } else if (const char* env = std::getenv("GNNPERF_OUTPUT_DIR"); env && *env) {
    out_dir = env;
  }

  try {
    if (!from_manifest.empty()) {
      if (app.get_subcommands().size()) throw Failure{2, "--from-manifest cannot be combined with a subcommand"};
      return replay(from_manifest, out_dir);
    }
    const fs::path dir = out_dir.value_or(".");
    if (gen->parsed()) {
      json cfg = gf.collect(gen_config);
      if (fixed_tos) cfg["random-tos"] = false;
      return run_generate(cfg, dir);
    }
    if (trn->parsed()) return run_train(tf.collect(train_config), dir);
    if (evl->parsed()) return run_evaluate(ef.collect(eval_config), dir);
    if (rep->parsed()) {
      json cfg = rf.collect(report_config);
      if (!run_specs.empty()) cfg["runs"] = run_specs;
      return run_report(cfg, dir);
    }
    std::cerr << app.help();
    return 2;
  } catch (const Failure& f) {
    std::cerr << "gnnperf: " << f.message << "\n";
    return f.code;
  } catch (const json::exception& e) {
    std::cerr << "gnnperf: malformed configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gnnperf: " << e.what() << "\n";
    return 1;
  }
}
