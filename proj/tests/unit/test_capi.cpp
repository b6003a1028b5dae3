// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include <unistd.h>

#include "doctest.h"
#include "gnnperf/gnnperf.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  gnnperf_string_free(s);
  return out;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gnnperf_capi_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

const char* kSmall = R"({"samples": 6, "seed": 3, "nodes": "4..5", "flows": "3..5", "duration": 150})";

gnnperf_dataset* generate(const char* cfg = kSmall) {
  gnnperf_dataset* ds = nullptr;
  REQUIRE(gnnperf_dataset_generate(cfg, &ds) == GNNPERF_OK);
  return ds;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("status codes and last error") {
  CHECK(GNNPERF_OK == 0);
  CHECK(GNNPERF_ERR_INTERNAL == 1);
  CHECK(GNNPERF_ERR_CONFIG == 2);
  CHECK(GNNPERF_ERR_DATA == 3);
  CHECK(GNNPERF_ERR_NUMERIC == 4);
  CHECK(std::string(gnnperf_version()).size() > 0);

  gnnperf_dataset* ds = nullptr;
  CHECK(gnnperf_dataset_generate("{not json", &ds) == GNNPERF_ERR_CONFIG);
  CHECK(ds == nullptr);
  CHECK(std::string(gnnperf_last_error()).find("JSON") != std::string::npos);
  CHECK(gnnperf_dataset_generate(R"({"samples": 0})", &ds) == GNNPERF_ERR_CONFIG);
  CHECK(gnnperf_dataset_generate(R"({"topology": "ring"})", &ds) == GNNPERF_ERR_CONFIG);
  CHECK(std::string(gnnperf_last_error()).find("ring") != std::string::npos);
  CHECK(gnnperf_dataset_generate(R"({"bogus-key": 1})", &ds) == GNNPERF_ERR_CONFIG);
  CHECK(gnnperf_dataset_generate(kSmall, nullptr) == GNNPERF_ERR_CONFIG);

  // a success clears the message
  char* v = nullptr;
  CHECK(gnnperf_hash_bytes("abc", 3, &v) == GNNPERF_OK);
  CHECK(std::string(gnnperf_last_error()).empty());
  CHECK(take(v).size() == 16);

  CHECK(gnnperf_dataset_load("/nonexistent/gnnperf.jsonl", &ds) == GNNPERF_ERR_DATA);
  CHECK(std::string(gnnperf_last_error()).find("/nonexistent/gnnperf.jsonl") != std::string::npos);

  const auto bad = scratch("bad.jsonl");
  std::ofstream(bad) << "{\"version\": 1}\n";
  CHECK(gnnperf_dataset_load(bad.c_str(), &ds) == GNNPERF_ERR_DATA);

  gnnperf_model* m = nullptr;
  CHECK(gnnperf_model_create(R"({"cell": "transformer"})", &m) == GNNPERF_ERR_CONFIG);
  CHECK(gnnperf_model_create(R"({"hidden": 0})", &m) == GNNPERF_ERR_CONFIG);
  CHECK(m == nullptr);
}

TEST_CASE("last error is per thread") {
  gnnperf_dataset* ds = nullptr;
  CHECK(gnnperf_dataset_generate("{", &ds) == GNNPERF_ERR_CONFIG);
  std::string other;
  std::thread([&] { other = gnnperf_last_error(); }).join();
  CHECK(other.empty());
  CHECK(std::string(gnnperf_last_error()).size() > 0);
}

TEST_CASE("hash of bytes") {
  char* h = nullptr;
  REQUIRE(gnnperf_hash_bytes("", 0, &h) == GNNPERF_OK);
  CHECK(take(h) == "cbf29ce484222325");  // FNV-1a offset basis
  REQUIRE(gnnperf_hash_bytes("a", 1, &h) == GNNPERF_OK);
  CHECK(take(h) == "af63dc4c8601ec8c");
}

TEST_CASE("dataset generate, save, load and split") {
  gnnperf_dataset* ds = generate();
  CHECK(gnnperf_dataset_size(ds) == 6);
  char* h1 = nullptr;
  REQUIRE(gnnperf_dataset_hash(ds, &h1) == GNNPERF_OK);
  const std::string hash = take(h1);

  gnnperf_dataset* again = generate();
  char* h2 = nullptr;
  REQUIRE(gnnperf_dataset_hash(again, &h2) == GNNPERF_OK);
  CHECK(take(h2) == hash);

  const auto path = scratch("ds.jsonl");
  REQUIRE(gnnperf_dataset_save(ds, path.c_str()) == GNNPERF_OK);
  gnnperf_dataset* loaded = nullptr;
  REQUIRE(gnnperf_dataset_load(path.c_str(), &loaded) == GNNPERF_OK);
  char* h3 = nullptr;
  REQUIRE(gnnperf_dataset_hash(loaded, &h3) == GNNPERF_OK);
  CHECK(take(h3) == hash);
  const auto path2 = scratch("ds2.jsonl");
  REQUIRE(gnnperf_dataset_save(loaded, path2.c_str()) == GNNPERF_OK);
  CHECK(slurp(path) == slurp(path2));

  gnnperf_dataset *tr = nullptr, *va = nullptr;
  REQUIRE(gnnperf_dataset_split(ds, 0.34, &tr, &va) == GNNPERF_OK);
  CHECK(gnnperf_dataset_size(tr) == 4);
  CHECK(gnnperf_dataset_size(va) == 2);
  CHECK(gnnperf_dataset_split(ds, 1.5, &tr, &va) == GNNPERF_ERR_CONFIG);

  char* resolved = nullptr;
  REQUIRE(gnnperf_generate_config_resolve(kSmall, &resolved) == GNNPERF_OK);
  const json r = json::parse(take(resolved));
  CHECK(r.at("seed") == 3);
  CHECK(r.at("samples") == 6);
  CHECK(r.contains("topology"));

  for (auto* d : {ds, again, loaded, tr, va}) gnnperf_dataset_free(d);
  gnnperf_dataset_free(nullptr);
}

TEST_CASE("model create, save, load and info") {
  gnnperf_model* m = nullptr;
  REQUIRE(gnnperf_model_create(R"({"cell": "lstm", "hidden": 8, "iterations": 2, "seed": 5})", &m) == GNNPERF_OK);
  char* info = nullptr;
  REQUIRE(gnnperf_model_info(m, &info) == GNNPERF_OK);
  const json j = json::parse(take(info));
  CHECK(j.at("config").at("cell") == "lstm");
  CHECK(j.at("config").at("hidden") == 8);
  CHECK(j.at("resumable") == false);
  CHECK(j.at("parameters").get<std::size_t>() > j.at("cell_parameters").get<std::size_t>());

  const auto path = scratch("m.json");
  REQUIRE(gnnperf_model_save(m, path.c_str()) == GNNPERF_OK);
  gnnperf_model* back = nullptr;
  REQUIRE(gnnperf_model_load(path.c_str(), &back) == GNNPERF_OK);

  gnnperf_dataset* ds = generate();
  char *p1 = nullptr, *p2 = nullptr;
  REQUIRE(gnnperf_predict(m, ds, &p1) == GNNPERF_OK);
  REQUIRE(gnnperf_predict(back, ds, &p2) == GNNPERF_OK);
  const std::string a = take(p1);
  CHECK(a == take(p2));
  const json preds = json::parse(a);
  REQUIRE(preds.is_array());
  for (const auto& p : preds) {
    CHECK(p.at("delay").get<double>() > 0.0);
    CHECK(p.at("loss").get<double>() > 0.0);
    CHECK(p.at("loss").get<double>() < 1.0);
  }

  std::ofstream(scratch("broken.json")) << R"({"version": "gnnperf-checkpoint/1", "config": {}, "params": {}})";
  gnnperf_model* broken = nullptr;
  CHECK(gnnperf_model_load(scratch("broken.json").c_str(), &broken) == GNNPERF_ERR_DATA);

  gnnperf_model_free(m);
  gnnperf_model_free(back);
  gnnperf_dataset_free(ds);
}

TEST_CASE("train, resume and evaluate through the C interface") {
  gnnperf_dataset* ds = generate();
  gnnperf_dataset *tr = nullptr, *va = nullptr;
  REQUIRE(gnnperf_dataset_split(ds, 0.34, &tr, &va) == GNNPERF_OK);
  const char* mc = R"({"cell": "gru", "hidden": 6, "iterations": 2})";

  gnnperf_model* full = nullptr;
  char* full_json = nullptr;
  REQUIRE(gnnperf_train(tr, va, mc, R"({"epochs": 4, "samples-per-update": 2, "patience": 0})", nullptr, &full,
                        &full_json) == GNNPERF_OK);
  const json fr = json::parse(take(full_json));
  CHECK(fr.at("epochs_run") == 4);
  CHECK(fr.at("train_loss").size() == 4);
  CHECK(fr.at("metrics_csv").get<std::string>().rfind("epoch,split,task,value\n", 0) == 0);

  gnnperf_model* half = nullptr;
  char* half_json = nullptr;
  REQUIRE(gnnperf_train(tr, va, mc, R"({"epochs": 2, "samples-per-update": 2, "patience": 0})", nullptr, &half,
                        &half_json) == GNNPERF_OK);
  take(half_json);
  // a saved and reloaded checkpoint keeps its training state
  const auto ckpt = scratch("half.json");
  REQUIRE(gnnperf_model_save(half, ckpt.c_str()) == GNNPERF_OK);
  gnnperf_model* reloaded = nullptr;
  REQUIRE(gnnperf_model_load(ckpt.c_str(), &reloaded) == GNNPERF_OK);
  char* info = nullptr;
  REQUIRE(gnnperf_model_info(reloaded, &info) == GNNPERF_OK);
  CHECK(json::parse(take(info)).at("resumable") == true);

  gnnperf_model* rest = nullptr;
  char* rest_json = nullptr;
  REQUIRE(gnnperf_train(tr, va, mc, R"({"epochs": 4, "samples-per-update": 2, "patience": 0})", reloaded, &rest,
                        &rest_json) == GNNPERF_OK);
  const json rr = json::parse(take(rest_json));
  CHECK(rr.at("train_loss") == fr.at("train_loss"));
  CHECK(rr.at("validation_loss") == fr.at("validation_loss"));
  CHECK(rr.at("config_hash") == fr.at("config_hash"));

  // a different configuration cannot resume this checkpoint
  gnnperf_model* nope = nullptr;
  char* nope_json = nullptr;
  CHECK(gnnperf_train(tr, va, mc, R"({"epochs": 4, "lr": 0.01})", reloaded, &nope, &nope_json) == GNNPERF_ERR_CONFIG);
  CHECK(std::string(gnnperf_last_error()).find("config hash") != std::string::npos);

  char* ev = nullptr;
  REQUIRE(gnnperf_evaluate(full, va, "traffic-model", &ev) == GNNPERF_OK);
  const json e = json::parse(take(ev));
  CHECK(e.at("tasks").at("jitter").at("metric") == "mae");
  CHECK(e.at("tasks").at("jitter").at("value") == e.at("tasks").at("jitter").at("mae"));
  CHECK(e.at("tasks").at("delay").at("metric") == "mape");
  CHECK(e.at("baseline").at("delay").at("mape").get<double>() >= 0.0);
  CHECK(gnnperf_evaluate(full, va, "nonsense", &ev) == GNNPERF_ERR_CONFIG);

  char* resolved = nullptr;
  REQUIRE(gnnperf_train_config_resolve(mc, R"({"epochs": 9, "samples-per-update": 2, "patience": 0})", &resolved) ==
          GNNPERF_OK);
  CHECK(json::parse(take(resolved)).at("config_hash") == fr.at("config_hash"));

  for (auto* m : {full, half, reloaded, rest}) gnnperf_model_free(m);
  for (auto* d : {ds, tr, va}) gnnperf_dataset_free(d);
}

TEST_CASE("numeric failure maps to its own code") {
  gnnperf_dataset* ds = generate();
  const auto path = scratch("numeric.jsonl");
  REQUIRE(gnnperf_dataset_save(ds, path.c_str()) == GNNPERF_OK);
  // rewrite the first sample: vanishing capacities against microsecond delay labels
  std::ifstream in(path);
  std::string first, rest, line;
  std::getline(in, first);
  while (std::getline(in, line)) rest += line + "\n";
  json j = json::parse(first);
  for (auto& l : j["topology"]["links"]) l["capacity"] = 1e-300;
  for (auto& [id, label] : j["labels"].items()) label["delay_s"] = 1e-6;
  std::ofstream(path) << j.dump() << "\n" << rest;

  gnnperf_dataset* poisoned = nullptr;
  REQUIRE(gnnperf_dataset_load(path.c_str(), &poisoned) == GNNPERF_OK);
  gnnperf_model* out = nullptr;
  char* result = nullptr;
  CHECK(gnnperf_train(poisoned, poisoned, R"({"hidden": 4, "iterations": 1})", R"({"epochs": 1})", nullptr, &out,
                      &result) == GNNPERF_ERR_NUMERIC);
  INFO(std::string(gnnperf_last_error()));
  CHECK(std::string(gnnperf_last_error()).find("epoch 1") != std::string::npos);
  CHECK(out == nullptr);
  gnnperf_dataset_free(ds);
  gnnperf_dataset_free(poisoned);
}

TEST_CASE("report writes its files") {
  const std::string csv = "epoch,split,task,value\n1,train,delay,0.5\n1,validation,delay,0.6\n"
                          "1,validation_mape,delay,0.2\n1,validation_mae,delay,0.01\n";
  const json runs = json::array({{{"label", "gru"}, {"csv", csv}}, {{"label", "lstm"}, {"csv", csv}}});
  const auto dir = scratch("report");
  char* out = nullptr;
  REQUIRE(gnnperf_report(runs.dump().c_str(), "scheduling", dir.c_str(), &out) == GNNPERF_OK);
  const json files = json::parse(take(out));
  CHECK(files.size() >= 3);
  CHECK(fs::exists(dir / "comparison.csv"));
  CHECK(slurp(dir / "comparison.csv").rfind("task,metric,gru,lstm\n", 0) == 0);
  CHECK(gnnperf_report("[]", "scheduling", dir.c_str(), &out) == GNNPERF_ERR_CONFIG);
  CHECK(gnnperf_report(R"([{"label": "x", "csv": "garbage"}])", "scheduling", dir.c_str(), &out) ==
        GNNPERF_ERR_DATA);
}
