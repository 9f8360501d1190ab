// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include "tgode/tgode.h"

#include <fstream>
#include <iostream>
#include <mutex>
#include <new>
#include <string>

#include "tgode/error.hpp"
#include "tgode/experiment.hpp"

struct tgode_dataset {
  tgode::Dataset dataset;
};

struct tgode_model {
  tgode::Checkpoint checkpoint;
  tgode::Dataset dataset;
  int per_user = -1;  // -1 keeps the config's choice
};

namespace {

thread_local std::string last_error;

std::mutex log_mutex;
tgode_log_fn log_fn = nullptr;
void* log_user = nullptr;

tgode::LogSink sink() {
  std::lock_guard lock(log_mutex);
  if (log_fn == nullptr) return {};
  return [fn = log_fn, user = log_user](const std::string& line) { fn(line.c_str(), user); };
}

tgode_status fail(tgode_status s, const std::string& what) {
  last_error = what;
  return s;
}

// Maps exceptions to status codes.
template <class F>
tgode_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return TGODE_OK;
  } catch (const tgode::ParseError& e) {
    return fail(TGODE_ERR_PARSE, e.what());
  } catch (const tgode::IoError& e) {
    return fail(TGODE_ERR_IO, e.what());
  } catch (const tgode::ShapeError& e) {
    return fail(TGODE_ERR_SHAPE, e.what());
  } catch (const tgode::NumericError& e) {
    return fail(TGODE_ERR_NUMERIC, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(TGODE_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TGODE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TGODE_ERR_ARGUMENT, e.what());
  } catch (...) {
    return fail(TGODE_ERR_INTERNAL, "unknown exception");
  }
}

#define TGODE_REQUIRE(ptr)                                                        \
  do {                                                                            \
    if ((ptr) == nullptr) return fail(TGODE_ERR_ARGUMENT, #ptr " must not be null"); \
  } while (0)

tgode::MetricSummary evaluate_model(const tgode_model& m, tgode::Split split) {
  if (m.per_user < 0 || static_cast<bool>(m.per_user) == m.checkpoint.config.per_user) {
    return tgode::evaluate_checkpoint(m.checkpoint, m.dataset, split);
  }
  tgode::Checkpoint c = m.checkpoint;
  c.config.per_user = m.per_user != 0;
  return tgode::evaluate_checkpoint(c, m.dataset, split);
}

std::ofstream open_csv(const char* path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw tgode::IoError(std::string("cannot open '") + path + "' for writing");
  return out;
}

}  // namespace

extern "C" {

const char* tgode_version(void) { return "0.1.0"; }

const char* tgode_last_error(void) { return last_error.c_str(); }

const char* tgode_status_string(tgode_status status) {
  switch (status) {
    case TGODE_OK:
      return "ok";
    case TGODE_ERR_ARGUMENT:
      return "invalid argument";
    case TGODE_ERR_PARSE:
      return "parse error";
    case TGODE_ERR_IO:
      return "i/o error";
    case TGODE_ERR_SHAPE:
      return "shape error";
    case TGODE_ERR_NUMERIC:
      return "numeric error";
    case TGODE_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void tgode_set_log(tgode_log_fn fn, void* user_data) {
  std::lock_guard lock(log_mutex);
  log_fn = fn;
  log_user = user_data;
}

tgode_status tgode_dataset_prepare(const char* input_path, const char* format, int intervals,
                                   tgode_dataset** out) {
  TGODE_REQUIRE(input_path);
  TGODE_REQUIRE(format);
  TGODE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto log = tgode::load_log(input_path, tgode::parse_log_format(format));
    *out = new tgode_dataset{tgode::prepare_dataset(std::move(log), intervals)};
  });
}

tgode_status tgode_dataset_load(const char* snapshot_path, tgode_dataset** out) {
  TGODE_REQUIRE(snapshot_path);
  TGODE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new tgode_dataset{tgode::load_dataset(snapshot_path)}; });
}

tgode_status tgode_dataset_save(const tgode_dataset* dataset, const char* snapshot_path) {
  TGODE_REQUIRE(dataset);
  TGODE_REQUIRE(snapshot_path);
  return guarded([&] {
    const std::filesystem::path p(snapshot_path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    tgode::save_dataset(dataset->dataset, p);
  });
}

tgode_status tgode_dataset_stats_get(const tgode_dataset* dataset, tgode_dataset_stats* out) {
  TGODE_REQUIRE(dataset);
  TGODE_REQUIRE(out);
  const tgode::Dataset& d = dataset->dataset;
  out->users = d.log.num_users;
  out->items = d.log.num_items;
  out->interactions = d.log.edges.size();
  out->train = d.split.train.size();
  out->valid = d.split.valid.size();
  out->test = d.split.test.size();
  out->intervals = d.system.intervals();
  return TGODE_OK;
}

void tgode_dataset_free(tgode_dataset* dataset) { delete dataset; }

tgode_status tgode_train(const char* config_path, tgode_model** out) {
  TGODE_REQUIRE(config_path);
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    const tgode::ExperimentConfig config = tgode::load_config(config_path);
    tgode::Dataset dataset = tgode::load_experiment_dataset(config);
    tgode::RunResult r = tgode::run_experiment(config, dataset, sink());
    std::ofstream csv = open_csv((config.out / "metrics.csv").c_str());
    tgode::write_metrics_header(csv);
    for (const auto& row : r.rows) tgode::write_metrics_row(csv, row);
    if (!csv) throw tgode::IoError("cannot write metrics.csv");
    tgode::save_checkpoint(r.checkpoint, config.out / "checkpoint.tgck");
    if (out != nullptr) *out = new tgode_model{std::move(r.checkpoint), std::move(dataset)};
  });
}

tgode_status tgode_ablate(const char* grid_path, const char* csv_path, uint64_t* failed_cells) {
  TGODE_REQUIRE(grid_path);
  return guarded([&] {
    const auto grid = tgode::load_grid(grid_path);
    const std::string path =
        csv_path != nullptr ? std::string(csv_path) : (grid.front().out / "ablation.csv").string();
    std::ofstream csv = open_csv(path.c_str());
    const std::size_t failed = tgode::run_ablation(grid, csv, sink());
    if (!csv) throw tgode::IoError("cannot write '" + path + "'");
    if (failed_cells != nullptr) *failed_cells = failed;
  });
}

tgode_status tgode_model_load(const char* checkpoint_path, tgode_model** out) {
  TGODE_REQUIRE(checkpoint_path);
  TGODE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    tgode::Checkpoint ckpt = tgode::load_checkpoint(checkpoint_path);
    tgode::Dataset dataset = tgode::load_experiment_dataset(ckpt.config);
    if (dataset.log.num_nodes() != ckpt.params.embeddings.rows()) {
      throw tgode::IoError("checkpoint does not match dataset '" + ckpt.config.dataset.string() + "'");
    }
    *out = new tgode_model{std::move(ckpt), std::move(dataset)};
  });
}

tgode_status tgode_model_save(const tgode_model* model, const char* checkpoint_path) {
  TGODE_REQUIRE(model);
  TGODE_REQUIRE(checkpoint_path);
  return guarded([&] { tgode::save_checkpoint(model->checkpoint, checkpoint_path); });
}

tgode_status tgode_model_set_per_user(tgode_model* model, int per_user) {
  TGODE_REQUIRE(model);
  model->per_user = per_user != 0 ? 1 : 0;
  return TGODE_OK;
}

tgode_status tgode_model_evaluate(const tgode_model* model, const char* split, tgode_metrics* out) {
  TGODE_REQUIRE(model);
  TGODE_REQUIRE(split);
  TGODE_REQUIRE(out);
  return guarded([&] {
    const auto s = evaluate_model(*model, tgode::parse_split(split));
    *out = {s.recall5, s.recall10, s.mrr, s.evaluated, s.skipped_cold, s.skipped_masked};
  });
}

tgode_status tgode_model_evaluate_csv(const tgode_model* model, const char* split,
                                      const char* csv_path) {
  TGODE_REQUIRE(model);
  TGODE_REQUIRE(split);
  return guarded([&] {
    const tgode::Split which = tgode::parse_split(split);
    const tgode::Checkpoint& c = model->checkpoint;
    const auto s = evaluate_model(*model, which);
    tgode::MetricsRow row = tgode::metrics_row(c.config, c.best_epoch, tgode::to_string(which));
    row.recall5 = s.recall5;
    row.recall10 = s.recall10;
    row.mrr = s.mrr;
    row.loss = c.best_loss;
    row.nfe = c.nfe;
    if (csv_path == nullptr || std::string_view(csv_path) == "-") {
      tgode::write_metrics_header(std::cout);
      tgode::write_metrics_row(std::cout, row);
      std::cout.flush();
    } else {
      std::ofstream out = open_csv(csv_path);
      tgode::write_metrics_header(out);
      tgode::write_metrics_row(out, row);
      if (!out) throw tgode::IoError(std::string("cannot write '") + csv_path + "'");
    }
  });
}

tgode_status tgode_model_export(const tgode_model* model, const char* what, const char* csv_path) {
  TGODE_REQUIRE(model);
  TGODE_REQUIRE(what);
  TGODE_REQUIRE(csv_path);
  const std::string_view kind(what);
  if (kind != "embeddings" && kind != "attention") {
    return fail(TGODE_ERR_ARGUMENT, "unknown export '" + std::string(kind) + "' (expected embeddings|attention)");
  }
  return guarded([&] {
    std::ofstream out = open_csv(csv_path);
    if (kind == "embeddings") {
      tgode::export_embeddings(model->checkpoint, model->dataset, out);
    } else {
      tgode::export_attention(model->checkpoint, model->dataset, out);
    }
  });
}

void tgode_model_free(tgode_model* model) { delete model; }

}  // extern "C"
