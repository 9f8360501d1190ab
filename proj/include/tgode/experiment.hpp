// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment plumbing: config files, ablation grids, metrics CSV, model
// checkpoints and the CSV exports.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tgode/data.hpp"
#include "tgode/metrics.hpp"
#include "tgode/model.hpp"
#include "tgode/train.hpp"

namespace tgode {

enum class DatasetFormat { MovieLens, Amazon, Snapshot };

DatasetFormat parse_dataset_format(std::string_view name);
std::string_view to_string(DatasetFormat f);

// Every field has a value after parsing; `dataset` and `out` must be given
// explicitly, everything else falls back to the defaults below.
struct ExperimentConfig {
  std::filesystem::path dataset;
  DatasetFormat format = DatasetFormat::MovieLens;
  int k = 3;
  double eps = kDefaultOdeStep;
  std::size_t dim = 64;
  std::size_t time_dim = kDefaultTimeDim;
  double lr = 1e-3;
  double lambda = 1e-3;
  int epochs = 200;
  int patience = 20;
  std::size_t batch = 2048;
  std::uint64_t seed = 1;
  Variant variant = Variant::Full;
  SignalPolicy policy{};
  MaskMode mask_seen = MaskMode::TrainValid;
  bool per_user = false;
  double init_std = 0.1;
  std::filesystem::path out;
  std::string run_id;  // empty: derived from variant/policy/K/eps/seed
  bool timing = true;  // false writes wall_seconds = 0 for byte-stable CSVs

  ModelConfig model() const;
  TrainOptions train() const;
  EvalOptions eval() const;
  std::string label() const;
  // Canonical `key = value` text; parse_config(to_text()) reproduces *this.
  std::string to_text() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Named policy (origin, m1..m4) when one matches, else "<ode>-<attention>".
std::string policy_name(SignalPolicy p);

// Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Same syntax; a value may be a comma-separated list. Cells are the
// Cartesian product, with the first key varying slowest.
std::vector<ExperimentConfig> parse_grid(std::istream& in, const std::filesystem::path& base_dir = {});
std::vector<ExperimentConfig> load_grid(const std::filesystem::path& path);

std::uint64_t config_hash(const ExperimentConfig& config);

Dataset load_experiment_dataset(const ExperimentConfig& config);

struct MetricsRow {
  std::string run_id;
  std::string dataset;
  std::string variant;
  std::string policy;
  int k = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  int epoch = 0;
  std::string split;
  bool has_metrics = true;  // false leaves the metric columns empty
  double recall5 = 0.0;
  double recall10 = 0.0;
  double mrr = 0.0;
  double loss = 0.0;
  std::size_t nfe = 0;  // derivative evaluations per interval solve
  double wall_seconds = 0.0;
};

MetricsRow metrics_row(const ExperimentConfig& config, int epoch, std::string_view split);
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);

struct Checkpoint {
  ExperimentConfig config;
  int best_epoch = 0;
  double best_valid_mrr = 0.0;
  double best_loss = 0.0;
  std::size_t nfe = 0;  // per interval solve
  ModelParams params;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

// Versioned binary layout, see docs/checkpoint-format.md.
void write_checkpoint(const Checkpoint& ckpt, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

using LogSink = std::function<void(const std::string&)>;

struct RunResult {
  Checkpoint checkpoint;
  std::vector<MetricsRow> rows;  // one valid row per epoch, then the test row
  MetricsRow test;
  double wall_seconds = 0.0;
};

RunResult run_experiment(const ExperimentConfig& config, const Dataset& dataset,
                         const LogSink& log = {});

// Loads the dataset, trains, and writes <out>/metrics.csv and
// <out>/checkpoint.tgck.
RunResult train_experiment(const ExperimentConfig& config, const LogSink& log = {});

// One CSV row per cell (test split at the best epoch). A failing cell is
// written with split "failed" and empty metrics; the grid continues.
// Returns the number of failed cells.
std::size_t run_ablation(std::span<const ExperimentConfig> grid, std::ostream& csv,
                         const LogSink& log = {});

MetricSummary evaluate_checkpoint(const Checkpoint& ckpt, const Dataset& dataset, Split split);

// node_id,kind,layer,dim_0..dim_{d-1} for every snapshot 0..K.
void export_embeddings(const Checkpoint& ckpt, const Dataset& dataset, std::ostream& out);
// layer,user,item,edge_time,weight for every item -> user message.
void export_attention(const Checkpoint& ckpt, const Dataset& dataset, std::ostream& out);

}  // namespace tgode
