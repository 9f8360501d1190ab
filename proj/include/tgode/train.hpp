// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tgode/data.hpp"
#include "tgode/metrics.hpp"
#include "tgode/model.hpp"
#include "tgode/optimizer.hpp"

namespace tgode {

struct TrainOptions {
  int epochs = 200;
  int patience = 20;  // epochs without a better valid MRR before stopping
  std::size_t batch_size = 2048;
  AdamOptions adam{};
  std::uint64_t seed = 1;
  EvalOptions eval{};
};

struct EpochLog {
  int epoch = 0;       // 1-based
  double loss = 0.0;   // mean BPR loss per triple
  MetricSummary valid;
  std::size_t nfe = 0; // derivative evaluations of one forward pass
  double wall_seconds = 0.0;
};

struct FitResult {
  ModelParams params;  // parameters of the best-valid-MRR epoch
  int best_epoch = 0;
  double best_valid_mrr = -1.0;
  std::vector<EpochLog> log;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Full-pass BPR training with one freshly sampled negative per positive per
// epoch, shuffled into mini-batches. Throws NumericError naming the epoch
// when the loss diverges.
FitResult fit(const Dataset& dataset, const ModelConfig& config, const TrainOptions& options,
              const EpochCallback& on_epoch = {});

// One epoch's worth of (user, positive, negative) triples, shuffled.
std::vector<Triple> sample_epoch(std::span<const TemporalEdge> train, const NegativeSampler& sampler,
                                 std::mt19937_64& rng);

// Summed BPR loss of `batch` and its gradient for every tensor of `params`
// (ModelParams::tensors() order).
double loss_and_gradients(const LayerGraphs& graphs, const ModelParams& params,
                          const ModelConfig& config, std::span<const Triple> batch,
                          std::vector<Matrix>& grads, SolveStats* stats = nullptr);

// Mean-pooled representation after a plain (untaped) forward pass.
Matrix represent(const LayerGraphs& graphs, const ModelParams& params, const ModelConfig& config,
                 SolveStats* stats = nullptr);

}  // namespace tgode
