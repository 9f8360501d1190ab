// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include "tgode/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "tgode/error.hpp"

namespace tgode {

std::vector<Triple> sample_epoch(std::span<const TemporalEdge> train, const NegativeSampler& sampler,
                                 std::mt19937_64& rng) {
  std::vector<Triple> triples;
  triples.reserve(train.size());
  for (const TemporalEdge& e : train) triples.push_back({e.user, e.item, sampler.sample(e.user, rng)});
  std::shuffle(triples.begin(), triples.end(), rng);
  return triples;
}

double loss_and_gradients(const LayerGraphs& graphs, const ModelParams& params,
                          const ModelConfig& config, std::span<const Triple> batch,
                          std::vector<Matrix>& grads, SolveStats* stats) {
  Tape tape;
  const TapedForward f = forward(tape, graphs, params, config, stats);
  const Var loss = ad::bpr_loss(f.representation, batch);
  tape.backward(loss);
  grads.clear();
  for (Var p : f.params) grads.push_back(tape.grad(p));
  return loss.value()[0];
}

Matrix represent(const LayerGraphs& graphs, const ModelParams& params, const ModelConfig& config,
                 SolveStats* stats) {
  return final_representation(forward(graphs, params, config, stats));
}

FitResult fit(const Dataset& dataset, const ModelConfig& config, const TrainOptions& options,
              const EpochCallback& on_epoch) {
  if (options.batch_size == 0) throw Error("fit: batch size must be positive");
  const auto& train = dataset.split.train;
  const std::size_t n = dataset.log.num_nodes();
  const LayerGraphs graphs = build_layer_graphs(dataset.system, n, config);
  const NegativeSampler sampler(train, dataset.log.num_users, dataset.log.num_items);

  ModelParams params = ModelParams::init(n, dataset.system.intervals(), config, options.seed);
  AdamOptimizer optimizer(options.adam);
  // Separate streams so that changing the sampler never perturbs the
  // initialization and vice versa.
  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ull);

  FitResult result;
  result.params = params;
  int stale = 0;
  std::vector<Matrix> grads;
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<Triple> triples = sample_epoch(train, sampler, rng);
    EpochLog entry;
    entry.epoch = epoch;
    try {
      double total = 0.0;
      for (std::size_t lo = 0; lo < triples.size(); lo += options.batch_size) {
        const std::size_t hi = std::min(triples.size(), lo + options.batch_size);
        const std::span<const Triple> batch(triples.data() + lo, hi - lo);
        SolveStats stats;
        const double loss = loss_and_gradients(graphs, params, config, batch, grads, &stats);
        if (!std::isfinite(loss)) throw NumericError("non-finite loss");
        total += loss;
        entry.nfe = stats.nfe;
        auto tensors = params.tensors();
        optimizer.step(tensors, grads);
      }
      entry.loss = total / static_cast<double>(std::max<std::size_t>(triples.size(), 1));
      const Matrix h = represent(graphs, params, config);
      entry.valid = evaluate(h, dataset, Split::Valid, options.eval).summary;
    } catch (const NumericError& e) {
      throw NumericError("fit: divergence at epoch " + std::to_string(epoch) + ": " + e.what());
    }
    entry.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);

    if (entry.valid.mrr > result.best_valid_mrr) {
      result.best_valid_mrr = entry.valid.mrr;
      result.best_epoch = epoch;
      result.params = params;
      stale = 0;
    } else if (++stale >= options.patience) {
      break;
    }
  }
  return result;
}

}  // namespace tgode
