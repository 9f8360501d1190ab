// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0
//
// Autoregressive composition over the interval system: for k = 0..K-1
//
//     H+_k     = RK4 solve of the edge-evolving ODE from H_k over one unit
//     H_{k+1}  = temporal aggregation of H+_k with layer parameters k
//
// followed by mean pooling of the K+1 snapshots, inner-product scoring and
// the pairwise BPR objective.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgode/attention.hpp"
#include "tgode/data.hpp"
#include "tgode/matrix.hpp"
#include "tgode/ode.hpp"
#include "tgode/sparse.hpp"
#include "tgode/tape.hpp"

namespace tgode {

enum class Variant {
  Full,  // ODE evolution + temporal attention
  Att,   // attention only, no ODE
  Ode,   // ODE only, no aggregation
  Gcn,   // ODE + plain normalized convolution
};

// Which interactions a module sees at layer k.
enum class EdgeView {
  Current,   // interval k only
  Previous,  // intervals 0..k
  All,       // every training interaction
};

struct SignalPolicy {
  EdgeView ode = EdgeView::Current;
  EdgeView attention = EdgeView::Previous;

  friend bool operator==(const SignalPolicy&, const SignalPolicy&) = default;
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);
// "cur-prev" style; the named presets origin and m1..m4 are accepted too.
std::string to_string(SignalPolicy p);
SignalPolicy parse_policy(std::string_view name);

std::span<const TemporalEdge> view_edges(const HybridSystem& system, EdgeView view, int k);

struct ModelConfig {
  std::size_t dim = 64;
  std::size_t time_dim = kDefaultTimeDim;
  double step = kDefaultOdeStep;
  double init_std = 0.1;
  Variant variant = Variant::Full;
  SignalPolicy policy{};
};

struct ModelParams {
  Matrix embeddings;  // |V| x d, the initial state H_0
  std::vector<AttentionLayerParams> layers;
  TimeEncoder time_encoder;

  // N(0, init_std^2) embeddings; per-layer attention parameters as in
  // AttentionLayerParams::init; log-spaced frequencies.
  static ModelParams init(std::size_t num_nodes, int intervals, const ModelConfig& config,
                          std::uint64_t seed);

  // Stable flat order: embeddings, (alpha, W_Q, W_K) per layer, frequencies.
  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Graphs consumed by each layer, built once per (system, policy, variant).
struct LayerGraphs {
  std::size_t num_nodes = 0;
  std::vector<SparseAdjacency> ode;
  std::vector<MessageGraph> attention;
  std::vector<SparseAdjacency> convolution;

  int intervals() const noexcept { return static_cast<int>(ode.size()); }
};

LayerGraphs build_layer_graphs(const HybridSystem& system, std::size_t num_nodes,
                               const ModelConfig& config);

// Snapshots H_0 .. H_K. `stats` accumulates solver work.
std::vector<Matrix> forward(const LayerGraphs& graphs, const ModelParams& params,
                            const ModelConfig& config, SolveStats* stats = nullptr);

// Mean over the K+1 snapshots.
Matrix final_representation(std::span<const Matrix> snapshots);

double score(NodeId user, NodeId item, const Matrix& h);

struct Triple {
  NodeId user = 0;
  NodeId positive = 0;
  NodeId negative = 0;
};

// sum over triples of -ln sigmoid(y_ui - y_uj).
double bpr_loss(std::span<const Triple> batch, const Matrix& h);

// Everything the tape needs to differentiate one forward pass.
struct TapedForward {
  std::vector<Var> params;  // same order as ModelParams::tensors()
  std::vector<Var> snapshots;
  Var representation;
};

TapedForward forward(Tape& tape, const LayerGraphs& graphs, const ModelParams& params,
                     const ModelConfig& config, SolveStats* stats = nullptr);

namespace ad {
Var bpr_loss(Var h, std::span<const Triple> batch);
}

// Uniform negatives over the items a user never interacted with in train,
// by rejection sampling.
class NegativeSampler {
 public:
  NegativeSampler(std::span<const TemporalEdge> train, std::size_t num_users,
                  std::size_t num_items);

  NodeId sample(NodeId user, std::mt19937_64& rng) const;
  bool interacted(NodeId user, NodeId item) const;

 private:
  std::size_t num_users_;
  std::size_t num_items_;
  std::vector<std::vector<NodeId>> seen_;  // sorted item node ids per user
};

}  // namespace tgode
