// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0
//
// Temporal aggregation: per-edge sigmoid attention over an interaction
// graph, conditioned on a trainable cos/sin time encoding and weighted by
// the symmetric Laplacian factor 1/sqrt(|N_i| |N_j|).

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tgode/data.hpp"
#include "tgode/matrix.hpp"
#include "tgode/sparse.hpp"
#include "tgode/tape.hpp"

namespace tgode {

inline constexpr std::size_t kDefaultTimeDim = 16;

// Frequencies omega_1..omega_dT, stored as a 1 x dT matrix so they can be
// trained like any other parameter.
struct TimeEncoder {
  Matrix frequencies;

  // omega_i = 10^{-(i-1) * 4 / (dT - 1)}; a single frequency is 1.
  static TimeEncoder log_spaced(std::size_t time_dim);

  std::size_t time_dim() const noexcept { return frequencies.cols(); }
  std::size_t output_dim() const noexcept { return 2 * frequencies.cols(); }

  friend bool operator==(const TimeEncoder&, const TimeEncoder&) = default;
};

// sqrt(1/dT) [cos(w1 t), sin(w1 t), ..., cos(w_dT t), sin(w_dT t)].
std::vector<double> encode_time(double t, const TimeEncoder& encoder);
std::vector<double> encode_time(double t, std::span<const double> frequencies);

// Parameters of one aggregation layer. `alpha` is laid out to match
// concat(W_Q h_i ; Phi(t) ; W_K h_j): [d query | 2 dT time | d key].
struct AttentionLayerParams {
  Matrix alpha;  // 1 x (2d + 2dT)
  Matrix query;  // d x d
  Matrix key;    // d x d

  // W_Q, W_K ~ U(-sqrt(6/(2d)), +sqrt(6/(2d))); alpha = 0.
  static AttentionLayerParams init(std::size_t dim, std::size_t time_dim, std::mt19937_64& rng);

  std::size_t dim() const noexcept { return query.rows(); }

  friend bool operator==(const AttentionLayerParams&, const AttentionLayerParams&) = default;
};

// pi = sigmoid(alpha^T concat(W_Q h_i ; Phi(t) ; W_K h_j)).
double attention_weight(std::span<const double> h_i, std::span<const double> h_j, double t,
                        const AttentionLayerParams& params, const TimeEncoder& encoder);

// Directed messages grouped by destination. Each interaction (u, i, t)
// yields u <- i and i <- u; repeated interactions of a pair each carry their
// own time while the Laplacian factor uses distinct-neighbor degrees.
struct MessageGraph {
  std::size_t n = 0;
  std::vector<std::size_t> offsets{0};  // by destination
  std::vector<NodeId> source;
  std::vector<double> time;  // normalized interaction time
  std::vector<double> norm;  // 1 / sqrt(|N_dst| |N_src|)
  // Distinct message times, ascending; time_slot[e] indexes into it so the
  // encoding is evaluated once per distinct time.
  std::vector<double> distinct_times;
  std::vector<std::uint32_t> time_slot;

  std::size_t messages() const noexcept { return source.size(); }
  bool isolated(std::size_t v) const noexcept { return offsets[v] == offsets[v + 1]; }
};

MessageGraph build_message_graph(std::span<const TemporalEdge> edges, std::size_t n,
                                 const TimeScale& scale);

// h_i = sum_{messages j -> i} norm * pi * h_j+, isolated nodes pass through.
// When `weights` is given it receives pi per message in graph order.
Matrix aggregate(const Matrix& h_plus, const MessageGraph& graph, const AttentionLayerParams& params,
                 const TimeEncoder& encoder, std::vector<double>* weights = nullptr);

// h = A h+ over a structural adjacency, isolated nodes pass through.
Matrix gcn_aggregate(const Matrix& h_plus, const SparseAdjacency& a);

namespace ad {

// Differentiable aggregate(); gradients flow to h+, alpha, W_Q, W_K and the
// frequencies. `graph` must outlive backward().
Var aggregate(Var h_plus, const MessageGraph& graph, Var alpha, Var query, Var key,
              Var frequencies);

Var gcn_aggregate(Var h_plus, const SparseAdjacency& a);

}  // namespace ad

}  // namespace tgode
