// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include "tgode/model.hpp"

#include <algorithm>
#include <string>

#include "tgode/error.hpp"

namespace tgode {

namespace {

std::string_view view_name(EdgeView v) {
  switch (v) {
    case EdgeView::Current:
      return "cur";
    case EdgeView::Previous:
      return "prev";
    case EdgeView::All:
      return "all";
  }
  return "?";
}

EdgeView parse_view(std::string_view s) {
  if (s == "cur" || s == "current") return EdgeView::Current;
  if (s == "prev" || s == "previous") return EdgeView::Previous;
  if (s == "all") return EdgeView::All;
  throw ParseError("unknown edge view '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Full:
      return "full";
    case Variant::Att:
      return "att";
    case Variant::Ode:
      return "ode";
    case Variant::Gcn:
      return "gcn";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "full") return Variant::Full;
  if (name == "att") return Variant::Att;
  if (name == "ode") return Variant::Ode;
  if (name == "gcn") return Variant::Gcn;
  throw ParseError("unknown variant '" + std::string(name) + "' (expected full|att|ode|gcn)");
}

std::string to_string(SignalPolicy p) {
  return std::string(view_name(p.ode)) + "-" + std::string(view_name(p.attention));
}

SignalPolicy parse_policy(std::string_view name) {
  if (name == "origin") return {EdgeView::Current, EdgeView::Previous};
  if (name == "m1") return {EdgeView::All, EdgeView::All};
  if (name == "m2") return {EdgeView::Current, EdgeView::Current};
  if (name == "m3") return {EdgeView::Previous, EdgeView::Current};
  if (name == "m4") return {EdgeView::Previous, EdgeView::Previous};
  const auto dash = name.find('-');
  if (dash == std::string_view::npos) {
    throw ParseError("unknown signal policy '" + std::string(name) + "'");
  }
  return {parse_view(name.substr(0, dash)), parse_view(name.substr(dash + 1))};
}

std::span<const TemporalEdge> view_edges(const HybridSystem& system, EdgeView view, int k) {
  if (k < 0 || k >= system.intervals()) throw Error("view_edges: interval out of range");
  const auto idx = static_cast<std::size_t>(k);
  switch (view) {
    case EdgeView::Current:
      return system.interval_edges[idx];
    case EdgeView::Previous:
      return system.cumulative_edges[idx];
    case EdgeView::All:
      return system.cumulative_edges.back();
  }
  return {};
}

ModelParams ModelParams::init(std::size_t num_nodes, int intervals, const ModelConfig& config,
                              std::uint64_t seed) {
  if (intervals < 1) throw Error("model: interval count must be >= 1");
  if (config.dim == 0) throw Error("model: embedding dimension must be positive");
  std::mt19937_64 rng(seed);
  ModelParams p;
  p.embeddings = Matrix(num_nodes, config.dim);
  std::normal_distribution<double> normal(0.0, config.init_std);
  for (double& v : p.embeddings.values()) v = normal(rng);
  for (int k = 0; k < intervals; ++k) {
    p.layers.push_back(AttentionLayerParams::init(config.dim, config.time_dim, rng));
  }
  p.time_encoder = TimeEncoder::log_spaced(config.time_dim);
  return p;
}

std::vector<Matrix*> ModelParams::tensors() {
  std::vector<Matrix*> out{&embeddings};
  for (auto& l : layers) {
    out.push_back(&l.alpha);
    out.push_back(&l.query);
    out.push_back(&l.key);
  }
  out.push_back(&time_encoder.frequencies);
  return out;
}

std::vector<const Matrix*> ModelParams::tensors() const {
  auto mut = const_cast<ModelParams*>(this)->tensors();
  return {mut.begin(), mut.end()};
}

LayerGraphs build_layer_graphs(const HybridSystem& system, std::size_t num_nodes,
                               const ModelConfig& config) {
  LayerGraphs g;
  g.num_nodes = num_nodes;
  for (int k = 0; k < system.intervals(); ++k) {
    const bool needs_ode = config.variant != Variant::Att;
    g.ode.push_back(needs_ode ? build_adjacency(view_edges(system, config.policy.ode, k), num_nodes)
                              : SparseAdjacency::zero(num_nodes));
    const auto attn = view_edges(system, config.policy.attention, k);
    if (config.variant == Variant::Full || config.variant == Variant::Att) {
      g.attention.push_back(build_message_graph(attn, num_nodes, system.scale));
    }
    if (config.variant == Variant::Gcn) {
      g.convolution.push_back(build_adjacency(attn, num_nodes));
    }
  }
  return g;
}

std::vector<Matrix> forward(const LayerGraphs& graphs, const ModelParams& params,
                            const ModelConfig& config, SolveStats* stats) {
  if (params.layers.size() != static_cast<std::size_t>(graphs.intervals())) {
    throw ShapeError("forward: parameter layers do not match interval count");
  }
  if (params.embeddings.rows() != graphs.num_nodes) {
    throw ShapeError("forward: embedding table does not match node count");
  }
  std::vector<Matrix> snapshots{params.embeddings};
  for (int k = 0; k < graphs.intervals(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const Matrix& h = snapshots.back();
    Matrix h_plus = h;
    if (config.variant != Variant::Att) {
      h_plus = rk4_solve(make_ode_problem(graphs.ode[idx], h, 1.0, config.step), stats);
    }
    Matrix next;
    switch (config.variant) {
      case Variant::Full:
      case Variant::Att:
        next = aggregate(h_plus, graphs.attention[idx], params.layers[idx], params.time_encoder);
        break;
      case Variant::Ode:
        next = std::move(h_plus);
        break;
      case Variant::Gcn:
        next = gcn_aggregate(h_plus, graphs.convolution[idx]);
        break;
    }
    snapshots.push_back(std::move(next));
  }
  return snapshots;
}

TapedForward forward(Tape& tape, const LayerGraphs& graphs, const ModelParams& params,
                     const ModelConfig& config, SolveStats* stats) {
  if (params.layers.size() != static_cast<std::size_t>(graphs.intervals())) {
    throw ShapeError("forward: parameter layers do not match interval count");
  }
  TapedForward f;
  for (const Matrix* m : params.tensors()) f.params.push_back(tape.parameter(*m));
  const Var frequencies = f.params.back();
  f.snapshots.push_back(f.params.front());
  for (int k = 0; k < graphs.intervals(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const Var h = f.snapshots.back();
    Var h_plus = h;
    if (config.variant != Variant::Att) {
      const SparseAdjacency& a = graphs.ode[idx];
      h_plus = ad::rk4_solve(a, h, ad::affinity_forcing(a, h), 1.0, config.step, stats);
    }
    Var next;
    switch (config.variant) {
      case Variant::Full:
      case Variant::Att:
        next = ad::aggregate(h_plus, graphs.attention[idx], f.params[1 + 3 * idx],
                             f.params[2 + 3 * idx], f.params[3 + 3 * idx], frequencies);
        break;
      case Variant::Ode:
        next = h_plus;
        break;
      case Variant::Gcn:
        next = ad::gcn_aggregate(h_plus, graphs.convolution[idx]);
        break;
    }
    f.snapshots.push_back(next);
  }
  f.representation = ad::mean(f.snapshots);
  return f;
}

Matrix final_representation(std::span<const Matrix> snapshots) {
  if (snapshots.empty()) throw Error("final_representation: no snapshots");
  Matrix out = snapshots.front();
  for (std::size_t k = 1; k < snapshots.size(); ++k) out += snapshots[k];
  out *= 1.0 / static_cast<double>(snapshots.size());
  return out;
}

double score(NodeId user, NodeId item, const Matrix& h) {
  if (user >= h.rows() || item >= h.rows()) throw Error("score: node id out of range");
  return dot(h.row(user), h.row(item));
}

double bpr_loss(std::span<const Triple> batch, const Matrix& h) {
  if (batch.empty()) throw Error("bpr_loss: empty batch");
  double loss = 0.0;
  for (const Triple& t : batch) {
    loss -= log_sigmoid(score(t.user, t.positive, h) - score(t.user, t.negative, h));
  }
  return loss;
}

namespace ad {

Var bpr_loss(Var h, std::span<const Triple> batch) {
  Tape& tape = *h.tape();
  Matrix loss(1, 1, tgode::bpr_loss(batch, h.value()));
  std::vector<Triple> saved(batch.begin(), batch.end());
  return tape.record(std::move(loss), {h},
                     [h, saved = std::move(saved), hv = h.value()](const Matrix& g, Tape& tp) {
                       Matrix& gh = tp.grad_buffer(h);
                       const std::size_t d = hv.cols();
                       for (const Triple& t : saved) {
                         const auto hu = hv.row(t.user);
                         const auto hi = hv.row(t.positive);
                         const auto hj = hv.row(t.negative);
                         const double x = dot(hu, hi) - dot(hu, hj);
                         // d/dx [-ln sigmoid(x)] = -sigmoid(-x)
                         const double c = -tgode::sigmoid(-x) * g[0];
                         auto gu = gh.row(t.user);
                         auto gi = gh.row(t.positive);
                         auto gj = gh.row(t.negative);
                         for (std::size_t k = 0; k < d; ++k) {
                           gu[k] += c * (hi[k] - hj[k]);
                           gi[k] += c * hu[k];
                           gj[k] -= c * hu[k];
                         }
                       }
                     });
}

}  // namespace ad

NegativeSampler::NegativeSampler(std::span<const TemporalEdge> train, std::size_t num_users,
                                 std::size_t num_items)
    : num_users_(num_users), num_items_(num_items), seen_(num_users) {
  for (const TemporalEdge& e : train) {
    if (e.user >= num_users) throw Error("negative sampler: user id out of range");
    seen_[e.user].push_back(e.item);
  }
  for (auto& items : seen_) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
}

bool NegativeSampler::interacted(NodeId user, NodeId item) const {
  const auto& s = seen_.at(user);
  return std::binary_search(s.begin(), s.end(), item);
}

NodeId NegativeSampler::sample(NodeId user, std::mt19937_64& rng) const {
  if (user >= num_users_) throw Error("negative sampler: user id out of range");
  if (seen_[user].size() >= num_items_) {
    throw Error("negative sampler: user " + std::to_string(user) + " interacted with every item");
  }
  std::uniform_int_distribution<std::size_t> pick(0, num_items_ - 1);
  while (true) {
    const auto item = static_cast<NodeId>(num_users_ + pick(rng));
    if (!interacted(user, item)) return item;
  }
}

}  // namespace tgode
