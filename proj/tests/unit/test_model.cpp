// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "tgode/error.hpp"
#include "tgode/model.hpp"
#include "tgode/train.hpp"
#include "toy.hpp"

using namespace tgode;

namespace {

ModelConfig small_config(Variant v, std::size_t d = 4, std::size_t dt = 2) {
  ModelConfig c;
  c.dim = d;
  c.time_dim = dt;
  c.variant = v;
  return c;
}

void randomize(ModelParams& p, std::mt19937_64& rng) {
  for (Matrix* m : p.tensors()) {
    if (m == &p.time_encoder.frequencies) {
      *m = oracle::random_matrix(m->rows(), m->cols(), rng, 0.2, 2.0);
    } else {
      *m = oracle::random_matrix(m->rows(), m->cols(), rng, -0.6, 0.6);
    }
  }
}

}  // namespace

TEST_CASE("policy and variant names") {
  CHECK(parse_policy("origin") == SignalPolicy{EdgeView::Current, EdgeView::Previous});
  CHECK(parse_policy("m1") == SignalPolicy{EdgeView::All, EdgeView::All});
  CHECK(parse_policy("m2") == SignalPolicy{EdgeView::Current, EdgeView::Current});
  CHECK(parse_policy("m3") == SignalPolicy{EdgeView::Previous, EdgeView::Current});
  CHECK(parse_policy("m4") == SignalPolicy{EdgeView::Previous, EdgeView::Previous});
  CHECK(parse_policy("all-cur") == SignalPolicy{EdgeView::All, EdgeView::Current});
  CHECK(to_string(parse_policy("origin")) == "cur-prev");
  CHECK_THROWS_AS(parse_policy("m9"), ParseError);
  for (auto v : {Variant::Full, Variant::Att, Variant::Ode, Variant::Gcn}) CHECK(parse_variant(to_string(v)) == v);
  CHECK_THROWS_AS(parse_variant("lstm"), ParseError);
}

TEST_CASE("edge views") {
  const auto d = toy::planted_blocks(3);
  const auto& s = d.system;
  CHECK(view_edges(s, EdgeView::Current, 1).size() == s.interval_edges[1].size());
  CHECK(view_edges(s, EdgeView::Previous, 1).size() == s.interval_edges[0].size() + s.interval_edges[1].size());
  CHECK(view_edges(s, EdgeView::All, 0).size() == d.split.train.size());
  CHECK_THROWS(view_edges(s, EdgeView::Current, 3));
}

TEST_CASE("forward: ODE variant with A = 0 decays by e^-1") {
  std::mt19937_64 rng(1);
  LayerGraphs g;
  g.num_nodes = 3;
  g.ode.push_back(SparseAdjacency::zero(3));
  const auto cfg = small_config(Variant::Ode);
  auto p = ModelParams::init(3, 1, cfg, 7);
  const auto snaps = forward(g, p, cfg);
  REQUIRE(snaps.size() == 2);
  for (std::size_t i = 0; i < p.embeddings.size(); ++i) {
    CHECK(snaps[1][i] == doctest::Approx(std::exp(-1.0) * p.embeddings[i]).epsilon(1e-6));
  }
}

TEST_CASE("forward: ATT variant with no edges is the identity") {
  LayerGraphs g;
  g.num_nodes = 3;
  g.ode.push_back(SparseAdjacency::zero(3));
  g.attention.push_back(build_message_graph({}, 3, TimeScale{0, 1, 1}));
  const auto cfg = small_config(Variant::Att);
  const auto p = ModelParams::init(3, 1, cfg, 7);
  const auto snaps = forward(g, p, cfg);
  CHECK(snaps[1] == p.embeddings);
}

TEST_CASE("forward: K=2 Full equals a hand-composed chain") {
  // 1 user, 2 items; interval 0 holds (0,1), interval 1 holds (0,2).
  InteractionLog log;
  log.num_users = 1;
  log.num_items = 2;
  toy::name_nodes(log);
  std::vector<TemporalEdge> train{{0, 1, 0}, {0, 1, 3}, {0, 2, 6}, {0, 2, 10}};
  const auto sys = build_hybrid_system(train, 2);
  const auto cfg = small_config(Variant::Full, 3, 2);
  std::mt19937_64 rng(2);
  auto p = ModelParams::init(3, 2, cfg, 5);
  randomize(p, rng);
  const auto graphs = build_layer_graphs(sys, 3, cfg);
  const auto snaps = forward(graphs, p, cfg);

  // Oracle chain: analytical ODE on interval-k edges (tolerance covers
  // RK4 truncation) then brute-force attention on edges with t < tau_{k+1}.
  Matrix h = p.embeddings;
  for (int k = 0; k < 2; ++k) {
    std::vector<TemporalEdge> cur, prev;
    for (const auto& e : train) {
      const int iv = sys.scale.interval_of(e.timestamp);
      if (iv == k) cur.push_back(e);
      if (iv <= k) prev.push_back(e);
    }
    const Eigen::MatrixXd a = oracle::normalized_adjacency(cur, 3);
    const Eigen::MatrixXd eh = oracle::to_eigen(h);
    const Matrix b = oracle::from_eigen(a * eh.cwiseProduct(eh));
    const Matrix hp = oracle::analytical_solve(a, h, b, 1.0);
    const Eigen::MatrixXd lap = oracle::normalized_adjacency(prev, 3);
    const Eigen::MatrixXd ehp = oracle::to_eigen(hp);
    const auto& layer = p.layers[k];
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(3, 3);
    for (const auto& e : prev) {
      const double t = sys.scale.normalize(e.timestamp);
      for (auto [i, j] : {std::pair{e.user, e.item}, std::pair{e.item, e.user}}) {
        const double pi = attention_weight(hp.row(i), hp.row(j), t, layer, p.time_encoder);
        next.row(i) += lap(i, j) * pi * ehp.row(j);
      }
    }
    // Nodes without any message keep their evolved state.
    for (Eigen::Index v = 0; v < 3; ++v) {
      if (lap.row(v).isZero()) next.row(v) = ehp.row(v);
    }
    h = oracle::from_eigen(next);
    CHECK(max_abs_diff(snaps[k + 1], h) <= 1e-4);
    h = snaps[k + 1];  // keep the chains aligned
  }
}

TEST_CASE("final representation and score") {
  const Matrix x{{1, 2}, {3, 4}};
  const std::vector<Matrix> same{x, x, x};
  CHECK(final_representation(same) == x);
  const std::vector<Matrix> two{x, 3.0 * x};
  CHECK(final_representation(two) == 2.0 * x);
  CHECK_THROWS(final_representation(std::vector<Matrix>{}));

  const Matrix h{{1, 2}, {3, -1}, {-2, 1}, {1, 0}};
  CHECK(score(0, 1, h) == 1.0);
  CHECK(score(0, 2, h) == 0.0);
  CHECK(score(3, 3, h) == 1.0);
  CHECK_THROWS(score(0, 4, h));
}

TEST_CASE("ranking is invariant to a positive global scale") {
  std::mt19937_64 rng(3);
  const std::size_t users = 6, items = 15;
  const Matrix h = oracle::random_matrix(users + items, 5, rng);
  auto argsort = [&](const Matrix& rep, std::size_t u) {
    std::vector<std::size_t> idx(items);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
      return score(static_cast<NodeId>(u), static_cast<NodeId>(users + a), rep) >
             score(static_cast<NodeId>(u), static_cast<NodeId>(users + b), rep);
    });
    return idx;
  };
  for (double c : {1.0 / 3.0, 0.25, 7.5}) {  // K vs K+1 for K=3, and arbitrary c
    for (std::size_t u = 0; u < users; ++u) CHECK(argsort(h, u) == argsort(c * h, u));
  }
}

TEST_CASE("bpr loss") {
  const Matrix h{{1, 0}, {1, 0}, {1, 0}, {100, 0}, {-100, 0}};
  const std::vector<Triple> tie{{0, 1, 2}};
  CHECK(bpr_loss(tie, h) == doctest::Approx(0.6931472).epsilon(1e-7));
  const std::vector<Triple> two{{0, 1, 2}, {0, 2, 1}};
  CHECK(bpr_loss(two, h) == doctest::Approx(1.3862944).epsilon(1e-7));
  const std::vector<Triple> wide{{0, 3, 4}};
  CHECK(bpr_loss(wide, h) < 1e-80);
  CHECK(bpr_loss(std::vector<Triple>{{0, 4, 3}}, h) == doctest::Approx(200.0));
  CHECK_THROWS(bpr_loss(std::span<const Triple>{}, h));
}

TEST_CASE("negative sampler") {
  const std::vector<TemporalEdge> train{{0, 2, 0}, {1, 2, 0}, {1, 3, 0}};
  const NegativeSampler s(train, 2, 2);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) CHECK(s.sample(0, rng) == 3);
  CHECK_THROWS(s.sample(1, rng));
  CHECK(s.interacted(1, 3));
  CHECK_FALSE(s.interacted(0, 3));

  std::mt19937_64 a(9), b(9);
  for (int i = 0; i < 20; ++i) CHECK(s.sample(0, a) == s.sample(0, b));
}

TEST_CASE("negative sampler is uniform over non-interacted items") {
  // 7 items, user saw 2 of them; the other 5 should be uniform.
  const std::vector<TemporalEdge> train{{0, 1, 0}, {0, 4, 0}};
  const NegativeSampler s(train, 1, 7);
  std::mt19937_64 rng(12345);
  std::map<NodeId, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[s.sample(0, rng)];
  REQUIRE(counts.size() == 5);
  CHECK(counts.count(1) == 0);
  CHECK(counts.count(4) == 0);
  double chi2 = 0.0;
  const double expect = draws / 5.0;
  for (auto [item, c] : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 13.2767);  // chi-square critical value, 4 dof, p = 0.01
}

TEST_CASE("autoregression causality under the origin policy") {
  auto base = toy::random_log(6, 9, 80, 31);
  const auto sys_a = build_hybrid_system(base.edges, 3);
  // Move one edge inside the last interval to another item.
  auto edges = base.edges;
  std::size_t moved = 0;
  for (auto& e : edges) {
    if (sys_a.scale.interval_of(e.timestamp) == 2 && e.timestamp < sys_a.scale.t_max) {
      e.item = static_cast<NodeId>(6 + (e.item - 6 + 1) % 9);
      ++moved;
      break;
    }
  }
  REQUIRE(moved == 1);
  const auto sys_b = build_hybrid_system(edges, 3);
  REQUIRE(sys_b.scale == sys_a.scale);
  const auto cfg = small_config(Variant::Full);
  std::mt19937_64 rng(6);
  auto p = ModelParams::init(15, 3, cfg, 1);
  randomize(p, rng);
  const auto sa = forward(build_layer_graphs(sys_a, 15, cfg), p, cfg);
  const auto sb = forward(build_layer_graphs(sys_b, 15, cfg), p, cfg);
  CHECK(sa[0] == sb[0]);
  CHECK(sa[1] == sb[1]);
  CHECK(sa[2] == sb[2]);
  CHECK(sa[3] != sb[3]);
}

TEST_CASE("Full with saturated attention reproduces GCN") {
  // W_Q = W_K = 0 and omega = 0 make the logit alpha_t . Phi constant; a
  // large alpha on the cosine slots drives every weight to 1.
  const auto log = toy::random_log(5, 7, 14, 8);
  std::vector<TemporalEdge> unique;
  for (const auto& e : log.edges) {
    bool dup = false;
    for (const auto& u : unique) dup = dup || (u.user == e.user && u.item == e.item);
    if (!dup) unique.push_back(e);
  }
  const auto sys = build_hybrid_system(unique, 2);
  auto full = small_config(Variant::Full, 4, 4);
  auto gcn = small_config(Variant::Gcn, 4, 4);
  auto p = ModelParams::init(12, 2, full, 3);
  for (auto& l : p.layers) {
    for (double& v : l.query.values()) v = 0.0;
    for (double& v : l.key.values()) v = 0.0;
    for (std::size_t m = 0; m < 4; ++m) l.alpha[4 + 2 * m] = 40.0;
  }
  for (double& w : p.time_encoder.frequencies.values()) w = 0.0;
  const auto a = forward(build_layer_graphs(sys, 12, full), p, full);
  const auto b = forward(build_layer_graphs(sys, 12, gcn), p, gcn);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(max_abs_diff(a[k], b[k]) <= 1e-8);
}

TEST_CASE("end-to-end gradient check on a small instance") {
  const auto log = toy::random_log(3, 6, 10, 77);
  const auto sys = build_hybrid_system(log.edges, 2);
  for (Variant v : {Variant::Full, Variant::Att, Variant::Ode, Variant::Gcn}) {
    auto cfg = small_config(v, 3, 2);
    cfg.step = 0.5;
    std::mt19937_64 rng(55);
    auto p = ModelParams::init(9, 2, cfg, 4);
    randomize(p, rng);
    const auto graphs = build_layer_graphs(sys, 9, cfg);
    const NegativeSampler sampler(log.edges, 3, 6);
    std::mt19937_64 srng(1);
    const auto batch = sample_epoch(log.edges, sampler, srng);
    std::vector<Matrix> grads;
    loss_and_gradients(graphs, p, cfg, batch, grads);
    auto loss = [&] { return bpr_loss(batch, represent(graphs, p, cfg)); };
    auto tensors = p.tensors();
    REQUIRE(grads.size() == tensors.size());
    for (std::size_t t = 0; t < tensors.size(); ++t) {
      for (std::size_t i = 0; i < tensors[t]->size(); ++i) {
        CHECK(oracle::grad_rel_error(grads[t][i], oracle::central_difference(*tensors[t], i, loss)) <= 1e-4);
      }
    }
  }
}

TEST_CASE("training separates a positive from a negative") {
  // 1 user, 2 items, the user only ever picks item 1.
  LayerGraphs g;
  g.num_nodes = 3;
  const std::vector<TemporalEdge> train{{0, 1, 0}, {0, 1, 5}};
  const TimeScale scale{0, 5, 1};
  g.ode.push_back(build_adjacency(train, 3));
  g.attention.push_back(build_message_graph(train, 3, scale));
  const auto cfg = small_config(Variant::Full);
  auto p = ModelParams::init(3, 1, cfg, 11);
  AdamOptimizer opt;
  const std::vector<Triple> batch{{0, 1, 2}};
  std::vector<Matrix> grads;
  for (int i = 0; i < 300; ++i) {
    loss_and_gradients(g, p, cfg, batch, grads);
    auto t = p.tensors();
    opt.step(t, grads);
  }
  const Matrix h = represent(g, p, cfg);
  CHECK(score(0, 1, h) > score(0, 2, h));
}

TEST_CASE("fit is deterministic and selects the best valid epoch") {
  const auto d = prepare_dataset(toy::random_log(12, 15, 200, 5), 2);
  ModelConfig cfg = small_config(Variant::Full, 8, 2);
  TrainOptions o;
  o.epochs = 6;
  o.patience = 3;
  o.batch_size = 64;
  o.seed = 21;
  const auto a = fit(d, cfg, o);
  const auto b = fit(d, cfg, o);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].loss == b.log[i].loss);
    CHECK(a.log[i].valid.mrr == b.log[i].valid.mrr);
    CHECK(a.log[i].nfe == 40);
  }
  CHECK(a.params == b.params);
  double best = -1.0;
  int best_epoch = 0;
  for (const auto& e : a.log) {
    if (e.valid.mrr > best) {
      best = e.valid.mrr;
      best_epoch = e.epoch;
    }
  }
  CHECK(a.best_epoch == best_epoch);
  CHECK(a.best_valid_mrr == best);
}

TEST_CASE("fit aborts on divergence with the epoch index") {
  const auto d = prepare_dataset(toy::random_log(12, 15, 200, 5), 2);
  TrainOptions o;
  o.epochs = 3;
  o.adam.learning_rate = 1e200;
  try {
    fit(d, small_config(Variant::Full), o);
    FAIL("expected divergence");
  } catch (const NumericError& e) {
    INFO(std::string(e.what()));
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}
