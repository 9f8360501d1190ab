// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "tgode/attention.hpp"
#include "tgode/error.hpp"

using namespace tgode;

namespace {

double inner(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Identity time scale so normalized time equals the raw timestamp.
TimeScale unit_scale(int k = 100) { return TimeScale{0, k, k}; }

AttentionLayerParams random_params(std::size_t d, std::size_t dt, std::mt19937_64& rng) {
  AttentionLayerParams p = AttentionLayerParams::init(d, dt, rng);
  p.alpha = oracle::random_matrix(1, 2 * d + 2 * dt, rng);
  return p;
}

// pi from the literal concat formula, with its own time features.
double oracle_weight(const Eigen::VectorXd& hi, const Eigen::VectorXd& hj, double t,
                     const AttentionLayerParams& p, const Matrix& omega) {
  const auto d = hi.size();
  const auto dt = static_cast<Eigen::Index>(omega.cols());
  Eigen::VectorXd z(2 * d + 2 * dt);
  z.head(d) = oracle::to_eigen(p.query) * hi;
  for (Eigen::Index m = 0; m < dt; ++m) {
    z(d + 2 * m) = std::cos(omega[m] * t) / std::sqrt(static_cast<double>(dt));
    z(d + 2 * m + 1) = std::sin(omega[m] * t) / std::sqrt(static_cast<double>(dt));
  }
  z.tail(d) = oracle::to_eigen(p.key) * hj;
  const double x = oracle::to_eigen(p.alpha).row(0).dot(z);
  return 1.0 / (1.0 + std::exp(-x));
}

// Brute force over the edge list, both directions, distinct-neighbor degrees.
Matrix oracle_aggregate(const Matrix& h, const std::vector<TemporalEdge>& edges, double t_scale,
                        const AttentionLayerParams& p, const Matrix& omega) {
  const std::size_t n = h.rows();
  std::vector<std::set<NodeId>> nbrs(n);
  for (const auto& e : edges) {
    nbrs[e.user].insert(e.item);
    nbrs[e.item].insert(e.user);
  }
  const Eigen::MatrixXd eh = oracle::to_eigen(h);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, h.cols());
  for (const auto& e : edges) {
    const double t = static_cast<double>(e.timestamp) * t_scale;
    for (auto [i, j] : {std::pair{e.user, e.item}, std::pair{e.item, e.user}}) {
      const double norm = 1.0 / std::sqrt(static_cast<double>(nbrs[i].size() * nbrs[j].size()));
      const double pi = oracle_weight(eh.row(i), eh.row(j), t, p, omega);
      out.row(i) += norm * pi * eh.row(j);
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (nbrs[v].empty()) out.row(v) = eh.row(v);
  return oracle::from_eigen(out);
}

}  // namespace

TEST_CASE("time encoding basics") {
  const auto enc = TimeEncoder::log_spaced(16);
  CHECK(enc.time_dim() == 16);
  CHECK(enc.output_dim() == 32);
  CHECK(enc.frequencies[0] == 1.0);
  CHECK(enc.frequencies[15] == doctest::Approx(1e-4).epsilon(1e-12));
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(enc.frequencies[i] == doctest::Approx(std::pow(10.0, -4.0 * i / 15.0)).epsilon(1e-14));
  }
  const auto phi0 = encode_time(0.0, enc);
  REQUIRE(phi0.size() == 32);
  for (std::size_t m = 0; m < 16; ++m) {
    CHECK(phi0[2 * m] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(phi0[2 * m + 1] == 0.0);
  }
  CHECK(TimeEncoder::log_spaced(1).frequencies[0] == 1.0);
  CHECK_THROWS(TimeEncoder::log_spaced(0));
}

TEST_CASE("time encoding unit norm and kernel translation invariance") {
  const auto enc = TimeEncoder::log_spaced(16);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 200; ++i) {
    const double t1 = u(rng), t2 = u(rng), c = u(rng);
    const auto a = encode_time(t1, enc), b = encode_time(t2, enc);
    CHECK(std::abs(inner(a, a) - 1.0) <= 1e-12);
    CHECK(std::abs(inner(a, b) - inner(encode_time(t1 + c, enc), encode_time(t2 + c, enc))) <= 1e-9);
  }
}

TEST_CASE("single-frequency kernel at pi") {
  const std::vector<double> omega{std::numbers::pi};
  CHECK(inner(encode_time(1.0, omega), encode_time(0.0, omega)) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("attention weight") {
  std::mt19937_64 rng(5);
  const auto enc = TimeEncoder::log_spaced(4);
  auto p = AttentionLayerParams::init(3, 4, rng);
  CHECK(p.alpha.cols() == 14);
  const Matrix h = oracle::random_matrix(2, 3, rng);
  CHECK(attention_weight(h.row(0), h.row(1), 0.7, p, enc) == 0.5);
  for (int i = 0; i < 50; ++i) {
    p = random_params(3, 4, rng);
    const Matrix x = oracle::random_matrix(2, 3, rng, -3, 3);
    const double w = attention_weight(x.row(0), x.row(1), 1.3, p, enc);
    CHECK(w > 0.0);
    CHECK(w < 1.0);
    const auto ex = oracle::to_eigen(x);
    CHECK(w == doctest::Approx(oracle_weight(ex.row(0), ex.row(1), 1.3, p, enc.frequencies)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(attention_weight(h.row(0), std::vector<double>{1.0}, 0.0, p, enc), ShapeError);
}

TEST_CASE("init scaling") {
  std::mt19937_64 rng(1);
  const auto p = AttentionLayerParams::init(8, 2, rng);
  const double bound = std::sqrt(6.0 / 16.0);
  for (double v : p.query.values()) CHECK(std::abs(v) <= bound);
  for (double v : p.key.values()) CHECK(std::abs(v) <= bound);
  for (double v : p.alpha.values()) CHECK(v == 0.0);
}

TEST_CASE("aggregate: empty edges are the identity") {
  std::mt19937_64 rng(2);
  const Matrix h = oracle::random_matrix(4, 3, rng);
  const auto g = build_message_graph({}, 4, unit_scale());
  CHECK(aggregate(h, g, random_params(3, 2, rng), TimeEncoder::log_spaced(2)) == h);
}

TEST_CASE("aggregate: one edge with alpha = 0") {
  std::mt19937_64 rng(3);
  const Matrix h = oracle::random_matrix(2, 3, rng);
  const auto g = build_message_graph(std::vector<TemporalEdge>{{0, 1, 5}}, 2, unit_scale());
  const auto p = AttentionLayerParams::init(3, 2, rng);
  const Matrix out = aggregate(h, g, p, TimeEncoder::log_spaced(2));
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(out(0, c) == 0.5 * h(1, c));
    CHECK(out(1, c) == 0.5 * h(0, c));
  }
}

TEST_CASE("aggregate: duplicate timestamped edges both contribute") {
  std::mt19937_64 rng(4);
  const Matrix h = oracle::random_matrix(2, 3, rng);
  const auto enc = TimeEncoder::log_spaced(2);
  const auto p = random_params(3, 2, rng);
  const std::vector<TemporalEdge> edges{{0, 1, 10}, {0, 1, 40}};
  const auto g = build_message_graph(edges, 2, unit_scale());
  CHECK(g.messages() == 4);
  for (double n : g.norm) CHECK(n == 1.0);
  std::vector<double> pi;
  const Matrix out = aggregate(h, g, p, enc, &pi);
  const double p1 = attention_weight(h.row(0), h.row(1), 10.0, p, enc);
  const double p2 = attention_weight(h.row(0), h.row(1), 40.0, p, enc);
  for (std::size_t c = 0; c < 3; ++c) CHECK(out(0, c) == doctest::Approx((p1 + p2) * h(1, c)).epsilon(1e-14));
  CHECK(max_abs_diff(out, oracle_aggregate(h, edges, 1.0, p, enc.frequencies)) <= 1e-14);
}

TEST_CASE("aggregate matches the brute-force oracle on random graphs") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nu = 3 + trial % 4, ni = 4 + trial % 5, n = nu + ni;
    const auto edges = oracle::random_edges(nu, ni, 6 + trial, rng, 100);
    const Matrix h = oracle::random_matrix(n, 4, rng);
    auto enc = TimeEncoder::log_spaced(3);
    enc.frequencies = oracle::random_matrix(1, 3, rng, 0.0, 2.0);
    const auto p = random_params(4, 3, rng);
    const TimeScale scale{0, 100, 2};  // tau = t / 50
    const auto g = build_message_graph(edges, n, scale);
    std::vector<double> pi;
    const Matrix out = aggregate(h, g, p, enc, &pi);
    CHECK(max_abs_diff(out, oracle_aggregate(h, edges, 2.0 / 100.0, p, enc.frequencies)) <= 1e-13);
    for (double w : pi) {
      CHECK(w > 0.0);
      CHECK(w < 1.0);
    }
    // Laplacian factors recomputed independently.
    const Eigen::MatrixXd lap = oracle::normalized_adjacency(edges, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t e = g.offsets[i]; e < g.offsets[i + 1]; ++e)
        CHECK(g.norm[e] == doctest::Approx(lap(i, g.source[e])).epsilon(1e-15));
  }
}

TEST_CASE("aggregate is local") {
  std::mt19937_64 rng(13);
  const std::size_t nu = 5, ni = 6, n = nu + ni;
  const auto edges = oracle::random_edges(nu, ni, 12, rng, 100);
  const auto g = build_message_graph(edges, n, unit_scale());
  const auto p = random_params(3, 2, rng);
  const auto enc = TimeEncoder::log_spaced(2);
  const Matrix h = oracle::random_matrix(n, 3, rng);
  const Matrix base = aggregate(h, g, p, enc);
  for (std::size_t j = 0; j < n; ++j) {
    Matrix bumped = h;
    for (std::size_t c = 0; c < 3; ++c) bumped(j, c) += 0.37;
    const Matrix out = aggregate(bumped, g, p, enc);
    for (std::size_t i = 0; i < n; ++i) {
      bool neighbor = i == j;
      for (std::size_t e = g.offsets[i]; e < g.offsets[i + 1]; ++e) neighbor = neighbor || g.source[e] == j;
      if (!neighbor) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(out(i, c) == base(i, c));
      }
    }
  }
}

TEST_CASE("message graph validation") {
  CHECK_THROWS_AS(build_message_graph(std::vector<TemporalEdge>{{0, 7, 1}}, 3, unit_scale()), Error);
  std::mt19937_64 rng(1);
  const auto g = build_message_graph(std::vector<TemporalEdge>{{0, 1, 1}}, 2, unit_scale());
  CHECK_THROWS_AS(aggregate(Matrix(3, 2), g, AttentionLayerParams::init(2, 1, rng), TimeEncoder::log_spaced(1)),
                  ShapeError);
  CHECK_THROWS_AS(aggregate(Matrix(2, 2), g, AttentionLayerParams::init(3, 1, rng), TimeEncoder::log_spaced(1)),
                  ShapeError);
}

TEST_CASE("gcn aggregate keeps isolated nodes") {
  const auto a = build_adjacency(std::vector<TemporalEdge>{{0, 1, 0}}, 3);
  const Matrix h{{1, 2}, {3, 4}, {5, 6}};
  CHECK(gcn_aggregate(h, a) == Matrix{{3, 4}, {1, 2}, {5, 6}});
}

TEST_CASE("aggregate gradients against central differences") {
  std::mt19937_64 rng(21);
  const std::size_t nu = 3, ni = 4, n = nu + ni, d = 3, dt = 2;
  auto edges = oracle::random_edges(nu, ni, 10, rng, 100);
  edges.push_back(edges.front());  // a repeated timestamp
  std::sort(edges.begin(), edges.end(), chronological_less);
  const auto g = build_message_graph(edges, n, TimeScale{0, 100, 3});
  Matrix h = oracle::random_matrix(n, d, rng);
  auto p = random_params(d, dt, rng);
  Matrix omega = oracle::random_matrix(1, dt, rng, 0.1, 2.0);
  const Matrix w = oracle::random_matrix(n, d, rng);

  auto loss = [&] {
    TimeEncoder enc{omega};
    return sum(hadamard(aggregate(h, g, p, enc), w));
  };
  Tape tape;
  const Var vh = tape.parameter(h), va = tape.parameter(p.alpha), vq = tape.parameter(p.query),
            vk = tape.parameter(p.key), vw = tape.parameter(omega);
  const Var out = ad::aggregate(vh, g, va, vq, vk, vw);
  CHECK(out.value() == aggregate(h, g, p, TimeEncoder{omega}));
  tape.backward(ad::sum(ad::hadamard(out, tape.constant(w))));
  const std::pair<Matrix*, Var> cases[] = {{&h, vh}, {&p.alpha, va}, {&p.query, vq}, {&p.key, vk}, {&omega, vw}};
  for (auto [m, v] : cases) {
    const Matrix grad = tape.grad(v);
    for (std::size_t i = 0; i < m->size(); ++i) {
      CHECK(oracle::grad_rel_error(grad[i], oracle::central_difference(*m, i, loss)) <= 1e-6);
    }
  }
}

TEST_CASE("gcn aggregate gradient") {
  std::mt19937_64 rng(22);
  const auto a = build_adjacency(std::vector<TemporalEdge>{{0, 2, 0}, {1, 2, 0}}, 4);
  Matrix h = oracle::random_matrix(4, 2, rng);
  const Matrix w = oracle::random_matrix(4, 2, rng);
  auto loss = [&] { return sum(hadamard(gcn_aggregate(h, a), w)); };
  Tape tape;
  const Var vh = tape.parameter(h);
  tape.backward(ad::sum(ad::hadamard(ad::gcn_aggregate(vh, a), tape.constant(w))));
  const Matrix g = tape.grad(vh);
  for (std::size_t i = 0; i < h.size(); ++i) {
    CHECK(oracle::grad_rel_error(g[i], oracle::central_difference(h, i, loss)) <= 1e-7);
  }
}
