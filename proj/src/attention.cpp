// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include "tgode/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "tgode/error.hpp"

namespace tgode {

namespace {

void check_params(const Matrix& alpha, const Matrix& query, const Matrix& key, std::size_t dim,
                  std::size_t time_dim) {
  if (query.rows() != dim || query.cols() != dim || !key.same_shape(query)) {
    throw ShapeError("attention: W_Q/W_K must be " + std::to_string(dim) + "x" + std::to_string(dim));
  }
  if (alpha.rows() != 1 || alpha.cols() != 2 * dim + 2 * time_dim) {
    throw ShapeError("attention: alpha must have 2d + 2dT entries");
  }
}

// v = W^T alpha_part, so that alpha_part . (W h) = v . h.
std::vector<double> fold(const Matrix& w, std::span<const double> alpha_part) {
  std::vector<double> v(w.cols(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const auto row = w.row(r);
    for (std::size_t c = 0; c < w.cols(); ++c) v[c] += alpha_part[r] * row[c];
  }
  return v;
}

double time_logit(double t, std::span<const double> alpha_time, std::span<const double> omega) {
  const double scale = std::sqrt(1.0 / static_cast<double>(omega.size()));
  double s = 0.0;
  for (std::size_t m = 0; m < omega.size(); ++m) {
    s += alpha_time[2 * m] * std::cos(omega[m] * t) + alpha_time[2 * m + 1] * std::sin(omega[m] * t);
  }
  return scale * s;
}

struct Forward {
  Matrix out;
  std::vector<double> pi;
  std::vector<double> vq;
  std::vector<double> vk;
};

Forward forward(const Matrix& h, const MessageGraph& g, const Matrix& alpha, const Matrix& query,
                const Matrix& key, std::span<const double> omega) {
  const std::size_t d = h.cols();
  if (h.rows() != g.n) {
    throw ShapeError("aggregate: graph has " + std::to_string(g.n) + " nodes, state has " +
                     std::to_string(h.rows()));
  }
  check_params(alpha, query, key, d, omega.size());
  const auto a = alpha.values();
  const auto alpha_q = a.subspan(0, d);
  const auto alpha_t = a.subspan(d, 2 * omega.size());
  const auto alpha_k = a.subspan(d + 2 * omega.size(), d);

  Forward f;
  f.vq = fold(query, alpha_q);
  f.vk = fold(key, alpha_k);
  std::vector<double> sq(g.n), sk(g.n);
  for (std::size_t v = 0; v < g.n; ++v) {
    sq[v] = dot(h.row(v), f.vq);
    sk[v] = dot(h.row(v), f.vk);
  }
  std::vector<double> logit_t(g.distinct_times.size());
  for (std::size_t s = 0; s < logit_t.size(); ++s) {
    logit_t[s] = time_logit(g.distinct_times[s], alpha_t, omega);
  }
  f.out = Matrix(g.n, d);
  f.pi.resize(g.messages());
  for (std::size_t i = 0; i < g.n; ++i) {
    auto dst = f.out.row(i);
    if (g.isolated(i)) {
      std::copy(h.row(i).begin(), h.row(i).end(), dst.begin());
      continue;
    }
    for (std::size_t e = g.offsets[i]; e < g.offsets[i + 1]; ++e) {
      const NodeId j = g.source[e];
      const double pi = sigmoid(sq[i] + logit_t[g.time_slot[e]] + sk[j]);
      f.pi[e] = pi;
      const double w = g.norm[e] * pi;
      const auto src = h.row(j);
      for (std::size_t c = 0; c < d; ++c) dst[c] += w * src[c];
    }
  }
  return f;
}

}  // namespace

TimeEncoder TimeEncoder::log_spaced(std::size_t time_dim) {
  if (time_dim == 0) throw Error("time encoder: dimension must be positive");
  TimeEncoder enc;
  enc.frequencies = Matrix(1, time_dim);
  for (std::size_t i = 0; i < time_dim; ++i) {
    const double exponent =
        time_dim == 1 ? 0.0 : static_cast<double>(i) * 4.0 / static_cast<double>(time_dim - 1);
    enc.frequencies[i] = std::pow(10.0, -exponent);
  }
  return enc;
}

std::vector<double> encode_time(double t, std::span<const double> frequencies) {
  const double scale = std::sqrt(1.0 / static_cast<double>(frequencies.size()));
  std::vector<double> phi(2 * frequencies.size());
  for (std::size_t m = 0; m < frequencies.size(); ++m) {
    phi[2 * m] = scale * std::cos(frequencies[m] * t);
    phi[2 * m + 1] = scale * std::sin(frequencies[m] * t);
  }
  return phi;
}

std::vector<double> encode_time(double t, const TimeEncoder& encoder) {
  return encode_time(t, encoder.frequencies.values());
}

AttentionLayerParams AttentionLayerParams::init(std::size_t dim, std::size_t time_dim,
                                                std::mt19937_64& rng) {
  AttentionLayerParams p;
  p.alpha = Matrix(1, 2 * dim + 2 * time_dim);
  const double bound = std::sqrt(6.0 / static_cast<double>(dim + dim));
  std::uniform_real_distribution<double> u(-bound, bound);
  p.query = Matrix(dim, dim);
  p.key = Matrix(dim, dim);
  for (double& v : p.query.values()) v = u(rng);
  for (double& v : p.key.values()) v = u(rng);
  return p;
}

double attention_weight(std::span<const double> h_i, std::span<const double> h_j, double t,
                        const AttentionLayerParams& params, const TimeEncoder& encoder) {
  const std::size_t d = h_i.size();
  if (h_j.size() != d) throw ShapeError("attention_weight: h_i and h_j differ in length");
  check_params(params.alpha, params.query, params.key, d, encoder.time_dim());
  std::vector<double> concat;
  concat.reserve(params.alpha.cols());
  for (std::size_t r = 0; r < d; ++r) concat.push_back(dot(params.query.row(r), h_i));
  const auto phi = encode_time(t, encoder);
  concat.insert(concat.end(), phi.begin(), phi.end());
  for (std::size_t r = 0; r < d; ++r) concat.push_back(dot(params.key.row(r), h_j));
  return sigmoid(dot(params.alpha.values(), concat));
}

MessageGraph build_message_graph(std::span<const TemporalEdge> edges, std::size_t n,
                                 const TimeScale& scale) {
  // (dst, src, time)
  std::vector<std::tuple<NodeId, NodeId, double>> msgs;
  msgs.reserve(2 * edges.size());
  for (const TemporalEdge& e : edges) {
    if (e.user >= n || e.item >= n) {
      throw Error("build_message_graph: edge references unknown node");
    }
    const double t = scale.normalize(e.timestamp);
    msgs.emplace_back(e.user, e.item, t);
    msgs.emplace_back(e.item, e.user, t);
  }
  std::sort(msgs.begin(), msgs.end());

  std::vector<std::size_t> degree(n, 0);
  for (std::size_t k = 0; k < msgs.size(); ++k) {
    const auto [dst, src, _] = msgs[k];
    if (k == 0 || std::get<0>(msgs[k - 1]) != dst || std::get<1>(msgs[k - 1]) != src) ++degree[dst];
  }

  MessageGraph g;
  g.n = n;
  g.offsets.assign(n + 1, 0);
  g.source.reserve(msgs.size());
  g.time.reserve(msgs.size());
  g.norm.reserve(msgs.size());
  for (const auto& [dst, src, t] : msgs) {
    ++g.offsets[dst + 1];
    g.source.push_back(src);
    g.time.push_back(t);
    g.norm.push_back(1.0 / std::sqrt(static_cast<double>(degree[dst]) * static_cast<double>(degree[src])));
  }
  for (std::size_t v = 0; v < n; ++v) g.offsets[v + 1] += g.offsets[v];
  g.distinct_times = g.time;
  std::sort(g.distinct_times.begin(), g.distinct_times.end());
  g.distinct_times.erase(std::unique(g.distinct_times.begin(), g.distinct_times.end()),
                         g.distinct_times.end());
  g.time_slot.reserve(g.time.size());
  for (double t : g.time) {
    const auto it = std::lower_bound(g.distinct_times.begin(), g.distinct_times.end(), t);
    g.time_slot.push_back(static_cast<std::uint32_t>(it - g.distinct_times.begin()));
  }
  return g;
}

Matrix aggregate(const Matrix& h_plus, const MessageGraph& graph, const AttentionLayerParams& params,
                 const TimeEncoder& encoder, std::vector<double>* weights) {
  Forward f = forward(h_plus, graph, params.alpha, params.query, params.key,
                      encoder.frequencies.values());
  if (weights != nullptr) *weights = std::move(f.pi);
  return std::move(f.out);
}

Matrix gcn_aggregate(const Matrix& h_plus, const SparseAdjacency& a) {
  Matrix out = spmm(a, h_plus);
  for (std::size_t v = 0; v < a.n; ++v) {
    if (a.degree(v) == 0) std::copy(h_plus.row(v).begin(), h_plus.row(v).end(), out.row(v).begin());
  }
  return out;
}

namespace ad {

Var aggregate(Var h_plus, const MessageGraph& graph, Var alpha, Var query, Var key,
              Var frequencies) {
  Tape& tape = *h_plus.tape();
  const Matrix& h = h_plus.value();
  Forward f = forward(h, graph, alpha.value(), query.value(), key.value(),
                      frequencies.value().values());
  Matrix out = std::move(f.out);

  auto backward = [&graph, h_plus, alpha, query, key, frequencies, h = h, a = alpha.value(),
                   wq = query.value(), wk = key.value(), omega = frequencies.value(),
                   pi = std::move(f.pi), vq = std::move(f.vq),
                   vk = std::move(f.vk)](const Matrix& g, Tape& tp) {
    const std::size_t d = h.cols();
    const std::size_t dt = omega.size();
    const auto alpha_q = a.values().subspan(0, d);
    const auto alpha_t = a.values().subspan(d, 2 * dt);
    const auto alpha_k = a.values().subspan(d + 2 * dt, d);
    const double scale = std::sqrt(1.0 / static_cast<double>(dt));

    Matrix gh(h.rows(), d);
    Matrix ga(1, a.cols());
    Matrix gomega(1, dt);
    std::vector<double> gsq(graph.n, 0.0), gsk(graph.n, 0.0);
    std::vector<double> gtime(graph.distinct_times.size(), 0.0);

    for (std::size_t i = 0; i < graph.n; ++i) {
      const auto gi = g.row(i);
      if (graph.isolated(i)) {
        auto dst = gh.row(i);
        for (std::size_t c = 0; c < d; ++c) dst[c] += gi[c];
        continue;
      }
      for (std::size_t e = graph.offsets[i]; e < graph.offsets[i + 1]; ++e) {
        const NodeId j = graph.source[e];
        const double p = pi[e];
        const double w = graph.norm[e] * p;
        auto gj = gh.row(j);
        const auto hj = h.row(j);
        double gpi = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          gj[c] += w * gi[c];
          gpi += gi[c] * hj[c];
        }
        const double gs = graph.norm[e] * gpi * p * (1.0 - p);
        if (gs == 0.0) continue;
        gsq[i] += gs;
        gsk[j] += gs;
        gtime[graph.time_slot[e]] += gs;
      }
    }
    for (std::size_t s = 0; s < gtime.size(); ++s) {
      const double gs = gtime[s];
      if (gs == 0.0) continue;
      const double t = graph.distinct_times[s];
      for (std::size_t m = 0; m < dt; ++m) {
        const double cs = std::cos(omega[m] * t);
        const double sn = std::sin(omega[m] * t);
        ga[d + 2 * m] += gs * scale * cs;
        ga[d + 2 * m + 1] += gs * scale * sn;
        gomega[m] += gs * scale * t * (alpha_t[2 * m + 1] * cs - alpha_t[2 * m] * sn);
      }
    }

    // Scalar projections sq = H vq, sk = H vk with vq = W_Q^T alpha_q.
    std::vector<double> gvq(d, 0.0), gvk(d, 0.0);
    for (std::size_t v = 0; v < graph.n; ++v) {
      const auto hv = h.row(v);
      auto ghv = gh.row(v);
      for (std::size_t c = 0; c < d; ++c) {
        ghv[c] += gsq[v] * vq[c] + gsk[v] * vk[c];
        gvq[c] += gsq[v] * hv[c];
        gvk[c] += gsk[v] * hv[c];
      }
    }
    Matrix gwq(d, d), gwk(d, d);
    for (std::size_t r = 0; r < d; ++r) {
      double aq = 0.0, ak = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        gwq(r, c) = alpha_q[r] * gvq[c];
        gwk(r, c) = alpha_k[r] * gvk[c];
        aq += wq(r, c) * gvq[c];
        ak += wk(r, c) * gvk[c];
      }
      ga[r] += aq;
      ga[d + 2 * dt + r] += ak;
    }

    tp.accumulate(h_plus, gh);
    tp.accumulate(alpha, ga);
    tp.accumulate(query, gwq);
    tp.accumulate(key, gwk);
    tp.accumulate(frequencies, gomega);
  };
  return tape.record(std::move(out), {h_plus, alpha, query, key, frequencies}, std::move(backward));
}

Var gcn_aggregate(Var h_plus, const SparseAdjacency& a) {
  Tape& tape = *h_plus.tape();
  return tape.record(tgode::gcn_aggregate(h_plus.value(), a), {h_plus},
                     [&a, h_plus](const Matrix& g, Tape& tp) {
                       Matrix& gh = tp.grad_buffer(h_plus);
                       spmm_accumulate(a, g, 1.0, gh);
                       for (std::size_t v = 0; v < a.n; ++v) {
                         if (a.degree(v) != 0) continue;
                         auto dst = gh.row(v);
                         const auto src = g.row(v);
                         for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
                       }
                     });
}

}  // namespace ad

}  // namespace tgode
