// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include "tgode/metrics.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "tgode/error.hpp"

namespace tgode {

namespace {

void require_results(std::span<const RankingResult> results, std::string_view what) {
  if (results.empty()) throw Error(std::string(what) + ": no ranking results");
}

template <class PerResult>
double per_user_mean(std::span<const RankingResult> results, PerResult f) {
  std::map<NodeId, std::pair<double, std::size_t>> acc;
  for (const auto& r : results) {
    auto& [s, n] = acc[r.user];
    s += f(r);
    ++n;
  }
  double total = 0.0;
  for (const auto& [_, v] : acc) total += v.first / static_cast<double>(v.second);
  return total / static_cast<double>(acc.size());
}

}  // namespace

double recall_at_k(std::span<const RankingResult> results, std::size_t k) {
  require_results(results, "recall_at_k");
  const auto hits = std::count_if(results.begin(), results.end(),
                                  [k](const RankingResult& r) { return r.rank <= k; });
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

double mrr(std::span<const RankingResult> results) {
  require_results(results, "mrr");
  double s = 0.0;
  for (const auto& r : results) s += 1.0 / static_cast<double>(r.rank);
  return s / static_cast<double>(results.size());
}

double recall_at_k_per_user(std::span<const RankingResult> results, std::size_t k) {
  require_results(results, "recall_at_k");
  return per_user_mean(results, [k](const RankingResult& r) { return r.rank <= k ? 1.0 : 0.0; });
}

double mrr_per_user(std::span<const RankingResult> results) {
  require_results(results, "mrr");
  return per_user_mean(results, [](const RankingResult& r) { return 1.0 / static_cast<double>(r.rank); });
}

Split parse_split(std::string_view name) {
  if (name == "valid") return Split::Valid;
  if (name == "test") return Split::Test;
  throw ParseError("unknown split '" + std::string(name) + "' (expected valid|test)");
}

std::string_view to_string(Split s) { return s == Split::Valid ? "valid" : "test"; }

MaskMode parse_mask_mode(std::string_view name) {
  if (name == "none") return MaskMode::None;
  if (name == "train") return MaskMode::Train;
  if (name == "train+valid") return MaskMode::TrainValid;
  throw ParseError("unknown mask mode '" + std::string(name) + "' (expected train|train+valid|none)");
}

std::string_view to_string(MaskMode m) {
  switch (m) {
    case MaskMode::None:
      return "none";
    case MaskMode::Train:
      return "train";
    case MaskMode::TrainValid:
      return "train+valid";
  }
  return "?";
}

EvaluationReport evaluate(const Matrix& representation, const Dataset& dataset, Split split,
                          const EvalOptions& options) {
  const InteractionLog& log = dataset.log;
  if (representation.rows() != log.num_nodes()) {
    throw ShapeError("evaluate: representation rows do not match node count");
  }
  const auto users = log.num_users;
  std::vector<char> user_warm(users, 0), item_warm(log.num_items, 0);
  for (const auto& e : dataset.split.train) {
    user_warm[e.user] = 1;
    item_warm[e.item - users] = 1;
  }

  std::vector<std::vector<NodeId>> masked(users);
  auto add_mask = [&](std::span<const TemporalEdge> edges) {
    for (const auto& e : edges) masked[e.user].push_back(e.item);
  };
  if (options.mask != MaskMode::None) add_mask(dataset.split.train);
  if (options.mask == MaskMode::TrainValid && split == Split::Test) add_mask(dataset.split.valid);
  for (auto& m : masked) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }

  const auto& targets = split == Split::Valid ? dataset.split.valid : dataset.split.test;
  EvaluationReport report;
  // Group targets by user so each user's score vector is computed once.
  std::vector<std::size_t> order(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return targets[a].user < targets[b].user; });

  std::vector<double> scores(log.num_items);
  std::vector<char> is_masked(log.num_items, 0);
  NodeId current = static_cast<NodeId>(-1);
  std::vector<std::pair<std::size_t, RankingResult>> ranked;
  for (std::size_t idx : order) {
    const TemporalEdge& e = targets[idx];
    if (!user_warm[e.user] || !item_warm[e.item - users]) {
      ++report.summary.skipped_cold;
      continue;
    }
    if (e.user != current) {
      if (current != static_cast<NodeId>(-1)) {
        for (NodeId it : masked[current]) is_masked[it - users] = 0;
      }
      current = e.user;
      for (NodeId it : masked[current]) is_masked[it - users] = 1;
      const auto hu = representation.row(e.user);
      for (std::size_t j = 0; j < log.num_items; ++j) scores[j] = dot(hu, representation.row(users + j));
    }
    const std::size_t target = e.item - users;
    if (is_masked[target]) {
      ++report.summary.skipped_masked;
      continue;
    }
    const double st = scores[target];
    std::size_t rank = 1;
    std::size_t candidates = 1;
    for (std::size_t j = 0; j < log.num_items; ++j) {
      if (j == target || is_masked[j]) continue;
      ++candidates;
      if (scores[j] > st || (scores[j] == st && j < target)) ++rank;
    }
    ranked.push_back({idx, RankingResult{e.user, e.item, rank, candidates}});
  }
  // Report results in split order.
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [_, r] : ranked) report.results.push_back(r);

  MetricSummary& s = report.summary;
  s.evaluated = report.results.size();
  if (!report.results.empty()) {
    if (options.per_user) {
      s.recall5 = recall_at_k_per_user(report.results, 5);
      s.recall10 = recall_at_k_per_user(report.results, 10);
      s.mrr = mrr_per_user(report.results);
    } else {
      s.recall5 = recall_at_k(report.results, 5);
      s.recall10 = recall_at_k(report.results, 10);
      s.mrr = mrr(report.results);
    }
  }
  return report;
}

}  // namespace tgode
