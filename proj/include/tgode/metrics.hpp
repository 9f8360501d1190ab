// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0
//
// Full-catalog ranking evaluation: each held-out interaction ranks its
// target among all items, minus the items the user already interacted with
// in earlier splits.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "tgode/data.hpp"
#include "tgode/matrix.hpp"

namespace tgode {

struct RankingResult {
  NodeId user = 0;
  NodeId item = 0;
  std::size_t rank = 0;        // 1-based
  std::size_t candidates = 0;  // items competing, target included
};

double recall_at_k(std::span<const RankingResult> results, std::size_t k);
double mrr(std::span<const RankingResult> results);
// Averages per user first, then across users.
double recall_at_k_per_user(std::span<const RankingResult> results, std::size_t k);
double mrr_per_user(std::span<const RankingResult> results);

enum class Split { Valid, Test };
enum class MaskMode { None, Train, TrainValid };

Split parse_split(std::string_view name);
std::string_view to_string(Split s);
MaskMode parse_mask_mode(std::string_view name);
std::string_view to_string(MaskMode m);

struct EvalOptions {
  MaskMode mask = MaskMode::TrainValid;
  bool per_user = false;
};

struct MetricSummary {
  double recall5 = 0.0;
  double recall10 = 0.0;
  double mrr = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped_cold = 0;    // user or item absent from train
  std::size_t skipped_masked = 0;  // target itself is a masked item
};

struct EvaluationReport {
  std::vector<RankingResult> results;
  MetricSummary summary;
};

// Ranks each interaction of `split` against every item. Masked items are
// those the user interacted with in splits before `split` (train for valid;
// train and valid for test), filtered by options.mask. Ties rank by item id.
EvaluationReport evaluate(const Matrix& representation, const Dataset& dataset, Split split,
                          const EvalOptions& options = {});

}  // namespace tgode
