// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0
//
// Interaction ingestion and the construction of the interval-partitioned
// interaction system.
//
// Node ids live in one joint space: users occupy [0, U) and items
// [U, U + I), so a single embedding table indexes both endpoint types.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgode/sparse.hpp"

namespace tgode {

using NodeId = std::uint32_t;

struct TemporalEdge {
  NodeId user = 0;
  NodeId item = 0;  // joint node id, >= number of users
  std::int64_t timestamp = 0;

  friend bool operator==(const TemporalEdge&, const TemporalEdge&) = default;
};

// Timestamp ascending, then (user, item).
bool chronological_less(const TemporalEdge& a, const TemporalEdge& b);

struct InteractionLog {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::vector<TemporalEdge> edges;     // chronological order
  std::vector<std::string> user_keys;  // raw identifier by dense user index
  std::vector<std::string> item_keys;  // raw identifier by dense item index

  std::size_t num_nodes() const noexcept { return num_users + num_items; }
  bool is_user(NodeId v) const noexcept { return v < num_users; }
  bool is_item(NodeId v) const noexcept { return v >= num_users && v < num_nodes(); }

  friend bool operator==(const InteractionLog&, const InteractionLog&) = default;
};

enum class LogFormat { MovieLens, Amazon };

LogFormat parse_log_format(std::string_view name);
std::string_view to_string(LogFormat format);

// Rows `user \t item \t rating \t timestamp`. Every row is an implicit
// positive; identifiers are densely remapped in ascending raw-id order
// (numeric when every id is an integer).
InteractionLog parse_movielens(const std::filesystem::path& path);
// Rows `user,item,rating,timestamp`; string identifiers allowed.
InteractionLog parse_amazon(const std::filesystem::path& path);
InteractionLog parse_log(std::istream& in, LogFormat format);
InteractionLog load_log(const std::filesystem::path& path, LogFormat format);

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
};

struct ChronologicalSplit {
  std::vector<TemporalEdge> train;
  std::vector<TemporalEdge> valid;
  std::vector<TemporalEdge> test;

  friend bool operator==(const ChronologicalSplit&, const ChronologicalSplit&) = default;
};

// First floor(0.8 n) edges train, next floor(0.1 n) valid, remainder test.
// Requires chronologically sorted input and n >= 10.
ChronologicalSplit chronological_split(std::span<const TemporalEdge> edges,
                                       SplitRatios ratios = {});

// Maps raw timestamps onto normalized time where every interval has unit
// length: tau(t) = K (t - t_min) / (t_max - t_min).
struct TimeScale {
  std::int64_t t_min = 0;
  std::int64_t t_max = 1;
  int intervals = 1;

  double normalize(std::int64_t t) const;
  // min(floor(K (t - t_min) / (t_max - t_min)), K - 1), exact integer math.
  int interval_of(std::int64_t t) const;
  double raw_pivot(int k) const;

  friend bool operator==(const TimeScale&, const TimeScale&) = default;
};

struct HybridSystem {
  TimeScale scale;
  std::vector<double> pivots;                              // tau_0 .. tau_K
  std::vector<std::vector<TemporalEdge>> interval_edges;   // K lists
  std::vector<std::vector<TemporalEdge>> cumulative_edges; // intervals 0..k

  int intervals() const noexcept { return static_cast<int>(interval_edges.size()); }

  friend bool operator==(const HybridSystem&, const HybridSystem&) = default;
};

HybridSystem build_hybrid_system(std::span<const TemporalEdge> train, int intervals);

// Symmetric-normalized bipartite adjacency. Duplicate (user, item) pairs
// collapse to one structural edge; degrees count distinct neighbors.
SparseAdjacency build_adjacency(std::span<const TemporalEdge> edges, std::size_t n);

// A log, its split and the system built over the training part.
struct Dataset {
  InteractionLog log;
  ChronologicalSplit split;
  HybridSystem system;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

Dataset prepare_dataset(InteractionLog log, int intervals, SplitRatios ratios = {});

// Versioned little-endian binary snapshot; see docs/snapshot-format.md.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);
void write_dataset(const Dataset& dataset, std::ostream& out);
Dataset read_dataset(std::istream& in);

}  // namespace tgode
