// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include "tgode/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "binary_io.hpp"
#include "tgode/error.hpp"

namespace tgode {

namespace {

constexpr std::string_view kSnapshotMagic = "TGODSNAP";
constexpr std::uint64_t kSnapshotVersion = 1;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_int(std::string_view s, std::int64_t& v) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s) {
  if (s.empty()) return false;
  double v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v);
}

// Dense ids in ascending raw-id order: numeric when all keys are integers,
// lexicographic otherwise.
std::vector<std::string> sorted_keys(const std::unordered_map<std::string, std::uint32_t>& seen) {
  std::vector<std::string> keys;
  keys.reserve(seen.size());
  for (const auto& [k, _] : seen) keys.push_back(k);
  const bool numeric = std::all_of(keys.begin(), keys.end(), [](const std::string& k) {
    std::int64_t v;
    return parse_int(k, v);
  });
  if (numeric) {
    std::sort(keys.begin(), keys.end(), [](const std::string& a, const std::string& b) {
      std::int64_t x = 0, y = 0;
      parse_int(a, x);
      parse_int(b, y);
      return x < y;
    });
  } else {
    std::sort(keys.begin(), keys.end());
  }
  return keys;
}

struct RawRow {
  std::uint32_t user;  // first-seen index
  std::uint32_t item;
  std::int64_t timestamp;
};

}  // namespace

bool chronological_less(const TemporalEdge& a, const TemporalEdge& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  if (a.user != b.user) return a.user < b.user;
  return a.item < b.item;
}

LogFormat parse_log_format(std::string_view name) {
  if (name == "movielens") return LogFormat::MovieLens;
  if (name == "amazon") return LogFormat::Amazon;
  throw ParseError("unknown log format '" + std::string(name) + "' (expected movielens|amazon)");
}

std::string_view to_string(LogFormat format) {
  return format == LogFormat::MovieLens ? "movielens" : "amazon";
}

InteractionLog parse_log(std::istream& in, LogFormat format) {
  const char sep = format == LogFormat::MovieLens ? '\t' : ',';
  std::unordered_map<std::string, std::uint32_t> users, items;
  std::vector<RawRow> rows;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view, sep);
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields, found " + std::to_string(fields.size()), lineno);
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError("empty identifier", lineno);
    if (!parse_double(fields[2])) {
      throw ParseError("rating '" + std::string(fields[2]) + "' is not a number", lineno);
    }
    std::int64_t ts = 0;
    if (!parse_int(fields[3], ts)) {
      // Some exports write integral timestamps with a trailing ".0".
      double d = 0;
      auto f = fields[3];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), d);
      if (ec != std::errc() || ptr != f.data() + f.size() || d != std::floor(d)) {
        throw ParseError("timestamp '" + std::string(f) + "' is not an integer", lineno);
      }
      ts = static_cast<std::int64_t>(d);
    }
    if (ts < 0) throw ParseError("negative timestamp", lineno);
    auto [u, _u] = users.try_emplace(std::string(fields[0]), static_cast<std::uint32_t>(users.size()));
    auto [i, _i] = items.try_emplace(std::string(fields[1]), static_cast<std::uint32_t>(items.size()));
    rows.push_back({u->second, i->second, ts});
  }
  if (rows.empty()) throw ParseError("interaction log is empty");

  InteractionLog log;
  log.user_keys = sorted_keys(users);
  log.item_keys = sorted_keys(items);
  log.num_users = log.user_keys.size();
  log.num_items = log.item_keys.size();

  std::vector<std::uint32_t> user_rank(users.size()), item_rank(items.size());
  for (std::uint32_t r = 0; r < log.user_keys.size(); ++r) user_rank[users.at(log.user_keys[r])] = r;
  for (std::uint32_t r = 0; r < log.item_keys.size(); ++r) item_rank[items.at(log.item_keys[r])] = r;

  const auto offset = static_cast<NodeId>(log.num_users);
  log.edges.reserve(rows.size());
  for (const RawRow& r : rows) {
    log.edges.push_back({user_rank[r.user], offset + item_rank[r.item], r.timestamp});
  }
  std::sort(log.edges.begin(), log.edges.end(), chronological_less);
  return log;
}

InteractionLog load_log(const std::filesystem::path& path, LogFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_log(in, format);
}

InteractionLog parse_movielens(const std::filesystem::path& path) {
  return load_log(path, LogFormat::MovieLens);
}

InteractionLog parse_amazon(const std::filesystem::path& path) {
  return load_log(path, LogFormat::Amazon);
}

ChronologicalSplit chronological_split(std::span<const TemporalEdge> edges, SplitRatios ratios) {
  const std::size_t n = edges.size();
  if (n < 10) throw Error("chronological_split: need at least 10 interactions, got " + std::to_string(n));
  if (ratios.train <= 0 || ratios.valid < 0 || ratios.train + ratios.valid >= 1.0) {
    throw Error("chronological_split: invalid ratios");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (edges[i].timestamp < edges[i - 1].timestamp) {
      throw Error("chronological_split: input not sorted by timestamp at position " +
                  std::to_string(i));
    }
  }
  // The epsilon absorbs representation error such as 0.8 * 10 = 7.999...
  const auto n_train = static_cast<std::size_t>(std::floor(ratios.train * static_cast<double>(n) + 1e-9));
  const auto n_valid = static_cast<std::size_t>(std::floor(ratios.valid * static_cast<double>(n) + 1e-9));
  ChronologicalSplit s;
  s.train.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.valid.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_train),
                 edges.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  s.test.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), edges.end());
  return s;
}

double TimeScale::normalize(std::int64_t t) const {
  return static_cast<double>(intervals) * static_cast<double>(t - t_min) /
         static_cast<double>(t_max - t_min);
}

int TimeScale::interval_of(std::int64_t t) const {
  const __int128 num = static_cast<__int128>(intervals) * (t - t_min);
  const __int128 k = num / (t_max - t_min);
  if (k < 0) return 0;
  return static_cast<int>(std::min<__int128>(k, intervals - 1));
}

double TimeScale::raw_pivot(int k) const {
  return static_cast<double>(t_min) +
         static_cast<double>(k) * static_cast<double>(t_max - t_min) / static_cast<double>(intervals);
}

HybridSystem build_hybrid_system(std::span<const TemporalEdge> train, int intervals) {
  if (intervals < 1) throw Error("build_hybrid_system: interval count must be >= 1");
  if (train.empty()) throw Error("build_hybrid_system: no training interactions");
  const auto [lo, hi] = std::minmax_element(
      train.begin(), train.end(),
      [](const TemporalEdge& a, const TemporalEdge& b) { return a.timestamp < b.timestamp; });
  if (lo->timestamp == hi->timestamp) throw Error("build_hybrid_system: zero time span");

  HybridSystem sys;
  sys.scale = {lo->timestamp, hi->timestamp, intervals};
  for (int k = 0; k <= intervals; ++k) sys.pivots.push_back(static_cast<double>(k));
  sys.interval_edges.resize(static_cast<std::size_t>(intervals));
  for (const TemporalEdge& e : train) {
    sys.interval_edges[static_cast<std::size_t>(sys.scale.interval_of(e.timestamp))].push_back(e);
  }
  std::vector<TemporalEdge> acc;
  for (const auto& bucket : sys.interval_edges) {
    acc.insert(acc.end(), bucket.begin(), bucket.end());
    sys.cumulative_edges.push_back(acc);
  }
  return sys;
}

SparseAdjacency build_adjacency(std::span<const TemporalEdge> edges, std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(2 * edges.size());
  for (const TemporalEdge& e : edges) {
    if (e.user >= n || e.item >= n) throw Error("build_adjacency: node id out of range");
    if (e.user == e.item) throw Error("build_adjacency: self-loop");
    pairs.emplace_back(e.user, e.item);
    pairs.emplace_back(e.item, e.user);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  SparseAdjacency a = SparseAdjacency::zero(n);
  for (const auto& [r, _] : pairs) ++a.offsets[r + 1];
  std::partial_sum(a.offsets.begin(), a.offsets.end(), a.offsets.begin());
  a.columns.reserve(pairs.size());
  a.values.reserve(pairs.size());
  for (const auto& [r, c] : pairs) {
    a.columns.push_back(c);
    a.values.push_back(0.0);
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double dr = static_cast<double>(a.degree(r));
    for (std::size_t p = a.offsets[r]; p < a.offsets[r + 1]; ++p) {
      const double dc = static_cast<double>(a.degree(a.columns[p]));
      a.values[p] = 1.0 / std::sqrt(dr * dc);
    }
  }
  return a;
}

Dataset prepare_dataset(InteractionLog log, int intervals, SplitRatios ratios) {
  Dataset d;
  d.split = chronological_split(log.edges, ratios);
  d.system = build_hybrid_system(d.split.train, intervals);
  d.log = std::move(log);
  return d;
}

namespace {

void put_edges(std::ostream& out, std::span<const TemporalEdge> edges) {
  binary::put_u64(out, edges.size());
  for (const TemporalEdge& e : edges) {
    binary::put_u64(out, e.user);
    binary::put_u64(out, e.item);
    binary::put_i64(out, e.timestamp);
  }
}

std::vector<TemporalEdge> get_edges(std::istream& in, std::size_t num_nodes) {
  std::vector<TemporalEdge> edges(binary::get_length(in, 1ull << 32));
  for (TemporalEdge& e : edges) {
    const std::uint64_t u = binary::get_u64(in);
    const std::uint64_t i = binary::get_u64(in);
    if (u >= num_nodes || i >= num_nodes) throw IoError("snapshot edge references unknown node");
    e.user = static_cast<NodeId>(u);
    e.item = static_cast<NodeId>(i);
    e.timestamp = binary::get_i64(in);
  }
  return edges;
}

}  // namespace

void write_dataset(const Dataset& d, std::ostream& out) {
  binary::put_magic(out, kSnapshotMagic, kSnapshotVersion);
  binary::put_u64(out, d.log.num_users);
  binary::put_u64(out, d.log.num_items);
  for (const auto& k : d.log.user_keys) binary::put_string(out, k);
  for (const auto& k : d.log.item_keys) binary::put_string(out, k);
  put_edges(out, d.log.edges);
  put_edges(out, d.split.train);
  put_edges(out, d.split.valid);
  put_edges(out, d.split.test);
  binary::put_i64(out, d.system.scale.t_min);
  binary::put_i64(out, d.system.scale.t_max);
  binary::put_u64(out, static_cast<std::uint64_t>(d.system.scale.intervals));
  binary::put_f64s(out, d.system.pivots.data(), d.system.pivots.size());
  for (const auto& bucket : d.system.interval_edges) put_edges(out, bucket);
  if (!out) throw IoError("failed writing dataset snapshot");
}

Dataset read_dataset(std::istream& in) {
  binary::expect_magic(in, kSnapshotMagic, kSnapshotVersion);
  Dataset d;
  d.log.num_users = binary::get_length(in, 1ull << 31);
  d.log.num_items = binary::get_length(in, 1ull << 31);
  const std::size_t n = d.log.num_nodes();
  for (std::size_t i = 0; i < d.log.num_users; ++i) d.log.user_keys.push_back(binary::get_string(in));
  for (std::size_t i = 0; i < d.log.num_items; ++i) d.log.item_keys.push_back(binary::get_string(in));
  d.log.edges = get_edges(in, n);
  d.split.train = get_edges(in, n);
  d.split.valid = get_edges(in, n);
  d.split.test = get_edges(in, n);
  d.system.scale.t_min = binary::get_i64(in);
  d.system.scale.t_max = binary::get_i64(in);
  const std::uint64_t k = binary::get_length(in, 1u << 16);
  if (k == 0 || d.system.scale.t_max <= d.system.scale.t_min) throw IoError("corrupt time scale");
  d.system.scale.intervals = static_cast<int>(k);
  d.system.pivots = binary::get_f64s(in);
  if (d.system.pivots.size() != k + 1) throw IoError("corrupt pivot list");
  std::vector<TemporalEdge> acc;
  for (std::uint64_t b = 0; b < k; ++b) {
    d.system.interval_edges.push_back(get_edges(in, n));
    acc.insert(acc.end(), d.system.interval_edges.back().begin(), d.system.interval_edges.back().end());
    d.system.cumulative_edges.push_back(acc);
  }
  return d;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_dataset(dataset, out);
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_dataset(in);
}

}  // namespace tgode
