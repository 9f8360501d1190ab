// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0
//
// Small synthetic datasets shared by the unit and acceptance tests.

#pragma once

#include <random>
#include <string>

#include "tgode/data.hpp"

namespace toy {

inline void name_nodes(tgode::InteractionLog& log) {
  for (std::size_t u = 0; u < log.num_users; ++u) log.user_keys.push_back("u" + std::to_string(u));
  for (std::size_t i = 0; i < log.num_items; ++i) log.item_keys.push_back("i" + std::to_string(i));
}

// 20 users and 20 items in 4 blocks of 5. User u in block b likes items
// 5b..5b+4; in train it sees four of them, and the fifth (5b + u % 5) is
// its held-out positive, stamped after every train interaction. Each block
// item is still seen in train by the other four block members.
inline tgode::Dataset planted_blocks(int intervals = 2) {
  tgode::InteractionLog log;
  log.num_users = 20;
  log.num_items = 20;
  name_nodes(log);
  std::int64_t t = 1;
  for (int round = 0; round < 5; ++round) {
    for (tgode::NodeId u = 0; u < 20; ++u) {
      const int block = static_cast<int>(u) / 5;
      if (round == static_cast<int>(u) % 5) continue;
      log.edges.push_back({u, static_cast<tgode::NodeId>(20 + 5 * block + round), t++});
    }
  }
  // Held-out positives interleave the blocks, so valid and test both span all four.
  for (int slot = 0; slot < 20; ++slot) {
    const auto u = static_cast<tgode::NodeId>(5 * (slot % 4) + slot / 4);
    const int block = static_cast<int>(u) / 5;
    log.edges.push_back({u, static_cast<tgode::NodeId>(20 + 5 * block + static_cast<int>(u) % 5), t++});
  }
  return tgode::prepare_dataset(std::move(log), intervals);
}

// Random bipartite log with a mild popularity skew.
inline tgode::InteractionLog random_log(std::size_t users, std::size_t items, std::size_t count,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pu(0, users - 1);
  std::geometric_distribution<std::size_t> pi(2.0 / static_cast<double>(items));
  std::uniform_int_distribution<std::int64_t> pt(0, 100000);
  tgode::InteractionLog log;
  log.num_users = users;
  log.num_items = items;
  name_nodes(log);
  for (std::size_t k = 0; k < count; ++k) {
    const auto item = std::min(pi(rng), items - 1);
    log.edges.push_back({static_cast<tgode::NodeId>(pu(rng)), static_cast<tgode::NodeId>(users + item), pt(rng)});
  }
  std::sort(log.edges.begin(), log.edges.end(), tgode::chronological_less);
  return log;
}

}  // namespace toy
