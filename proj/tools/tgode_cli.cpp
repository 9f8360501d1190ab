// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the library only through tgode.h.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "tgode/tgode.h"

namespace {

int report(tgode_status s) {
  if (s == TGODE_OK) return 0;
  std::fprintf(stderr, "tgode: %s: %s\n", tgode_status_string(s), tgode_last_error());
  return static_cast<int>(s);
}

void print_line(const char* line, void*) {
  std::fprintf(stderr, "%s\n", line);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal graph ODE recommender"};
  app.set_version_flag("--version", std::string(tgode_version()));
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");

  std::string input, format, out_dir;
  int k = 3;
  auto* prepare = app.add_subcommand("prepare", "Parse a log and write a dataset snapshot");
  prepare->add_option("--input", input, "Interaction log")->required()->check(CLI::ExistingFile);
  prepare->add_option("--format", format, "Log format")->required()->check(CLI::IsMember({"movielens", "amazon"}));
  prepare->add_option("--k", k, "Number of intervals")->check(CLI::PositiveNumber);
  prepare->add_option("--out", out_dir, "Output directory")->required();

  std::string config;
  auto* train = app.add_subcommand("train", "Train from a config file");
  train->add_option("--config", config, "key = value config")->required()->check(CLI::ExistingFile);

  std::string checkpoint, split, csv_out;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint");
  evaluate->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--split", split)->required()->check(CLI::IsMember({"valid", "test"}));
  evaluate->add_option("--out", csv_out, "Metrics CSV (default stdout)");
  bool per_user = false;
  evaluate->add_flag("--per-user", per_user, "Average metrics per user instead of per interaction");

  std::string grid;
  auto* ablate = app.add_subcommand("ablate", "Run an experiment grid");
  ablate->add_option("--grid", grid, "Grid file")->required()->check(CLI::ExistingFile);
  ablate->add_option("--out", csv_out, "Results CSV (default <out>/ablation.csv)");

  std::string what;
  auto* exp = app.add_subcommand("export", "Export embeddings or attention weights");
  exp->add_option("--what", what)->required()->check(CLI::IsMember({"embeddings", "attention"}));
  exp->add_option("--out", csv_out, "Output CSV")->required();
  exp->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  if (!quiet) tgode_set_log(print_line, nullptr);

  if (*prepare) {
    tgode_dataset* d = nullptr;
    if (int rc = report(tgode_dataset_prepare(input.c_str(), format.c_str(), k, &d))) return rc;
    const std::string path = (std::filesystem::path(out_dir) / "dataset.tgsnap").string();
    tgode_dataset_stats st{};
    tgode_dataset_stats_get(d, &st);
    const int rc = report(tgode_dataset_save(d, path.c_str()));
    tgode_dataset_free(d);
    if (rc) return rc;
    std::printf("wrote %s: %" PRIu64 " users, %" PRIu64 " items, %" PRIu64
                " interactions (train %" PRIu64 ", valid %" PRIu64 ", test %" PRIu64 "), K=%d\n",
                path.c_str(), st.users, st.items, st.interactions, st.train, st.valid, st.test,
                st.intervals);
    return 0;
  }
  if (*train) return report(tgode_train(config.c_str(), nullptr));
  if (*ablate) {
    uint64_t failed = 0;
    const int rc = report(tgode_ablate(grid.c_str(), csv_out.empty() ? nullptr : csv_out.c_str(), &failed));
    if (rc) return rc;
    if (failed > 0) std::fprintf(stderr, "tgode: %" PRIu64 " grid cell(s) failed\n", failed);
    return failed > 0 ? 1 : 0;
  }

  tgode_model* m = nullptr;
  if (int rc = report(tgode_model_load(checkpoint.c_str(), &m))) return rc;
  int rc = 0;
  if (*evaluate) {
    if (per_user) tgode_model_set_per_user(m, 1);
    rc = report(tgode_model_evaluate_csv(m, split.c_str(), csv_out.empty() ? nullptr : csv_out.c_str()));
  } else {
    rc = report(tgode_model_export(m, what.c_str(), csv_out.c_str()));
  }
  tgode_model_free(m);
  return rc;
}
