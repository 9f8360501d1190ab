// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include "tgode/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "binary_io.hpp"
#include "tgode/error.hpp"

namespace tgode {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kCheckpointMagic = "TGODCKPT";
constexpr std::uint64_t kCheckpointVersion = 1;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ParseError("'" + std::string(key) + "': cannot parse '" + std::string(v) + "'");
  }
  return out;
}

template <class T>
T parse_positive(std::string_view key, std::string_view v) {
  const T x = parse_number<T>(key, v);
  if (!(x > T{0})) throw ParseError("'" + std::string(key) + "' must be positive");
  return x;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("'" + std::string(key) + "': expected true|false, got '" + std::string(v) + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

fs::path resolve(std::string_view v, const fs::path& base) {
  fs::path p{std::string(v)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

using Setter = void (*)(ExperimentConfig&, std::string_view, const fs::path&);

struct Key {
  std::string_view name;
  Setter set;
};

// Keys in canonical order.
const Key kKeys[] = {
    {"dataset", [](ExperimentConfig& c, std::string_view v, const fs::path& b) { c.dataset = resolve(v, b); }},
    {"format", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.format = parse_dataset_format(v); }},
    {"k", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.k = parse_positive<int>("k", v); }},
    {"eps", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.eps = parse_positive<double>("eps", v); }},
    {"dim", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.dim = parse_positive<std::size_t>("dim", v); }},
    {"time_dim", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.time_dim = parse_positive<std::size_t>("time_dim", v); }},
    {"lr", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.lr = parse_positive<double>("lr", v); }},
    {"lambda", [](ExperimentConfig& c, std::string_view v, const fs::path&) {
       c.lambda = parse_number<double>("lambda", v);
       if (!(c.lambda >= 0.0)) throw ParseError("'lambda' must be >= 0");
     }},
    {"epochs", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.epochs = parse_positive<int>("epochs", v); }},
    {"patience", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.patience = parse_positive<int>("patience", v); }},
    {"batch", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.batch = parse_positive<std::size_t>("batch", v); }},
    {"seed", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.seed = parse_number<std::uint64_t>("seed", v); }},
    {"variant", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.variant = parse_variant(v); }},
    {"policy", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.policy = parse_policy(v); }},
    {"mask_seen", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.mask_seen = parse_mask_mode(v); }},
    {"per_user", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.per_user = parse_bool("per_user", v); }},
    {"init_std", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.init_std = parse_positive<double>("init_std", v); }},
    {"out", [](ExperimentConfig& c, std::string_view v, const fs::path& b) { c.out = resolve(v, b); }},
    {"run_id", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.run_id = std::string(v); }},
    {"timing", [](ExperimentConfig& c, std::string_view v, const fs::path&) { c.timing = parse_bool("timing", v); }},
};

const Key& find_key(std::string_view name, std::size_t line) {
  for (const Key& k : kKeys) {
    if (k.name == name) return k;
  }
  throw ParseError("unknown key '" + std::string(name) + "'", line);
}

struct Entry {
  const Key* key;
  std::vector<std::string> values;
  std::size_t line;
};

std::vector<Entry> read_entries(std::istream& in, bool allow_lists) {
  std::vector<Entry> entries;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line);
    const std::string_view name = trim(s.substr(0, eq));
    const std::string_view value = trim(s.substr(eq + 1));
    const Key& key = find_key(name, line);
    for (const Entry& e : entries) {
      if (e.key == &key) throw ParseError("duplicate key '" + std::string(name) + "'", line);
    }
    Entry entry{&key, {}, line};
    if (allow_lists) {
      std::string_view rest = value;
      while (true) {
        const auto comma = rest.find(',');
        entry.values.emplace_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    } else {
      entry.values.emplace_back(value);
    }
    for (const auto& v : entry.values) {
      if (v.empty() && key.name != "run_id") {
        throw ParseError("empty value for '" + std::string(name) + "'", line);
      }
    }
    entries.push_back(std::move(entry));
  }
  if (in.bad()) throw IoError("config: read failed");
  for (std::string_view required : {"dataset", "out"}) {
    bool found = false;
    for (const Entry& e : entries) found = found || e.key->name == required;
    if (!found) throw ParseError("missing required key '" + std::string(required) + "'");
  }
  return entries;
}

void apply(ExperimentConfig& c, const Entry& e, const std::string& value, const fs::path& base) {
  try {
    e.key->set(c, value, base);
  } catch (const ParseError& err) {
    if (err.line() != 0) throw;
    throw ParseError(err.what(), e.line);
  }
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::size_t per_solve(std::size_t nfe, int intervals) {
  return intervals > 0 ? nfe / static_cast<std::size_t>(intervals) : 0;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "movielens") return DatasetFormat::MovieLens;
  if (name == "amazon") return DatasetFormat::Amazon;
  if (name == "snapshot") return DatasetFormat::Snapshot;
  throw ParseError("unknown dataset format '" + std::string(name) +
                   "' (expected movielens|amazon|snapshot)");
}

std::string_view to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::MovieLens:
      return "movielens";
    case DatasetFormat::Amazon:
      return "amazon";
    case DatasetFormat::Snapshot:
      return "snapshot";
  }
  return "?";
}

std::string policy_name(SignalPolicy p) {
  for (std::string_view name : {"origin", "m1", "m2", "m3", "m4"}) {
    if (parse_policy(name) == p) return std::string(name);
  }
  return to_string(p);
}

ModelConfig ExperimentConfig::model() const {
  ModelConfig m;
  m.dim = dim;
  m.time_dim = time_dim;
  m.step = eps;
  m.init_std = init_std;
  m.variant = variant;
  m.policy = policy;
  return m;
}

EvalOptions ExperimentConfig::eval() const { return {mask_seen, per_user}; }

TrainOptions ExperimentConfig::train() const {
  TrainOptions t;
  t.epochs = epochs;
  t.patience = patience;
  t.batch_size = batch;
  t.adam.learning_rate = lr;
  t.adam.weight_decay = lambda;
  t.seed = seed;
  t.eval = eval();
  return t;
}

std::string ExperimentConfig::label() const {
  if (!run_id.empty()) return run_id;
  return std::string(to_string(variant)) + "-" + policy_name(policy) + "-K" + std::to_string(k) +
         "-eps" + format_double(eps) + "-seed" + std::to_string(seed);
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream o;
  o << "dataset = " << dataset.string() << "\n"
    << "format = " << to_string(format) << "\n"
    << "k = " << k << "\n"
    << "eps = " << format_double(eps) << "\n"
    << "dim = " << dim << "\n"
    << "time_dim = " << time_dim << "\n"
    << "lr = " << format_double(lr) << "\n"
    << "lambda = " << format_double(lambda) << "\n"
    << "epochs = " << epochs << "\n"
    << "patience = " << patience << "\n"
    << "batch = " << batch << "\n"
    << "seed = " << seed << "\n"
    << "variant = " << to_string(variant) << "\n"
    << "policy = " << to_string(policy) << "\n"
    << "mask_seen = " << to_string(mask_seen) << "\n"
    << "per_user = " << (per_user ? "true" : "false") << "\n"
    << "init_std = " << format_double(init_std) << "\n"
    << "out = " << out.string() << "\n"
    << "run_id = " << run_id << "\n"
    << "timing = " << (timing ? "true" : "false") << "\n";
  return o.str();
}

ExperimentConfig parse_config(std::istream& in, const fs::path& base_dir) {
  ExperimentConfig c;
  for (const Entry& e : read_entries(in, false)) apply(c, e, e.values.front(), base_dir);
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

std::vector<ExperimentConfig> parse_grid(std::istream& in, const fs::path& base_dir) {
  const std::vector<Entry> entries = read_entries(in, true);
  // Validate every value up front so errors carry their line.
  for (const Entry& e : entries) {
    for (const auto& v : e.values) {
      ExperimentConfig scratch;
      apply(scratch, e, v, base_dir);
    }
  }
  std::vector<ExperimentConfig> cells{ExperimentConfig{}};
  for (const Entry& e : entries) {
    std::vector<ExperimentConfig> next;
    for (const auto& cell : cells) {
      for (const auto& v : e.values) {
        ExperimentConfig c = cell;
        apply(c, e, v, base_dir);
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

std::vector<ExperimentConfig> load_grid(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid '" + path.string() + "'");
  return parse_grid(in, path.parent_path());
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  // FNV-1a over the canonical text.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : config.to_text()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

Dataset load_experiment_dataset(const ExperimentConfig& config) {
  if (config.format == DatasetFormat::Snapshot) {
    Dataset d = load_dataset(config.dataset);
    if (d.system.intervals() != config.k) {
      d.system = build_hybrid_system(d.split.train, config.k);
    }
    return d;
  }
  const LogFormat f = config.format == DatasetFormat::Amazon ? LogFormat::Amazon : LogFormat::MovieLens;
  return prepare_dataset(load_log(config.dataset, f), config.k);
}

MetricsRow metrics_row(const ExperimentConfig& config, int epoch, std::string_view split) {
  MetricsRow r;
  r.run_id = config.label();
  r.dataset = config.dataset.filename().string();
  r.variant = std::string(to_string(config.variant));
  r.policy = policy_name(config.policy);
  r.k = config.k;
  r.eps = config.eps;
  r.seed = config.seed;
  r.epoch = epoch;
  r.split = std::string(split);
  return r;
}

void write_metrics_header(std::ostream& out) {
  out << "run_id,dataset,variant,policy,K,eps,seed,epoch,split,recall@5,recall@10,mrr,loss,nfe,"
         "wall_seconds\n";
}

void write_metrics_row(std::ostream& out, const MetricsRow& r) {
  out << csv_field(r.run_id) << ',' << csv_field(r.dataset) << ',' << r.variant << ','
      << r.policy << ',' << r.k << ',' << format_double(r.eps) << ',' << r.seed << ',' << r.epoch
      << ',' << r.split << ',';
  if (r.has_metrics) {
    out << fixed(r.recall5, 6) << ',' << fixed(r.recall10, 6) << ',' << fixed(r.mrr, 6) << ','
        << fixed(r.loss, 6) << ',' << r.nfe << ',';
  } else {
    out << ",,,,,";
  }
  out << fixed(r.wall_seconds, 3) << '\n';
}

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  binary::put_magic(out, kCheckpointMagic, kCheckpointVersion);
  binary::put_string(out, ckpt.config.to_text());
  binary::put_u64(out, config_hash(ckpt.config));
  binary::put_u64(out, ckpt.config.seed);
  binary::put_i64(out, ckpt.best_epoch);
  binary::put_f64(out, ckpt.best_valid_mrr);
  binary::put_f64(out, ckpt.best_loss);
  binary::put_u64(out, ckpt.nfe);
  const auto tensors = ckpt.params.tensors();
  binary::put_u64(out, tensors.size());
  for (const Matrix* m : tensors) {
    binary::put_u64(out, m->rows());
    binary::put_u64(out, m->cols());
    binary::put_f64s(out, m->values().data(), m->size());
  }
  if (!out) throw IoError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  binary::expect_magic(in, kCheckpointMagic, kCheckpointVersion);
  Checkpoint c;
  std::istringstream text(binary::get_string(in));
  c.config = parse_config(text);
  if (binary::get_u64(in) != config_hash(c.config)) throw IoError("checkpoint: config hash mismatch");
  if (binary::get_u64(in) != c.config.seed) throw IoError("checkpoint: seed mismatch");
  c.best_epoch = static_cast<int>(binary::get_i64(in));
  c.best_valid_mrr = binary::get_f64(in);
  c.best_loss = binary::get_f64(in);
  c.nfe = binary::get_u64(in);
  const std::uint64_t count = binary::get_length(in, 1u << 20);
  if (count < 2 || (count - 2) % 3 != 0) throw IoError("checkpoint: bad tensor count");
  std::vector<Matrix> tensors;
  for (std::uint64_t t = 0; t < count; ++t) {
    const std::uint64_t rows = binary::get_length(in, 1ull << 32);
    const std::uint64_t cols = binary::get_length(in, 1ull << 32);
    std::vector<double> values = binary::get_f64s(in);
    if (values.size() != rows * cols) throw IoError("checkpoint: tensor size mismatch");
    Matrix m(rows, cols);
    std::copy(values.begin(), values.end(), m.values().begin());
    tensors.push_back(std::move(m));
  }
  c.params.embeddings = std::move(tensors.front());
  for (std::size_t i = 1; i + 1 < tensors.size(); i += 3) {
    c.params.layers.push_back(
        {std::move(tensors[i]), std::move(tensors[i + 1]), std::move(tensors[i + 2])});
  }
  c.params.time_encoder.frequencies = std::move(tensors.back());
  const ModelConfig m = c.config.model();
  if (c.params.embeddings.cols() != m.dim || c.params.time_encoder.time_dim() != m.time_dim ||
      c.params.layers.size() != static_cast<std::size_t>(c.config.k)) {
    throw IoError("checkpoint: tensor shapes disagree with the stored config");
  }
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const fs::path& path) {
  std::ofstream out = open_output(path);
  write_checkpoint(ckpt, out);
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

RunResult run_experiment(const ExperimentConfig& config, const Dataset& dataset, const LogSink& log) {
  const auto start = std::chrono::steady_clock::now();
  if (dataset.system.intervals() != config.k) {
    throw Error("run_experiment: dataset has " + std::to_string(dataset.system.intervals()) +
                " intervals, config asks for " + std::to_string(config.k));
  }
  const ModelConfig model = config.model();
  RunResult result;
  const FitResult fitted = fit(dataset, model, config.train(), [&](const EpochLog& e) {
    MetricsRow r = metrics_row(config, e.epoch, "valid");
    r.recall5 = e.valid.recall5;
    r.recall10 = e.valid.recall10;
    r.mrr = e.valid.mrr;
    r.loss = e.loss;
    r.nfe = per_solve(e.nfe, config.k);
    r.wall_seconds = config.timing ? e.wall_seconds : 0.0;
    result.rows.push_back(r);
    if (log) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s epoch %d loss %.5f valid R@5 %.4f R@10 %.4f MRR %.4f",
                    r.run_id.c_str(), e.epoch, e.loss, e.valid.recall5, e.valid.recall10,
                    e.valid.mrr);
      log(buf);
    }
  });

  Checkpoint& ckpt = result.checkpoint;
  ckpt.config = config;
  ckpt.best_epoch = fitted.best_epoch;
  ckpt.best_valid_mrr = fitted.best_valid_mrr;
  const EpochLog& best = fitted.log.at(static_cast<std::size_t>(fitted.best_epoch - 1));
  ckpt.best_loss = best.loss;
  ckpt.nfe = per_solve(best.nfe, config.k);
  ckpt.params = fitted.params;

  const MetricSummary test = evaluate_checkpoint(ckpt, dataset, Split::Test);
  result.wall_seconds =
      config.timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
                    : 0.0;
  MetricsRow t = metrics_row(config, fitted.best_epoch, "test");
  t.recall5 = test.recall5;
  t.recall10 = test.recall10;
  t.mrr = test.mrr;
  t.loss = ckpt.best_loss;
  t.nfe = ckpt.nfe;
  t.wall_seconds = result.wall_seconds;
  result.test = t;
  result.rows.push_back(t);
  if (log) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%s best epoch %d test R@5 %.4f R@10 %.4f MRR %.4f (evaluated %zu, cold %zu, "
                  "masked %zu)",
                  t.run_id.c_str(), t.epoch, test.recall5, test.recall10, test.mrr, test.evaluated,
                  test.skipped_cold, test.skipped_masked);
    log(buf);
  }
  return result;
}

RunResult train_experiment(const ExperimentConfig& config, const LogSink& log) {
  const Dataset dataset = load_experiment_dataset(config);
  RunResult result = run_experiment(config, dataset, log);
  std::ofstream csv = open_output(config.out / "metrics.csv");
  write_metrics_header(csv);
  for (const MetricsRow& r : result.rows) write_metrics_row(csv, r);
  if (!csv) throw IoError("cannot write metrics.csv");
  save_checkpoint(result.checkpoint, config.out / "checkpoint.tgck");
  return result;
}

std::size_t run_ablation(std::span<const ExperimentConfig> grid, std::ostream& csv,
                         const LogSink& log) {
  using CacheKey = std::tuple<std::string, DatasetFormat, int>;
  std::map<CacheKey, Dataset> cache;
  std::size_t failed = 0;
  write_metrics_header(csv);
  for (const ExperimentConfig& config : grid) {
    MetricsRow row = metrics_row(config, 0, "failed");
    try {
      const CacheKey key{config.dataset.string(), config.format, config.k};
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, load_experiment_dataset(config)).first;
      row = run_experiment(config, it->second, log).test;
    } catch (const std::exception& e) {
      ++failed;
      row.has_metrics = false;
      if (log) log(row.run_id + " failed: " + e.what());
    }
    write_metrics_row(csv, row);
    csv.flush();
  }
  return failed;
}

MetricSummary evaluate_checkpoint(const Checkpoint& ckpt, const Dataset& dataset, Split split) {
  const ModelConfig model = ckpt.config.model();
  const LayerGraphs graphs = build_layer_graphs(dataset.system, dataset.log.num_nodes(), model);
  const Matrix h = represent(graphs, ckpt.params, model);
  return evaluate(h, dataset, split, ckpt.config.eval()).summary;
}

void export_embeddings(const Checkpoint& ckpt, const Dataset& dataset, std::ostream& out) {
  const ModelConfig model = ckpt.config.model();
  const LayerGraphs graphs = build_layer_graphs(dataset.system, dataset.log.num_nodes(), model);
  const std::vector<Matrix> snapshots = forward(graphs, ckpt.params, model);
  out << "node_id,kind,layer";
  for (std::size_t c = 0; c < model.dim; ++c) out << ",dim_" << c;
  out << '\n';
  char buf[32];
  for (std::size_t layer = 0; layer < snapshots.size(); ++layer) {
    const Matrix& h = snapshots[layer];
    for (std::size_t v = 0; v < h.rows(); ++v) {
      out << v << ',' << (dataset.log.is_user(static_cast<NodeId>(v)) ? "user" : "item") << ','
          << layer;
      for (double x : h.row(v)) {
        std::snprintf(buf, sizeof buf, ",%.17g", x);
        out << buf;
      }
      out << '\n';
    }
  }
  if (!out) throw IoError("export: write failed");
}

void export_attention(const Checkpoint& ckpt, const Dataset& dataset, std::ostream& out) {
  const ModelConfig model = ckpt.config.model();
  if (model.variant != Variant::Full && model.variant != Variant::Att) {
    throw Error("export: variant '" + std::string(to_string(model.variant)) +
                "' has no attention weights");
  }
  const LayerGraphs graphs = build_layer_graphs(dataset.system, dataset.log.num_nodes(), model);
  const std::vector<Matrix> snapshots = forward(graphs, ckpt.params, model);
  out << "layer,user,item,edge_time,weight\n";
  char buf[96];
  for (int k = 0; k < graphs.intervals(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    Matrix h_plus = snapshots[idx];
    if (model.variant == Variant::Full) {
      h_plus = rk4_solve(make_ode_problem(graphs.ode[idx], snapshots[idx], 1.0, model.step));
    }
    std::vector<double> weights;
    aggregate(h_plus, graphs.attention[idx], ckpt.params.layers[idx], ckpt.params.time_encoder,
              &weights);
    const MessageGraph& g = graphs.attention[idx];
    for (std::size_t user = 0; user < dataset.log.num_users; ++user) {
      for (std::size_t e = g.offsets[user]; e < g.offsets[user + 1]; ++e) {
        std::snprintf(buf, sizeof buf, "%d,%zu,%u,%.17g,%.17g\n", k + 1, user,
                      static_cast<unsigned>(g.source[e]), g.time[e], weights[e]);
        out << buf;
      }
    }
  }
  if (!out) throw IoError("export: write failed");
}

}  // namespace tgode
