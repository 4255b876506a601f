// Command-line front end: gen, minhash, build, query, bench.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bst/binary_io.hpp"
#include "bst/cost_model.hpp"
#include "bst/errors.hpp"
#include "bst/index_file.hpp"
#include "bst/indexes.hpp"
#include "bst/ingest.hpp"

namespace {

using nlohmann::ordered_json;
using namespace bst;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { kText, kCsv, kJsonLines };

// Emits flat records as "key=value" text, CSV (a header whenever the
// column set changes) or one JSON object per line.
class RecordWriter {
public:
  RecordWriter(std::ostream& os, Format format) : os_(os), format_(format) {}

  void emit(const std::string& kind, const ordered_json& fields) {
    if (format_ == Format::kJsonLines) {
      ordered_json rec;
      rec["record"] = kind;
      for (const auto& [k, v] : fields.items()) rec[k] = v;
      os_ << rec.dump() << '\n';
      return;
    }
    if (format_ == Format::kText) {
      os_ << kind;
      for (const auto& [k, v] : fields.items()) os_ << ' ' << k << '=' << plain(v);
      os_ << '\n';
      return;
    }
    std::vector<std::string> columns{"record"};
    for (const auto& [k, v] : fields.items()) columns.push_back(k);
    if (columns != header_) {
      header_ = columns;
      for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
      os_ << '\n';
    }
    os_ << kind;
    for (const auto& [k, v] : fields.items()) os_ << ',' << csv_cell(plain(v));
    os_ << '\n';
  }

private:
  static std::string plain(const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
  }
  static std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  }

  std::ostream& os_;
  Format format_;
  std::vector<std::string> header_;
};

Format parse_format(const std::string& s) {
  if (s == "text") return Format::kText;
  if (s == "csv") return Format::kCsv;
  if (s == "json-lines") return Format::kJsonLines;
  throw UsageError("unknown output format '" + s + "'");
}

IndexKind parse_variant(const std::string& s) {
  auto k = parse_index_kind(s);
  if (!k) throw UsageError("unknown variant '" + s + "' (si-bst, mi-bst, sih, mih, scan)");
  return *k;
}

ThresholdPolicy parse_policy(const std::string& s) {
  auto p = parse_threshold_policy(s);
  if (!p) throw UsageError("unknown threshold policy '" + s + "' (uniform, refined)");
  return *p;
}

bool is_multi(IndexKind k) { return k == IndexKind::kMiBst || k == IndexKind::kMih; }

std::string join_ids(const std::vector<SketchId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(ids[i]);
  }
  return out;
}

std::optional<std::uint64_t> budget_option(std::uint64_t v) {
  return v == 0 ? std::nullopt : std::optional<std::uint64_t>(v);
}

// Byte count of the serialized index without materializing it.
std::uint64_t serialized_bytes(const SimilarityIndex& index) {
  struct NullBuf : std::streambuf {
    int overflow(int c) override { return c; }
    std::streamsize xsputn(const char*, std::streamsize n) override { return n; }
  } buf;
  std::ostream os(&buf);
  BinaryWriter w(os);
  w.tag("BST1");
  w.u8(0);
  index.write(w);
  return w.position();
}

// ---- shared index options ----

struct IndexFlags {
  std::string variant = "si-bst";
  unsigned blocks = 0;
  std::string policy = "refined";
  double lambda = 0.5;
  std::optional<unsigned> dense_level;
  std::optional<unsigned> sparse_level;
  std::uint64_t probe_budget = 1ULL << 20;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--variant", variant, "si-bst | mi-bst | sih | mih | scan");
    cmd->add_option("--blocks", blocks, "block count m for mi-* (0 = choose by cost model)");
    cmd->add_option("--policy", policy, "threshold policy: uniform | refined");
    cmd->add_option("--lambda", lambda, "sparse-layer threshold in (0, 1)");
    cmd->add_option("--dense-level", dense_level, "force the dense layer depth (si-bst)");
    cmd->add_option("--sparse-level", sparse_level, "force the sparse layer depth (si-bst)");
    cmd->add_option("--probe-budget", probe_budget,
                    "max signatures per hash probe before scanning keys (0 = unlimited)");
  }

  IndexOptions resolve(IndexKind kind, const CLI::App* cmd) const {
    if (!(lambda > 0.0 && lambda < 1.0)) {
      throw UsageError("--lambda must lie in (0, 1), got " + std::to_string(lambda));
    }
    if (cmd->count("--blocks") && !is_multi(kind)) {
      throw UsageError("--blocks applies to mi-bst and mih only");
    }
    if ((dense_level || sparse_level) && kind != IndexKind::kSiBst) {
      throw UsageError("--dense-level and --sparse-level apply to si-bst only");
    }
    IndexOptions o;
    o.kind = kind;
    o.blocks = blocks;
    o.policy = parse_policy(policy);
    o.plan.lambda = lambda;
    o.plan.dense_level = dense_level;
    o.plan.sparse_level = sparse_level;
    o.probe_budget = budget_option(probe_budget);
    return o;
  }
};

void check_blocks(unsigned blocks, const SketchParams& p) {
  if (blocks > p.length) {
    throw UsageError("--blocks " + std::to_string(blocks) + " exceeds the sketch length " +
                     std::to_string(p.length));
  }
}

// ---- gen / minhash ----

struct GenConfig {
  std::string kind = "uniform";
  std::size_t n = 1000;
  unsigned bits = 2;
  unsigned length = 32;
  std::uint64_t seed = 1;
  std::size_t clusters = 100;
  unsigned radius = 2;
  std::string output;
};

int cmd_gen(const GenConfig& c) {
  SyntheticSpec spec;
  if (c.kind == "uniform") {
    spec.kind = SyntheticKind::kUniform;
  } else if (c.kind == "planted") {
    spec.kind = SyntheticKind::kPlanted;
  } else {
    throw UsageError("unknown generator '" + c.kind + "' (uniform, planted)");
  }
  try {
    spec.params = SketchParams(c.bits, c.length);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (c.radius > c.length) throw UsageError("--radius exceeds the sketch length");
  if (spec.kind == SyntheticKind::kPlanted && c.clusters == 0) {
    throw UsageError("--clusters must be at least 1");
  }
  spec.n = c.n;
  spec.seed = c.seed;
  spec.clusters = c.clusters;
  spec.radius = c.radius;
  write_sketches(generate(spec), std::filesystem::path(c.output));
  return 0;
}

struct MinhashConfig {
  std::string input;
  std::string output;
  unsigned bits = 2;
  unsigned length = 64;
  std::uint64_t seed = 1;
};

int cmd_minhash(const MinhashConfig& c) {
  MinhashParams p{c.bits, c.length, c.seed};
  SketchParams params;
  try {
    params = SketchParams(c.bits, c.length);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ifstream in(c.input);
  if (!in) throw std::runtime_error("cannot open " + c.input);
  SketchDataset ds(params);
  for (const auto& tokens : read_token_sets(in)) ds.push_back(bbit_minhash(tokens, p));
  write_sketches(ds, std::filesystem::path(c.output));
  return 0;
}

// ---- build ----

struct BuildConfig {
  std::string input;
  std::string index;
  std::string format = "text";
  IndexFlags flags;
};

void report_trie(RecordWriter& out, const SketchTrie& trie, unsigned block) {
  const auto& plan = trie.plan();
  const auto report = trie.space_report();
  for (unsigned level = 0; level <= trie.params().length; ++level) {
    ordered_json f;
    if (block) f["block"] = block;
    f["level"] = level;
    f["nodes"] = plan.level_counts[level];
    f["encoding"] = std::string(to_string(plan.encoding(level)));
    std::uint64_t payload = 0;
    std::uint64_t aux = 0;
    if (level >= 1 && level <= report.levels.size()) {
      payload = report.levels[level - 1].payload_bits;
      aux = report.levels[level - 1].auxiliary_bits;
    }
    f["payload_bits"] = payload;
    f["auxiliary_bits"] = aux;
    out.emit("level", f);
  }
  ordered_json f;
  if (block) f["block"] = block;
  f["length"] = trie.params().length;
  f["dense_level"] = plan.dense_level;
  f["sparse_level"] = plan.sparse_level;
  f["leaves"] = trie.num_leaves();
  f["middle_payload_bits"] = report.middle_payload_bits();
  f["sparse_path_bits"] = report.sparse_path_bits;
  f["sparse_leftmost_bits"] = report.sparse_leftmost_bits;
  f["sparse_auxiliary_bits"] = report.sparse_auxiliary_bits;
  f["vertical_copy_bits"] = report.vertical_copy_bits;
  f["leaf_id_bits"] = report.leaf_id_bits;
  f["leaf_group_bits"] = report.leaf_group_bits;
  f["leaf_auxiliary_bits"] = report.leaf_auxiliary_bits;
  f["total_bits"] = report.total_bits();
  out.emit("trie", f);
}

int cmd_build(const BuildConfig& c, const CLI::App* cmd) {
  const IndexKind kind = parse_variant(c.flags.variant);
  auto options = c.flags.resolve(kind, cmd);
  const Format format = parse_format(c.format);
  const auto ds = read_sketches(std::filesystem::path(c.input));
  check_blocks(options.blocks, ds.params());
  if (ds.empty()) throw std::runtime_error("input contains no sketches");

  const auto start = std::chrono::steady_clock::now();
  std::unique_ptr<SimilarityIndex> index;
  try {
    index = build_index(ds, options);
  } catch (const std::invalid_argument& e) {
    // Only the layer overrides can be rejected at this point.
    throw UsageError(e.what());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_index(*index, std::filesystem::path(c.index));

  RecordWriter out(std::cout, format);
  if (const auto* si = dynamic_cast<const SingleIndexBst*>(index.get())) {
    report_trie(out, si->trie(), 0);
  } else if (const auto* mi = dynamic_cast<const MultiIndexBst*>(index.get())) {
    for (std::size_t j = 0; j < mi->partition().size(); ++j) {
      report_trie(out, mi->block(j), static_cast<unsigned>(j + 1));
    }
  } else if (const auto* mh = dynamic_cast<const MultiIndexHash*>(index.get())) {
    for (std::size_t j = 0; j < mh->partition().size(); ++j) {
      ordered_json f;
      f["block"] = j + 1;
      f["begin"] = mh->partition()[j].begin + 1;
      f["length"] = mh->partition()[j].length;
      f["keys"] = mh->block(j).num_keys();
      f["bytes"] = mh->block(j).memory_bytes();
      out.emit("hash-block", f);
    }
  }
  ordered_json f;
  f["variant"] = std::string(to_string(kind));
  f["sketches"] = ds.size();
  f["bits"] = ds.params().bits;
  f["length"] = ds.params().length;
  if (const auto* mi = dynamic_cast<const MultiIndexBst*>(index.get())) {
    f["blocks"] = mi->partition().size();
    f["policy"] = std::string(to_string(mi->policy()));
  } else if (const auto* mh = dynamic_cast<const MultiIndexHash*>(index.get())) {
    f["blocks"] = mh->partition().size();
    f["policy"] = std::string(to_string(mh->policy()));
  }
  f["memory_bytes"] = index->memory_bytes();
  f["serialized_bytes"] = serialized_bytes(*index);
  f["build_seconds"] = seconds;
  out.emit("index", f);
  return 0;
}

// ---- query ----

struct QueryResult {
  std::vector<SketchId> ids;
  QueryStats stats;
  double micros = 0;
};

// Runs every (query, tau) pair, optionally across threads. Results are
// laid out query-major.
std::vector<QueryResult> run_queries(const SimilarityIndex& index,
                                     const std::vector<std::vector<Symbol>>& queries,
                                     const std::vector<unsigned>& taus, unsigned threads) {
  std::vector<QueryResult> results(queries.size() * taus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    QueryScratch scratch;
    for (std::size_t i = next++; i < results.size(); i = next++) {
      const auto& q = queries[i / taus.size()];
      const unsigned tau = taus[i % taus.size()];
      const auto start = std::chrono::steady_clock::now();
      results[i].ids = index.search(q, tau, scratch);
      results[i].micros = std::chrono::duration<double, std::micro>(
                              std::chrono::steady_clock::now() - start)
                              .count();
      results[i].stats = scratch.stats;
    }
  };
  threads = std::max(1U, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

void check_taus(const std::vector<unsigned>& taus, const SketchParams& p) {
  for (unsigned tau : taus) {
    if (tau > p.length) {
      throw UsageError("--tau " + std::to_string(tau) + " exceeds the sketch length " +
                       std::to_string(p.length));
    }
  }
}

struct QueryConfig {
  std::string index;
  std::string queries;
  std::vector<unsigned> taus{1};
  std::string format = "text";
  unsigned threads = 1;
  std::uint64_t probe_budget = 1ULL << 20;
};

int cmd_query(const QueryConfig& c) {
  const Format format = parse_format(c.format);
  auto index = load_index(std::filesystem::path(c.index));
  set_probe_budget(*index, budget_option(c.probe_budget));
  const auto qs = read_sketches(std::filesystem::path(c.queries));
  if (!(qs.params() == index->params())) {
    throw std::runtime_error(
        "query sketches (b=" + std::to_string(qs.params().bits) + ", L=" +
        std::to_string(qs.params().length) + ") do not match the index (b=" +
        std::to_string(index->params().bits) + ", L=" + std::to_string(index->params().length) +
        ")");
  }
  check_taus(c.taus, qs.params());

  std::vector<std::vector<Symbol>> queries;
  for (std::size_t i = 0; i < qs.size(); ++i) queries.emplace_back(qs.row(i).begin(), qs.row(i).end());
  const auto results = run_queries(*index, queries, c.taus, c.threads);

  RecordWriter out(std::cout, format);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    ordered_json f;
    f["query"] = i / c.taus.size() + 1;
    f["tau"] = c.taus[i % c.taus.size()];
    f["count"] = r.ids.size();
    if (format == Format::kJsonLines) {
      f["ids"] = r.ids;
    } else {
      f["ids"] = join_ids(r.ids);
    }
    f["traversed_nodes"] = r.stats.traversed_nodes;
    f["scanned_leaves"] = r.stats.scanned_leaves;
    f["signatures"] = r.stats.signatures;
    f["candidates"] = r.stats.candidates;
    f["time_us"] = r.micros;
    out.emit("result", f);
  }
  return 0;
}

// ---- bench ----

struct BenchConfig {
  std::string input;
  std::vector<std::string> variants{"si-bst", "mi-bst", "scan"};
  std::vector<unsigned> taus{1, 2, 3, 4, 5};
  std::vector<unsigned> blocks;
  std::string policy = "refined";
  double lambda = 0.5;
  std::size_t sample = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::uint64_t probe_budget = 1ULL << 20;
  std::string format = "csv";
  bool predict = false;
  std::vector<unsigned> bits{2, 4};
  unsigned length = 32;
  double n = 4294967296.0;
};

std::string sci(long double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::scientific << static_cast<double>(v);
  return os.str();
}

int cmd_predict(const BenchConfig& c, RecordWriter& out) {
  const ThresholdPolicy policy = parse_policy(c.policy);
  std::vector<unsigned> bits = c.bits;
  unsigned length = c.length;
  long double n = c.n;
  if (!c.input.empty()) {
    const auto ds = read_sketches(std::filesystem::path(c.input));
    bits = {ds.params().bits};
    length = ds.params().length;
    n = static_cast<long double>(ds.size());
  }
  const std::vector<unsigned> ms = c.blocks.empty() ? std::vector<unsigned>{2, 3, 4} : c.blocks;
  for (unsigned b : bits) {
    try {
      SketchParams check(b, length);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    check_taus(c.taus, SketchParams(b, length));
    for (unsigned m : ms) check_blocks(m, SketchParams(b, length));
    for (unsigned tau : c.taus) {
      const auto single = cost_single(b, length, tau, n);
      for (unsigned m : ms) {
        const auto multi = cost_multi(b, length, tau, n, m, policy);
        ordered_json f;
        f["bits"] = b;
        f["length"] = length;
        f["n"] = static_cast<double>(n);
        f["tau"] = tau;
        f["m"] = m;
        f["policy"] = std::string(to_string(policy));
        f["signatures"] = single.signatures.str();
        f["expected_solutions"] = sci(single.expected_solutions);
        f["cost_single"] = sci(single.cost_single);
        f["expected_candidates"] = sci(multi.total_expected_candidates());
        f["cost_multi"] = sci(multi.cost_multi);
        out.emit("predict", f);
      }
    }
  }
  return 0;
}

int cmd_bench(const BenchConfig& c, const CLI::App* cmd) {
  RecordWriter out(std::cout, parse_format(c.format));
  if (c.predict) return cmd_predict(c, out);
  if (c.input.empty()) throw UsageError("bench needs --input unless --predict is given");
  if (!(c.lambda > 0.0 && c.lambda < 1.0)) throw UsageError("--lambda must lie in (0, 1)");
  const ThresholdPolicy policy = parse_policy(c.policy);
  std::vector<IndexKind> kinds;
  for (const auto& v : c.variants) kinds.push_back(parse_variant(v));
  if (cmd->count("--blocks") &&
      std::none_of(kinds.begin(), kinds.end(), [](IndexKind k) { return is_multi(k); })) {
    throw UsageError("--blocks applies to mi-bst and mih only");
  }
  // The scan baseline runs first so the others can report a speedup.
  std::stable_partition(kinds.begin(), kinds.end(), [](IndexKind k) { return k == IndexKind::kScan; });

  const auto ds = read_sketches(std::filesystem::path(c.input));
  if (ds.empty()) throw std::runtime_error("input contains no sketches");
  const SketchParams& p = ds.params();
  check_taus(c.taus, p);
  for (unsigned m : c.blocks) {
    if (m == 0) throw UsageError("--blocks must be at least 1");
    check_blocks(m, p);
  }

  std::vector<std::size_t> rows(ds.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  std::mt19937_64 rng(c.seed);
  std::sample(rows.begin(), rows.end(), std::back_inserter(picked), std::min(c.sample, ds.size()), rng);
  std::vector<std::vector<Symbol>> queries;
  for (auto r : picked) queries.emplace_back(ds.row(r).begin(), ds.row(r).end());

  std::vector<double> scan_time(c.taus.size(), 0.0);
  const long double n = static_cast<long double>(ds.size());
  for (IndexKind kind : kinds) {
    std::vector<unsigned> ms{1};
    if (is_multi(kind)) ms = c.blocks.empty() ? std::vector<unsigned>{0} : c.blocks;
    for (unsigned m : ms) {
      IndexOptions options;
      options.kind = kind;
      options.blocks = m;
      options.policy = policy;
      options.plan.lambda = c.lambda;
      options.probe_budget = budget_option(c.probe_budget);
      const auto start = std::chrono::steady_clock::now();
      auto index = build_index(ds, options);
      const double build_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      unsigned used_m = 1;
      if (const auto* mi = dynamic_cast<const MultiIndexBst*>(index.get())) {
        used_m = static_cast<unsigned>(mi->partition().size());
      } else if (const auto* mh = dynamic_cast<const MultiIndexHash*>(index.get())) {
        used_m = static_cast<unsigned>(mh->partition().size());
      }
      const auto bytes = serialized_bytes(*index);

      const auto results = run_queries(*index, queries, c.taus, c.threads);
      for (std::size_t t = 0; t < c.taus.size(); ++t) {
        double time = 0;
        double answers = 0;
        double candidates = 0;
        std::uint64_t key_scans = 0;
        for (std::size_t q = 0; q < queries.size(); ++q) {
          const auto& r = results[q * c.taus.size() + t];
          time += r.micros;
          answers += static_cast<double>(r.ids.size());
          candidates += static_cast<double>(r.stats.candidates);
          key_scans += r.stats.key_scans;
        }
        const double count = static_cast<double>(std::max<std::size_t>(queries.size(), 1));
        time /= count;
        if (kind == IndexKind::kScan) scan_time[t] = time;
        const unsigned tau = c.taus[t];
        ordered_json f;
        f["variant"] = std::string(to_string(kind));
        f["tau"] = tau;
        f["m"] = used_m;
        f["policy"] = is_multi(kind) ? std::string(to_string(policy)) : std::string("-");
        f["queries"] = queries.size();
        f["mean_query_us"] = time;
        f["mean_answers"] = answers / count;
        f["mean_candidates"] = candidates / count;
        f["key_scan_fallbacks"] = key_scans;
        f["index_bytes"] = bytes;
        f["memory_bytes"] = index->memory_bytes();
        f["build_seconds"] = build_s;
        f["speedup_vs_scan"] = scan_time[t] > 0 && time > 0 ? ordered_json(scan_time[t] / time)
                                                            : ordered_json(nullptr);
        f["predicted_cost_single"] = sci(cost_single(p.bits, p.length, tau, n).cost_single);
        f["predicted_cost_multi"] =
            is_multi(kind) ? sci(cost_multi(p.bits, p.length, tau, n, used_m, policy).cost_multi)
                           : std::string("-");
        out.emit("bench", f);
      }
    }
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Similarity search over b-bit sketches with succinct tries and hash indexes"};
  app.require_subcommand(1);

  GenConfig gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate synthetic sketches");
  gen_cmd->add_option("--kind", gen.kind, "uniform | planted");
  gen_cmd->add_option("--n", gen.n, "number of sketches");
  gen_cmd->add_option("--bits,-b", gen.bits, "bits per symbol (1-8)");
  gen_cmd->add_option("--length,-L", gen.length, "symbols per sketch (1-256)");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--clusters", gen.clusters, "planted: number of centers");
  gen_cmd->add_option("--radius", gen.radius, "planted: max mutations per member");
  gen_cmd->add_option("--output,-o", gen.output)->required();

  MinhashConfig mh;
  auto* mh_cmd = app.add_subcommand("minhash", "b-bit minhash of token sets");
  mh_cmd->add_option("--input", mh.input, "one token set per line, hex tokens")->required();
  mh_cmd->add_option("--output,-o", mh.output)->required();
  mh_cmd->add_option("--bits,-b", mh.bits);
  mh_cmd->add_option("--length,-L", mh.length);
  mh_cmd->add_option("--seed", mh.seed);

  BuildConfig build;
  auto* build_cmd = app.add_subcommand("build", "build and save an index");
  build_cmd->add_option("--input", build.input, "BSK1 sketch file")->required();
  build_cmd->add_option("--index", build.index, "output index file")->required();
  build_cmd->add_option("--format", build.format, "text | csv | json-lines");
  build.flags.add_to(build_cmd);

  QueryConfig query;
  auto* query_cmd = app.add_subcommand("query", "run range queries against an index");
  query_cmd->add_option("--index", query.index)->required();
  query_cmd->add_option("--queries", query.queries, "BSK1 file of query sketches")->required();
  query_cmd->add_option("--tau", query.taus, "Hamming threshold (repeatable)");
  query_cmd->add_option("--format", query.format, "text | csv | json-lines");
  query_cmd->add_option("--threads", query.threads);
  query_cmd->add_option("--probe-budget", query.probe_budget,
                        "max signatures per hash probe before scanning keys (0 = unlimited)");

  BenchConfig bench;
  auto* bench_cmd = app.add_subcommand("bench", "measure variants against cost-model predictions");
  bench_cmd->add_option("--input", bench.input, "BSK1 sketch file");
  bench_cmd->add_option("--variant", bench.variants, "variants to measure (repeatable)");
  bench_cmd->add_option("--tau", bench.taus, "thresholds (repeatable)");
  bench_cmd->add_option("--blocks", bench.blocks, "block counts for mi-* (repeatable)");
  bench_cmd->add_option("--policy", bench.policy);
  bench_cmd->add_option("--lambda", bench.lambda);
  bench_cmd->add_option("--sample", bench.sample, "number of sampled queries");
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--threads", bench.threads);
  bench_cmd->add_option("--probe-budget", bench.probe_budget);
  bench_cmd->add_option("--format", bench.format, "text | csv | json-lines");
  bench_cmd->add_flag("--predict", bench.predict, "cost-model predictions only");
  bench_cmd->add_option("--bits,-b", bench.bits, "predict: bits per symbol (repeatable)");
  bench_cmd->add_option("--length,-L", bench.length, "predict: sketch length");
  bench_cmd->add_option("--n", bench.n, "predict: dataset size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*mh_cmd) return cmd_minhash(mh);
    if (*build_cmd) return cmd_build(build, build_cmd);
    if (*query_cmd) return cmd_query(query);
    if (*bench_cmd) return cmd_bench(bench, bench_cmd);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
