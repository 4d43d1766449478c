// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include "gknn/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "gknn/core_types.hpp"
#include "gknn/ctc_decode.hpp"
#include "gknn/datastore.hpp"
#include "gknn/gated_fusion.hpp"
#include "gknn/knn_index.hpp"
#include "gknn/manifest.hpp"
#include "gknn/metrics.hpp"
#include "gknn/rng.hpp"
#include "gknn/synth.hpp"
#include "gknn/tensor_io.hpp"

namespace gknn::cli {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kShape:
    case ErrorKind::kIo:
    case ErrorKind::kSpec:
    case ErrorKind::kUndefinedRate:
    case ErrorKind::kInvalidDuration:
      return kExitUsage;
    default:
      return kExitData;
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Error with_file(const Error& e, const std::string& path) {
  if (const auto* fe = dynamic_cast<const FormatError*>(&e)) {
    if (fe->message().rfind(path, 0) == 0) return *fe;
    return fe->with_prefix(path + ": ");
  }
  return Error(e.kind(), path + ": " + e.what());
}

FloatMatrix load_embeddings(const std::string& path) {
  try {
    return to_embeddings(read_tensor(path));
  } catch (const FormatError& e) {
    throw with_file(e, path);
  } catch (const Error& e) {
    throw with_file(e, path);
  }
}

LogitMatrix load_logits(const std::string& path) {
  try {
    return to_logits(read_tensor(path));
  } catch (const FormatError& e) {
    throw with_file(e, path);
  } catch (const Error& e) {
    throw with_file(e, path);
  }
}

std::shared_ptr<const KnnIndex> load_index(const std::string& path, const Vocabulary* vocab) {
  auto store = std::make_shared<const Datastore>(load_datastore(path));
  if (vocab != nullptr) {
    try {
      store->check_vocabulary(*vocab);
    } catch (const Error& e) {
      throw with_file(e, path);
    }
  }
  return std::make_shared<const KnnIndex>(std::move(store));
}

void warn_k_clamp(const KnnIndex& index, std::size_t k, const std::string& name,
                  std::ostream& err) {
  if (k > index.store().count()) {
    err << "warning: k=" << k << " exceeds the " << name << " store size "
        << index.store().count() << "; retrieving min(k, count)\n";
  }
}

// ---------------------------------------------------------------- build

struct BuildArgs {
  std::string embeddings;
  std::string logits;
  std::string lang;
  std::string vocab;
  std::string out;
};

int cmd_build(const BuildArgs& a, std::ostream& out) {
  const StoreLang lang = parse_store_lang(a.lang);
  const Vocabulary vocab = Vocabulary::load(a.vocab);
  const FloatMatrix emb = load_embeddings(a.embeddings);
  const LogitMatrix logits = load_logits(a.logits);
  if (emb.rows() != logits.frames()) {
    throw Error(ErrorKind::kShape, "frame count mismatch: " + a.embeddings + " has " +
                                       std::to_string(emb.rows()) + " frames, " + a.logits +
                                       " has " + std::to_string(logits.frames()));
  }
  Datastore ds = [&] {
    try {
      return build_datastore(emb, logits, lang, vocab);
    } catch (const LabelLanguageError& e) {
      throw LabelLanguageError(a.logits + ": " + e.what(), e.frame());
    }
  }();
  save_datastore(ds, a.out);

  out << "entries=" << ds.count() << " dim=" << ds.dim() << " lang=" << to_string(lang)
      << '\n';
  const auto hist = ds.label_histogram(vocab.size());
  out << "labels:";
  for (std::size_t id = 0; id < hist.size(); ++id) {
    if (hist[id] > 0) out << ' ' << vocab.token(static_cast<TokenId>(id)) << '=' << hist[id];
  }
  out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- decode

struct DecodeArgs {
  std::string manifest;
  std::string vocab;
  std::string mode = "s3";
  std::string store_cn;
  std::string store_en;
  std::string store_all;
  FusionConfig fusion;
  std::string out;
  double frame_ms = 40.0;
  int threads = 1;
};

struct DecodedUtterance {
  std::string hyp;
  double wall_seconds = 0.0;
  double audio_seconds = 0.0;
  std::size_t frames = 0;
  std::size_t fallbacks = 0;
};

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

int cmd_decode(DecodeArgs a, std::ostream& out, std::ostream& err) {
  FusionConfig& cfg = a.fusion;
  cfg.mode = parse_decode_mode(a.mode);
  cfg.validate();
  if (!(a.frame_ms > 0.0)) throw Error(ErrorKind::kConfig, "--frame-ms must be positive");
  const bool need_all = cfg.mode == DecodeMode::kS1;
  const bool need_pair = cfg.mode == DecodeMode::kS2 || cfg.mode == DecodeMode::kS3;
  if (need_all && a.store_all.empty()) {
    throw Error(ErrorKind::kConfig, "mode s1 requires --store-all");
  }
  if (need_pair && (a.store_cn.empty() || a.store_en.empty())) {
    throw Error(ErrorKind::kConfig, "mode " + a.mode + " requires --store-cn and --store-en");
  }

  const Vocabulary vocab = Vocabulary::load(a.vocab);
  DecodeStores stores;
  if (need_all) {
    stores.all = load_index(a.store_all, &vocab);
    warn_k_clamp(*stores.all, cfg.k, "all", err);
  }
  if (need_pair) {
    stores.cn = load_index(a.store_cn, &vocab);
    stores.en = load_index(a.store_en, &vocab);
    warn_k_clamp(*stores.cn, cfg.k, "cn", err);
    warn_k_clamp(*stores.en, cfg.k, "en", err);
  }
  const auto entries = read_manifest(a.manifest);

  std::vector<DecodedUtterance> results(entries.size());
  parallel_for(entries.size(), a.threads, [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    const auto start = Clock::now();
    const FloatMatrix emb = load_embeddings(e.embeddings.string());
    const LogitMatrix logits = load_logits(e.logits.string());
    UtteranceDecode dec = [&] {
      try {
        return decode_utterance(emb, logits, stores, vocab, cfg);
      } catch (const Error& ex) {
        throw Error(ex.kind(), "utterance " + e.id + ": " + ex.what());
      }
    }();
    const Hypothesis hyp = greedy_decode(dec.dists, vocab);
    DecodedUtterance& r = results[i];
    r.wall_seconds = seconds_since(start);
    r.hyp = hyp.text;
    r.frames = static_cast<std::size_t>(logits.frames());
    r.audio_seconds = static_cast<double>(r.frames) * a.frame_ms / 1000.0;
    r.fallbacks = dec.fallbacks;
  });

  std::ofstream hyp_out(a.out, std::ios::binary | std::ios::trunc);
  std::ofstream timing_out(a.out + ".timing.jsonl", std::ios::binary | std::ios::trunc);
  if (!hyp_out || !timing_out) throw Error(ErrorKind::kIo, "cannot write " + a.out);
  double wall = 0.0;
  double audio = 0.0;
  std::size_t fallbacks = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    nlohmann::ordered_json h;
    h["id"] = entries[i].id;
    h["hyp"] = results[i].hyp;
    hyp_out << h.dump() << '\n';
    nlohmann::ordered_json t;
    t["id"] = entries[i].id;
    t["wall_seconds"] = results[i].wall_seconds;
    t["audio_seconds"] = results[i].audio_seconds;
    t["frames"] = results[i].frames;
    timing_out << t.dump() << '\n';
    wall += results[i].wall_seconds;
    audio += results[i].audio_seconds;
    fallbacks += results[i].fallbacks;
  }
  if (fallbacks > 0) {
    err << "warning: " << fallbacks << " frame(s) fell back to CTC-only output\n";
  }
  out << "decoded=" << entries.size() << " mode=" << to_string(cfg.mode)
      << " fallbacks=" << fallbacks << " wall_seconds=" << wall
      << " audio_seconds=" << audio;
  if (audio > 0.0) out << " rtf=" << rtf(wall, audio);
  out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string hyp;
  std::string manifest;
  std::string json;
  std::string timing;
};

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::vector<nlohmann::json> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kFormat, path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const auto entries = read_manifest(a.manifest);
  if (entries.empty()) {
    err << "error: manifest " << a.manifest << " has no utterances\n";
    return kExitUsage;
  }
  std::unordered_map<std::string, std::string> hyps;
  for (const auto& row : read_jsonl(a.hyp)) {
    try {
      hyps[row.at("id").get<std::string>()] = row.at("hyp").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kFormat, a.hyp + ": " + e.what());
    }
  }
  std::vector<std::string> missing;
  for (const auto& e : entries) {
    if (!hyps.contains(e.id)) missing.push_back(e.id);
  }
  if (!missing.empty()) {
    err << "error: " << missing.size() << " manifest id(s) missing from " << a.hyp << ":";
    for (const auto& id : missing) err << ' ' << id;
    err << '\n';
    return kExitUsage;
  }

  ErrorCounts counts;
  for (const auto& e : entries) {
    counts += align_errors(tokenize_mixed(e.reference), tokenize_mixed(hyps.at(e.id)));
  }

  std::optional<double> report_rtf;
  const std::string timing = a.timing.empty() ? a.hyp + ".timing.jsonl" : a.timing;
  if (std::filesystem::exists(timing)) {
    double wall = 0.0;
    double audio = 0.0;
    for (const auto& row : read_jsonl(timing)) {
      wall += row.at("wall_seconds").get<double>();
      audio += row.at("audio_seconds").get<double>();
    }
    report_rtf = rtf(wall, audio);
  } else if (!a.timing.empty()) {
    throw Error(ErrorKind::kIo, "cannot open timing file " + timing);
  }

  const EvalReport report = EvalReport::from_counts(counts, report_rtf);
  out << report.to_text();
  if (!a.json.empty()) {
    std::ofstream j(a.json, std::ios::binary | std::ios::trunc);
    if (!j) throw Error(ErrorKind::kIo, "cannot write " + a.json);
    j << report.to_json() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- trace

struct TraceArgs {
  std::string manifest;
  std::string store_cn;
  std::string store_en;
  std::size_t n = 10;
  std::string out;
};

int cmd_trace(const TraceArgs& a, std::ostream& out) {
  if (a.n < 1) throw Error(ErrorKind::kConfig, "--n must be >= 1");
  const auto cn = load_index(a.store_cn, nullptr);
  const auto en = load_index(a.store_en, nullptr);
  const auto entries = read_manifest(a.manifest);

  std::ofstream csv(a.out, std::ios::binary | std::ios::trunc);
  if (!csv) throw Error(ErrorKind::kIo, "cannot write " + a.out);
  csv << "utt,frame,d_cn,d_en,sel,true\n";
  std::size_t rows = 0;
  char buf[64];
  for (const auto& e : entries) {
    const FloatMatrix emb = load_embeddings(e.embeddings.string());
    if (e.lang_frames && e.lang_frames->size() != static_cast<std::size_t>(emb.rows())) {
      throw Error(ErrorKind::kShape, a.manifest + ": lang_frames of " + e.id +
                                         " do not match its frame count");
    }
    for (Eigen::Index f = 0; f < emb.rows(); ++f) {
      const auto q = emb.row(f).transpose();
      const GateDecision d = gate(cn->search(q, a.n), en->search(q, a.n), a.n);
      csv << e.id << ',' << f << ',';
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f", d.d_cn, d.d_en);
      csv << buf << ',' << to_string(d.lang) << ',';
      if (e.lang_frames) {
        csv << to_string(static_cast<Lang>((*e.lang_frames)[static_cast<std::size_t>(f)]));
      }
      csv << '\n';
      ++rows;
    }
  }
  out << "frames=" << rows << " utterances=" << entries.size() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string store;
  std::size_t queries = 100;
  std::size_t k = 1024;
  int repeat = 3;
  std::uint64_t seed = 7;
};

struct LatencySummary {
  double mean_us;
  double median_us;
  double p99_us;
  double qps;
};

LatencySummary summarize(std::vector<double> us) {
  std::sort(us.begin(), us.end());
  double total = 0.0;
  for (double v : us) total += v;
  const std::size_t n = us.size();
  const std::size_t p99 = std::min(n - 1, static_cast<std::size_t>(std::ceil(0.99 * n)) - 1);
  const double median = n % 2 ? us[n / 2] : 0.5 * (us[n / 2 - 1] + us[n / 2]);
  return {total / n, median, us[p99], total > 0.0 ? 1e6 * n / total : 0.0};
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  if (a.queries == 0 || a.repeat < 1 || a.k < 1) {
    throw Error(ErrorKind::kConfig, "--queries, --repeat and --k must be >= 1");
  }
  const auto index = load_index(a.store, nullptr);
  const Datastore& ds = index->store();
  if (ds.count() == 0) throw Error(ErrorKind::kEmptyStore, a.store + ": datastore is empty");
  warn_k_clamp(*index, a.k, "bench", err);

  // Queries: stored keys perturbed by a quarter of the per-dimension spread.
  const Eigen::RowVectorXd mean = ds.keys().cast<double>().colwise().mean();
  const Eigen::RowVectorXd spread =
      ((ds.keys().cast<double>().rowwise() - mean).array().square().colwise().mean()).sqrt();
  CounterRng rng(a.seed);
  std::vector<FrameEmbedding> queries;
  for (std::size_t i = 0; i < a.queries; ++i) {
    const auto row = static_cast<Eigen::Index>(rng.below(ds.count()));
    FrameEmbedding q = ds.keys().row(row).transpose();
    for (Eigen::Index d = 0; d < q.size(); ++d) {
      q[d] += static_cast<float>(0.25 * spread[d] * rng.normal());
    }
    queries.push_back(std::move(q));
  }

  bool exact = true;
  std::vector<double> brute_us;
  std::vector<double> part_us;
  for (int rep = 0; rep < a.repeat; ++rep) {
    for (const auto& q : queries) {
      auto t0 = Clock::now();
      const NeighborSet b = index->search_exact(q, a.k);
      brute_us.push_back(1e6 * seconds_since(t0));
      t0 = Clock::now();
      const NeighborSet p = index->search(q, a.k);
      part_us.push_back(1e6 * seconds_since(t0));
      if (!(b == p)) exact = false;
    }
  }
  const auto print = [&](const char* name, const LatencySummary& s) {
    out << name << ": mean_us=" << s.mean_us << " median_us=" << s.median_us
        << " p99_us=" << s.p99_us << " qps=" << s.qps << '\n';
  };
  out << "store: entries=" << ds.count() << " dim=" << ds.dim()
      << " partitions=" << index->partitions() << " k=" << a.k
      << " queries=" << a.queries << " repeat=" << a.repeat << '\n';
  print("brute_force", summarize(brute_us));
  print("partitioned", summarize(part_us));
  out << "exact: " << (exact ? "true" : "false") << '\n';
  return exact ? kExitOk : kExitData;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const std::string& spec_path, const std::string& dir, std::ostream& out) {
  const SynthSpec spec = SynthSpec::load(spec_path);
  const SynthCorpus corpus = generate(spec);
  write_corpus(corpus, spec, dir);
  std::size_t frames = 0;
  for (const auto& u : corpus.test) frames += u.frame_tokens.size();
  out << "vocab=" << corpus.vocab.size() << " train_cn=" << corpus.train_cn.size()
      << " train_en=" << corpus.train_en.size() << " test=" << corpus.test.size()
      << " test_frames=" << frames << '\n';
  return kExitOk;
}

// Fills options not given on the command line from a TOML file. Keys are
// option names with '_' or '-', optionally under a [decode] table.
void apply_config(CLI::App& sub, const std::string& path) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    throw Error(ErrorKind::kConfig, path + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() &&
        !(item.parents.size() == 1 && item.parents.front() == sub.get_name())) {
      throw Error(ErrorKind::kConfig, path + ": unknown section for key \"" + item.name + "\"");
    }
    std::string flag = item.name;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt = sub.get_option_no_throw("--" + flag);
    if (opt == nullptr || flag == "config" || flag == "help") {
      throw Error(ErrorKind::kConfig, path + ": unknown key \"" + item.name + "\"");
    }
    if (opt->count() > 0) continue;
    try {
      opt->add_result(item.inputs);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw Error(ErrorKind::kConfig, path + ": " + item.name + ": " + e.what());
    }
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"gknn: kNN-CTC decoding with gated monolingual datastores"};
  app.require_subcommand(1);

  BuildArgs build_args;
  auto* build = app.add_subcommand("build", "Build a datastore from embedding/logit tensors");
  build->add_option("--embeddings", build_args.embeddings, "Embedding tensor (TNSR)")->required();
  build->add_option("--logits", build_args.logits, "prob/logprob tensor (TNSR)")->required();
  build->add_option("--lang", build_args.lang, "Store language: cn, en or all")->required();
  build->add_option("--vocab", build_args.vocab, "Vocabulary file")->required();
  build->add_option("--out", build_args.out, "Output datastore path")->required();

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode", "Greedy-decode a manifest in mode s0-s3");
  std::string decode_config;
  decode->add_option("--config", decode_config,
                     "TOML file of decode option values (mode, k, n, tau, lambda, t, "
                     "store_cn, ...); command-line flags take precedence");
  decode->add_option("--manifest", dec.manifest, "Utterance manifest (JSON Lines)")->required();
  decode->add_option("--vocab", dec.vocab, "Vocabulary file")->required();
  decode->add_option("--mode", dec.mode,
                     "s0 CTC only | s1 bilingual store | s2 gated dual stores | "
                     "s3 gated dual stores + alternate-language scaling")
      ->capture_default_str();
  decode->add_option("--store-cn", dec.store_cn, "CN datastore (s2, s3)");
  decode->add_option("--store-en", dec.store_en, "EN datastore (s2, s3)");
  decode->add_option("--store-all", dec.store_all, "Bilingual datastore (s1)");
  decode->add_option("--k", dec.fusion.k, "Neighbors per retrieval (published setting: 1024)")
      ->capture_default_str();
  decode->add_option("--n", dec.fusion.n,
                     "Top-n neighbors averaged by the gate (published: 300 for Conformer, "
                     "10 for Wav2vec2-XLSR)")
      ->capture_default_str();
  decode->add_option("--tau", dec.fusion.tau, "kNN temperature over squared L2 distances")
      ->capture_default_str();
  decode->add_option("--lambda", dec.fusion.lambda,
                     "kNN interpolation weight (published: about 0.25)")
      ->capture_default_str();
  decode->add_option("--t", dec.fusion.t,
                     "Alternate-language scale temperature (published: 5 for Conformer, "
                     "200 for Wav2vec2-XLSR)")
      ->capture_default_str();
  decode->add_option("--out", dec.out, "Hypothesis output (JSON Lines)")->required();
  decode->add_option("--frame-ms", dec.frame_ms, "Frame duration used for RTF")
      ->capture_default_str();
  decode->add_option("--threads", dec.threads, "Utterance-level worker threads")
      ->capture_default_str();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Mixture error rate of hypotheses against a manifest");
  eval->add_option("--hyp", ev.hyp, "Hypotheses (JSON Lines from decode)")->required();
  eval->add_option("--manifest", ev.manifest, "Reference manifest")->required();
  eval->add_option("--json", ev.json, "Also write the report as JSON");
  eval->add_option("--timing", ev.timing, "Timing sidecar (default: <hyp>.timing.jsonl)");

  TraceArgs tr;
  auto* trace = app.add_subcommand("trace", "Per-frame gate distances as CSV");
  trace->add_option("--manifest", tr.manifest, "Utterance manifest")->required();
  trace->add_option("--store-cn", tr.store_cn, "CN datastore")->required();
  trace->add_option("--store-en", tr.store_en, "EN datastore")->required();
  trace->add_option("--n", tr.n, "Top-n neighbors averaged per store")->capture_default_str();
  trace->add_option("--out", tr.out, "CSV output")->required();

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Search latency, full scan vs partitioned");
  bench->add_option("--store", bn.store, "Datastore")->required();
  bench->add_option("--queries", bn.queries, "Number of queries")->capture_default_str();
  bench->add_option("--k", bn.k, "Neighbors per query")->capture_default_str();
  bench->add_option("--repeat", bn.repeat, "Passes over the query set")->capture_default_str();
  bench->add_option("--seed", bn.seed, "Query generator seed")->capture_default_str();

  std::string spec_path;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic bilingual corpus");
  synth->add_option("--spec", spec_path, "Synthetic corpus spec (JSON)")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (decode->parsed() && !decode_config.empty()) apply_config(*decode, decode_config);
    if (build->parsed()) return cmd_build(build_args, out);
    if (decode->parsed()) return cmd_decode(dec, out, err);
    if (eval->parsed()) return cmd_eval(ev, out, err);
    if (trace->parsed()) return cmd_trace(tr, out);
    if (bench->parsed()) return cmd_bench(bn, out, err);
    if (synth->parsed()) return cmd_synth(spec_path, synth_out, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace gknn::cli
