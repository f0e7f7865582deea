#pragma once

// Subcommand implementations for the structseg CLI. Each command reads files,
// writes data (or one JSON report) to `out` and diagnostics to `err`, and
// returns the process exit code: 0 success, 1 domain error, 2 usage error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "structseg/structseg.hpp"

namespace structseg::cli {

namespace fs = std::filesystem;

enum Exit : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// File helpers

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Regular files under `path` (or `path` itself), sorted by name.
inline std::vector<fs::path> input_files(const fs::path& path) {
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) return {path};
  if (!fs::is_directory(path, ec)) throw UsageError("cannot read " + path.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path, ec))
    if (entry.is_regular_file()) files.push_back(entry.path());
  if (ec) throw UsageError("cannot list " + path.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

inline std::vector<Example> load_corpus(const fs::path& path, std::ostream& err,
                                        std::size_t* malformed = nullptr) {
  std::vector<Example> corpus;
  for (const auto& file : input_files(path)) {
    std::istringstream in(read_file(file));
    auto read = read_corpus(in);
    for (const auto& e : read.errors) err << file.string() << ":" << e.line << ": " << e.message << "\n";
    if (malformed) *malformed += read.errors.size();
    for (auto& ex : read.examples) corpus.push_back(std::move(ex));
  }
  return corpus;
}

/// Reads generic JSONL records (one object per line).
inline std::vector<ordered_json> load_records(const fs::path& path, std::ostream& err) {
  std::vector<ordered_json> records;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      auto j = ordered_json::parse(line);
      if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
      records.push_back(std::move(j));
    } catch (const std::exception& e) {
      err << path.string() << ":" << lineno << ": " << e.what() << "\n";
    }
  }
  return records;
}

/// Writes to `output` when given, otherwise to `fallback`.
class OutputSink {
 public:
  OutputSink(const std::string& output, std::ostream& fallback) : stream_(&fallback) {
    if (!output.empty()) {
      file_.open(output, std::ios::binary | std::ios::trunc);
      if (!file_) throw UsageError("cannot write " + output);
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

inline TargetMode require_mode(const std::string& mode) {
  auto m = parse_target_mode(mode);
  if (!m) throw UsageError("unknown mode '" + mode + "' (expected seg_only, labels_only or combined)");
  return *m;
}

inline std::optional<std::size_t> optional_size(const ordered_json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  if (!j[key].is_number_integer() || j[key].get<long long>() < 0)
    throw std::invalid_argument(std::string("'") + key + "' must be a non-negative integer");
  return j[key].get<std::size_t>();
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string input;
  std::string format = "jsonl";  // jsonl | sectioned_text
  std::string output;
  std::string modality = "document";
  int max_depth = 1;
};

inline int cmd_ingest(const IngestArgs& args, std::ostream& out, std::ostream& err) {
  if (args.format != "jsonl" && args.format != "sectioned_text")
    throw UsageError("unknown format '" + args.format + "' (expected sectioned_text or jsonl)");
  const auto modality = parse_modality(args.modality);
  if (!modality) throw UsageError("unknown modality '" + args.modality + "'");
  const auto files = input_files(args.input);

  std::vector<Example> corpus;
  std::size_t rejected = 0, malformed = 0, empty_dropped = 0;
  if (args.format == "jsonl") {
    corpus = load_corpus(args.input, err, &malformed);
  } else {
    SectionOptions opts{args.max_depth, *modality};
    for (const auto& file : files) {
      try {
        auto parsed = parse_sectioned_text(read_file(file), file.stem().string(), opts);
        if (parsed.empty_segments_dropped)
          err << file.string() << ": dropped " << parsed.empty_segments_dropped << " empty section(s)\n";
        empty_dropped += parsed.empty_segments_dropped;
        corpus.push_back(std::move(parsed.example));
      } catch (const std::invalid_argument& e) {
        err << file.string() << ": " << e.what() << "\n";
        ++rejected;
      }
    }
  }

  OutputSink sink(args.output, out);
  for (const auto& ex : corpus) write_example(sink.stream(), ex);

  ordered_json stats;
  stats["files"] = files.size();
  stats["documents"] = corpus.size();
  stats["rejected"] = rejected;
  stats["malformed_lines"] = malformed;
  stats["empty_sections_dropped"] = empty_dropped;
  (sink.to_file() ? out : err) << dump_line(stats) << "\n";

  if (corpus.empty()) {
    err << "no documents ingested from " << args.input << "\n";
    return kDomainError;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// encode / decode

struct EncodeArgs {
  std::string corpus;
  std::string mode = "combined";
  std::string output;
};

inline int cmd_encode(const EncodeArgs& args, std::ostream& out, std::ostream& err) {
  const auto mode = require_mode(args.mode);
  const auto corpus = load_corpus(args.corpus, err);
  OutputSink sink(args.output, out);
  std::size_t written = 0;
  for (const auto& ex : corpus) {
    if (!ex.segmentation) {
      err << ex.document.id() << ": no boundaries, skipped\n";
      continue;
    }
    if (mode != TargetMode::seg_only && !ex.labeled()) {
      err << ex.document.id() << ": no labels for mode " << to_string(mode) << ", skipped\n";
      continue;
    }
    const auto target = mode == TargetMode::seg_only ? encode_segmentation(*ex.segmentation)
                                                     : encode(ex.labeled_segmentation(), mode);
    ordered_json j;
    j["id"] = ex.document.id();
    j["num_sentences"] = ex.document.size();
    j["target"] = target.text;
    sink.stream() << dump_line(j) << "\n";
    ++written;
  }
  return corpus.empty() || written ? kOk : kDomainError;
}

struct DecodeArgs {
  std::string input;
  std::string mode = "combined";
  std::string corpus;  // optional, supplies num_sentences by id
  std::string output;
};

inline int cmd_decode(const DecodeArgs& args, std::ostream& out, std::ostream& err) {
  const auto mode = require_mode(args.mode);
  std::map<std::string, std::size_t> lengths;
  if (!args.corpus.empty())
    for (const auto& ex : load_corpus(args.corpus, err)) lengths[ex.document.id()] = ex.document.size();

  OutputSink sink(args.output, out);
  int status = kOk;
  for (const auto& rec : load_records(args.input, err)) {
    try {
      if (!rec.contains("id") || !rec["id"].is_string()) throw std::invalid_argument("missing string 'id'");
      if (!rec.contains("target") || !rec["target"].is_string())
        throw std::invalid_argument("missing string 'target'");
      const auto id = rec["id"].get<std::string>();
      const auto raw = rec["target"].get<std::string>();
      ordered_json j;
      j["id"] = id;
      std::size_t dropped = 0;
      if (mode == TargetMode::labels_only) {
        auto decoded = decode_labels(raw);
        j["labels"] = decoded.labels;
      } else {
        auto n = optional_size(rec, "num_sentences");
        if (!n) {
          auto it = lengths.find(id);
          if (it == lengths.end()) throw std::invalid_argument("no num_sentences and no corpus entry");
          n = it->second;
        }
        if (*n == 0) throw std::invalid_argument("num_sentences must be >= 1");
        j["num_sentences"] = *n;
        if (mode == TargetMode::seg_only) {
          auto decoded = decode_segmentation(raw, *n);
          j["boundaries"] = decoded.segmentation.boundaries();
          dropped = decoded.dropped_parts;
        } else {
          auto decoded = decode_combined(raw, *n);
          j["boundaries"] = decoded.labeled.boundaries();
          j["labels"] = decoded.labeled.labels();
          dropped = decoded.dropped_parts;
        }
      }
      j["dropped_parts"] = dropped;
      if (dropped) err << id << ": dropped " << dropped << " unusable part(s) in " << to_string(mode) << " target\n";
      sink.stream() << dump_line(j) << "\n";
    } catch (const std::exception& e) {
      err << args.input << ": " << e.what() << "\n";
      status = kDomainError;
    }
  }
  return status;
}

// ---------------------------------------------------------------------------
// segment

struct SegmentArgs {
  std::string corpus;
  std::string method = "texttile";  // texttile | threshold
  std::string probs;
  double threshold = 0.5;
  TilingParams tiling;
  std::string output;
};

inline int cmd_segment(const SegmentArgs& args, std::ostream& out, std::ostream& err) {
  if (args.method != "texttile" && args.method != "threshold")
    throw UsageError("unknown method '" + args.method + "' (expected texttile or threshold)");
  if (args.method == "threshold" && args.probs.empty()) throw UsageError("--probs is required for threshold");
  if (!(args.threshold >= 0.0 && args.threshold <= 1.0)) throw UsageError("--threshold must lie in [0, 1]");
  if (args.tiling.block_size == 0) throw UsageError("--block-size must be >= 1");

  std::map<std::string, std::vector<double>> probs;
  if (args.method == "threshold") {
    if (!fs::is_regular_file(args.probs)) throw UsageError("cannot read " + args.probs);
    for (const auto& rec : load_records(args.probs, err)) {
      if (!rec.contains("id") || !rec["id"].is_string() || !rec.contains("probs") || !rec["probs"].is_array()) {
        err << args.probs << ": record without 'id' and 'probs'\n";
        continue;
      }
      std::vector<double> p;
      for (const auto& v : rec["probs"]) p.push_back(v.is_number() ? v.get<double>() : -1.0);
      probs[rec["id"].get<std::string>()] = std::move(p);
    }
  }

  const auto corpus = load_corpus(args.corpus, err);
  OutputSink sink(args.output, out);
  int status = kOk;
  for (const auto& ex : corpus) {
    const auto& doc = ex.document;
    try {
      std::optional<Segmentation> seg;
      if (args.method == "texttile") {
        seg = doc.size() < 2 ? Segmentation::single(doc.size()) : texttile(doc, args.tiling);
      } else {
        auto it = probs.find(doc.id());
        if (it == probs.end()) throw std::invalid_argument("no probabilities");
        if (it->second.size() != doc.size())
          throw std::invalid_argument(std::to_string(it->second.size()) + " probabilities for " +
                                      std::to_string(doc.size()) + " sentences");
        seg = threshold_segment(it->second, args.threshold);
      }
      ordered_json j;
      j["id"] = doc.id();
      j["num_sentences"] = doc.size();
      j["boundaries"] = seg->boundaries();
      sink.stream() << dump_line(j) << "\n";
    } catch (const std::invalid_argument& e) {
      err << doc.id() << ": " << e.what() << "\n";
      status = kDomainError;
    }
  }
  return status;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string reference;
  std::string hypothesis;
  std::string mode = "combined";
  std::optional<std::size_t> k;
  bool percent = false;
  std::string output;
};

/// Hypothesis records carry either a raw "target" string, decoded here
/// against the reference sentence count, or already-structured "boundaries"
/// / "labels" (with an optional "dropped_parts").
inline EvalItem eval_item(const Example& ref, const ordered_json& hyp, TargetMode mode) {
  const std::size_t n = ref.document.size();
  if (auto hn = optional_size(hyp, "num_sentences"); hn && *hn != n)
    throw std::invalid_argument("hypothesis has " + std::to_string(*hn) + " sentences, reference " +
                                std::to_string(n));
  if (mode != TargetMode::labels_only && !ref.segmentation)
    throw std::invalid_argument("reference has no boundaries");
  if (mode != TargetMode::seg_only && !ref.labeled()) throw std::invalid_argument("reference has no labels");

  EvalItem item{ref.segmentation.value_or(Segmentation::single(n)), ref.labels, std::nullopt, {}, 0};
  if (hyp.contains("target")) {
    if (!hyp["target"].is_string()) throw std::invalid_argument("'target' must be a string");
    const auto raw = hyp["target"].get<std::string>();
    switch (mode) {
      case TargetMode::seg_only: {
        auto d = decode_segmentation(raw, n);
        item.hypothesis = d.segmentation;
        item.dropped_parts = d.dropped_parts;
        break;
      }
      case TargetMode::combined: {
        auto d = decode_combined(raw, n);
        item.hypothesis = d.labeled.segmentation();
        item.hypothesis_labels = d.labeled.labels();
        item.dropped_parts = d.dropped_parts;
        break;
      }
      case TargetMode::labels_only:
        item.hypothesis_labels = decode_labels(raw).labels;
        break;
    }
    return item;
  }
  if (mode != TargetMode::labels_only) {
    if (!hyp.contains("boundaries")) throw std::invalid_argument("hypothesis has neither 'target' nor 'boundaries'");
    item.hypothesis = Segmentation(detail::read_indices(hyp["boundaries"], "boundaries"), n);
  }
  if (mode != TargetMode::seg_only) {
    if (!hyp.contains("labels")) throw std::invalid_argument("hypothesis has no 'labels'");
    item.hypothesis_labels = detail::read_strings(hyp["labels"], "labels");
    if (item.hypothesis) item.hypothesis_labels = LabeledSegmentation(*item.hypothesis, item.hypothesis_labels).labels();
  }
  item.dropped_parts = optional_size(hyp, "dropped_parts").value_or(0);
  return item;
}

inline ordered_json to_json(const EvalReport& r, bool percent) {
  const double scale = percent ? 100.0 : 1.0;
  auto rate = [&](const std::optional<double>& v) { return v ? ordered_json(*v * scale) : ordered_json(nullptr); };
  auto rouge = [&](const std::optional<RougeScore>& s) {
    if (!s) return ordered_json(nullptr);
    ordered_json j;
    j["p"] = s->precision * scale;
    j["r"] = s->recall * scale;
    j["f"] = s->f1 * scale;
    return j;
  };
  ordered_json j;
  j["pk"] = rate(r.pk);
  j["rouge1"] = rouge(r.rouge1);
  j["rouge2"] = rouge(r.rouge2);
  j["rougeL"] = rouge(r.rougeL);
  j["label_f1"] = rate(r.label_f1);
  j["erroneous_fraction"] = r.erroneous_fraction * scale;
  j["documents_evaluated"] = r.documents_evaluated;
  j["k_values"] = r.k_values;
  return j;
}

inline int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  const auto mode = require_mode(args.mode);
  if (args.k && *args.k == 0) throw UsageError("--k must be >= 1");
  const auto refs = load_corpus(args.reference, err);
  if (!fs::is_regular_file(args.hypothesis)) throw UsageError("cannot read " + args.hypothesis);
  const auto hyps = load_records(args.hypothesis, err);

  std::map<std::string, const ordered_json*> by_id;
  for (const auto& h : hyps) {
    if (!h.contains("id") || !h["id"].is_string()) throw DomainError("hypothesis record without 'id'");
    if (!by_id.emplace(h["id"].get<std::string>(), &h).second)
      throw DomainError("duplicate hypothesis id '" + h["id"].get<std::string>() + "'");
  }
  std::set<std::string> ref_ids;
  std::vector<EvalItem> items;
  for (const auto& ref : refs) {
    const auto& id = ref.document.id();
    if (!ref_ids.insert(id).second) throw DomainError("duplicate reference id '" + id + "'");
    auto it = by_id.find(id);
    if (it == by_id.end()) throw DomainError("no hypothesis for reference '" + id + "'");
    try {
      items.push_back(eval_item(ref, *it->second, mode));
    } catch (const std::invalid_argument& e) {
      throw DomainError(id + ": " + e.what());
    }
  }
  for (const auto& [id, h] : by_id)
    if (!ref_ids.count(id)) throw DomainError("hypothesis '" + id + "' has no reference");
  if (items.empty()) throw DomainError("no documents to evaluate");

  const auto report = evaluate(items, {mode, args.k});
  OutputSink sink(args.output, out);
  sink.stream() << dump_line(to_json(report, args.percent)) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// augment

struct AugmentArgs {
  std::string corpus;
  std::vector<std::string> ops{"prepend_empty", "truncate_replicas"};
  std::uint64_t seed = 0;
  std::size_t max_prepend = 1000;
  std::vector<std::size_t> limits = default_truncation_limits();
  std::string output;
};

inline int cmd_augment(const AugmentArgs& args, std::ostream& out, std::ostream& err) {
  bool prepend = false, replicas = false;
  for (const auto& op : args.ops) {
    if (op == "prepend_empty")
      prepend = true;
    else if (op == "truncate_replicas")
      replicas = true;
    else
      throw UsageError("unknown augmentation '" + op + "' (expected prepend_empty or truncate_replicas)");
  }
  if (replicas && (args.limits.empty() || std::count(args.limits.begin(), args.limits.end(), 0u)))
    throw UsageError("--limits must be non-empty and positive");

  const auto corpus = load_corpus(args.corpus, err);
  PrependSampler sampler(args.seed, args.max_prepend);
  OutputSink sink(args.output, out);
  std::size_t skipped_replicas = 0;
  for (const auto& ex : corpus) {
    std::vector<Example> batch{ex};
    if (replicas) {
      if (ex.document.modality() == Modality::conversation)
        batch = replicate_with_truncations(ex, args.limits);
      else
        ++skipped_replicas;
    }
    for (auto& e : batch) write_example(sink.stream(), prepend ? prepend_empty_sentences(e, sampler.next()) : e);
  }
  if (skipped_replicas)
    err << "truncate_replicas: " << skipped_replicas << " non-conversation document(s) passed through\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// dedup

struct DedupArgs {
  std::string corpus_a;
  std::string corpus_b;
  double threshold = 0.9;
  std::string output;
};

inline int cmd_dedup(const DedupArgs& args, std::ostream& out, std::ostream& err) {
  if (!(args.threshold > 0.0 && args.threshold <= 1.0)) throw UsageError("--threshold must lie in (0, 1]");
  auto docs = [&](const std::string& path) {
    std::vector<Document> d;
    for (auto& ex : load_corpus(path, err)) d.push_back(std::move(ex.document));
    return d;
  };
  const auto a = docs(args.corpus_a);
  const auto b = docs(args.corpus_b);
  if (a.empty() || b.empty()) err << "warning: empty corpus, nothing to compare\n";

  const auto pairs = near_duplicate_scan(a, b, args.threshold);
  OutputSink sink(args.output, out);
  for (const auto& p : pairs) {
    ordered_json j;
    j["id_a"] = p.id_a;
    j["id_b"] = p.id_b;
    j["similarity"] = p.similarity;
    sink.stream() << dump_line(j) << "\n";
  }
  err << pairs.size() << " pair(s) with similarity >= " << args.threshold << " across " << a.size() << " x "
      << b.size() << " documents\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
  std::string corpus;
  std::string output;
};

inline int cmd_stats(const StatsArgs& args, std::ostream& out, std::ostream& err) {
  std::size_t malformed = 0;
  auto stats = corpus_stats(load_corpus(args.corpus, err, &malformed));
  stats.malformed_lines = malformed;
  OutputSink sink(args.output, out);
  sink.stream() << dump_line(to_json(stats)) << "\n";
  return kOk;
}

}  // namespace structseg::cli
