#pragma once

// Corpus ingestion and augmentation: sectioned-text parsing, empty-sentence
// prepending, per-turn truncation replicas, near-duplicate scanning between
// corpora, and corpus statistics.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "structseg/codec.hpp"
#include "structseg/corpus.hpp"
#include "structseg/segmenters.hpp"
#include "structseg/text.hpp"
#include "structseg/types.hpp"

namespace structseg {

// ---------------------------------------------------------------------------
// Sectioned plain text

struct SectionHeader {
  int level = 0;
  std::string title;
};

/// Recognizes "========,<level>,<title>." lines. Anything that does not fit
/// the pattern is not a header.
inline std::optional<SectionHeader> parse_section_header(std::string_view line) {
  line = text::trim(line);
  std::size_t eq = 0;
  while (eq < line.size() && line[eq] == '=') ++eq;
  if (eq < 2 || eq >= line.size() || line[eq] != ',') return std::nullopt;
  auto rest = line.substr(eq + 1);
  const auto comma = rest.find(',');
  if (comma == std::string_view::npos || comma == 0) return std::nullopt;
  int level = 0;
  const auto level_text = rest.substr(0, comma);
  const auto [ptr, ec] = std::from_chars(level_text.data(), level_text.data() + level_text.size(), level);
  if (ec != std::errc{} || ptr != level_text.data() + level_text.size() || level < 1) return std::nullopt;
  auto title = text::trim(rest.substr(comma + 1));
  if (!title.empty() && title.back() == '.') title.remove_suffix(1);
  return SectionHeader{level, std::string(text::trim(title))};
}

struct SectionOptions {
  int max_depth = 1;  // headers deeper than this are folded into the enclosing segment
  Modality modality = Modality::document;
};

struct SectionedParse {
  Example example;
  std::size_t empty_segments_dropped = 0;
};

/// Builds a labeled document from one sectioned text file. Each header at
/// level <= max_depth opens a segment labeled with its title; sentences are the
/// remaining non-blank lines. Sentences before the first header form an
/// unlabeled segment.
inline SectionedParse parse_sectioned_text(std::string_view raw, std::string id,
                                           const SectionOptions& opts = {}) {
  struct Section {
    std::string title;
    std::vector<std::string> lines;
  };
  std::vector<Section> sections;
  bool saw_header = false;

  std::size_t start = 0;
  while (start <= raw.size()) {
    auto end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    auto line = raw.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (auto header = parse_section_header(line)) {
      saw_header = true;
      if (header->level <= opts.max_depth || sections.empty())
        sections.push_back({header->title, {}});
      continue;
    }
    if (text::trim(line).empty()) continue;
    if (sections.empty()) sections.push_back({"", {}});
    sections.back().lines.emplace_back(line);
  }

  if (!saw_header) throw std::invalid_argument("document '" + id + "': no section header found");

  SectionedParse out{Example{Document(id, {""}), std::nullopt, {}}, 0};
  std::vector<std::string> sentences;
  std::vector<std::size_t> boundaries;
  std::vector<std::string> labels;
  for (auto& s : sections) {
    if (s.lines.empty()) {
      ++out.empty_segments_dropped;
      continue;
    }
    for (auto& l : s.lines) sentences.push_back(std::move(l));
    boundaries.push_back(sentences.size() - 1);
    labels.push_back(std::move(s.title));
  }
  if (sentences.empty()) throw std::invalid_argument("document '" + id + "': no sentences under any header");

  const std::size_t n = sentences.size();
  LabeledSegmentation ls(Segmentation(std::move(boundaries), n), std::move(labels));
  out.example = Example::from(Document(std::move(id), std::move(sentences), opts.modality), ls);
  return out;
}

// ---------------------------------------------------------------------------
// Augmentation

/// Inserts `count` empty sentences at the front. They join the first segment,
/// so every boundary shifts by `count` and labels are unchanged.
inline Example prepend_empty_sentences(const Example& ex, std::size_t count) {
  if (count == 0) return ex;
  std::vector<std::string> sentences(count);
  sentences.insert(sentences.end(), ex.document.sentences().begin(), ex.document.sentences().end());
  Example out{Document(ex.document.id(), std::move(sentences), ex.document.modality()), std::nullopt,
              ex.labels};
  if (ex.segmentation) {
    auto b = ex.segmentation->boundaries();
    for (auto& x : b) x += count;
    out.segmentation = Segmentation(std::move(b), out.document.size());
  }
  return out;
}

inline std::pair<Document, LabeledSegmentation> prepend_empty_sentences(const Document& doc,
                                                                        const LabeledSegmentation& ls,
                                                                        std::size_t count) {
  auto ex = prepend_empty_sentences(Example::from(doc, ls), count);
  return {ex.document, ex.labeled_segmentation()};
}

/// Seeded source of prepend counts, uniform over [0, max].
class PrependSampler {
 public:
  explicit PrependSampler(std::uint64_t seed, std::size_t max = 1000) : rng_(seed), dist_(0, max) {}

  std::size_t next() { return dist_(rng_); }

 private:
  std::mt19937_64 rng_;
  std::uniform_int_distribution<std::size_t> dist_;
};

inline std::size_t sample_prepend_count(std::uint64_t seed, std::size_t max = 1000) {
  return PrependSampler(seed, max).next();
}

/// Keeps the first `max_tokens_per_turn` tokens of every turn, re-joined with
/// single spaces. Turns already within the limit are left byte-identical.
/// Non-conversation documents are returned unchanged.
inline Document truncate_turns(const Document& doc, std::size_t max_tokens_per_turn) {
  if (max_tokens_per_turn == 0) throw std::invalid_argument("max_tokens_per_turn must be >= 1");
  if (doc.modality() != Modality::conversation) return doc;
  std::vector<std::string> turns;
  turns.reserve(doc.size());
  for (const auto& turn : doc.sentences()) {
    auto tokens = text::tokenize(turn);
    if (tokens.size() <= max_tokens_per_turn) {
      turns.push_back(turn);
      continue;
    }
    tokens.resize(max_tokens_per_turn);
    turns.push_back(text::join(tokens, " "));
  }
  return Document(doc.id(), std::move(turns), doc.modality());
}

inline const std::vector<std::size_t>& default_truncation_limits() {
  static const std::vector<std::size_t> limits{20, 50, 200};
  return limits;
}

inline std::string replica_id(const std::string& id, std::size_t limit) {
  return id + "_trunc" + std::to_string(limit);
}

/// The original example followed by one truncated replica per limit.
inline std::vector<Example> replicate_with_truncations(
    const Example& ex, const std::vector<std::size_t>& limits = default_truncation_limits()) {
  if (limits.empty()) throw std::invalid_argument("at least one truncation limit is required");
  std::vector<Example> out{ex};
  for (auto limit : limits) {
    auto truncated = truncate_turns(ex.document, limit);
    out.push_back({Document(replica_id(ex.document.id(), limit), truncated.sentences(),
                            truncated.modality()),
                   ex.segmentation, ex.labels});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Near-duplicate scan

struct DuplicatePair {
  std::string id_a;
  std::string id_b;
  double similarity = 0.0;

  friend bool operator==(const DuplicatePair&, const DuplicatePair&) = default;
};

/// Whole-document bag of words used for the duplicate scan.
inline TermVector document_terms(const Document& doc) {
  TermVector v;
  for (const auto& s : doc.sentences())
    for (auto& tok : text::tokenize_folded(s))
      if (!text::is_punctuation_token(tok)) v[tok] += 1.0;
  return v;
}

/// Re-weights term counts by smoothed idf, ln((1 + N) / (1 + df)) + 1, with
/// document frequencies taken over both corpora together.
inline std::pair<std::vector<TermVector>, std::vector<TermVector>> tfidf_vectors(
    const std::vector<Document>& a, const std::vector<Document>& b) {
  std::vector<TermVector> va, vb;
  va.reserve(a.size());
  vb.reserve(b.size());
  std::map<std::string, std::size_t> df;
  for (const auto& d : a) {
    va.push_back(document_terms(d));
    for (const auto& [t, c] : va.back()) ++df[t];
  }
  for (const auto& d : b) {
    vb.push_back(document_terms(d));
    for (const auto& [t, c] : vb.back()) ++df[t];
  }
  const double n = static_cast<double>(a.size() + b.size());
  auto weigh = [&](std::vector<TermVector>& vs) {
    for (auto& v : vs)
      for (auto& [t, w] : v) w *= std::log((1.0 + n) / (1.0 + static_cast<double>(df[t]))) + 1.0;
  };
  weigh(va);
  weigh(vb);
  return {std::move(va), std::move(vb)};
}

/// All cross-corpus pairs with cosine >= threshold, highest first. Candidates
/// come from an inverted index over corpus b, so only pairs sharing at least
/// one term are ever scored. Per pair, products are summed in term order, which
/// makes the result bit-identical when the corpora are swapped.
inline std::vector<DuplicatePair> near_duplicate_scan_vectors(const std::vector<std::string>& ids_a,
                                                              const std::vector<TermVector>& vecs_a,
                                                              const std::vector<std::string>& ids_b,
                                                              const std::vector<TermVector>& vecs_b,
                                                              double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must lie in (0, 1]");
  if (ids_a.size() != vecs_a.size() || ids_b.size() != vecs_b.size())
    throw std::invalid_argument("near_duplicate_scan: ids and vectors differ in length");
  if (vecs_a.empty() || vecs_b.empty()) return {};

  // Shared term ids, ordered by term string.
  std::map<std::string, std::uint32_t> vocab;
  for (const auto* side : {&vecs_a, &vecs_b})
    for (const auto& v : *side)
      for (const auto& [t, w] : v) vocab.emplace(t, 0);
  std::uint32_t next_id = 0;
  for (auto& [t, id] : vocab) id = next_id++;

  using Sparse = std::vector<std::pair<std::uint32_t, double>>;
  auto normalize = [&](const TermVector& v) {
    Sparse s;
    double norm = 0.0;
    for (const auto& [t, w] : v) norm += w * w;
    if (norm == 0.0) return s;
    norm = std::sqrt(norm);
    for (const auto& [t, w] : v)
      if (w != 0.0) s.emplace_back(vocab.at(t), w / norm);
    return s;
  };
  std::vector<Sparse> sa, sb;
  for (const auto& v : vecs_a) sa.push_back(normalize(v));
  for (const auto& v : vecs_b) sb.push_back(normalize(v));

  std::vector<std::vector<std::pair<std::uint32_t, double>>> postings(vocab.size());
  for (std::uint32_t j = 0; j < sb.size(); ++j)
    for (const auto& [term, w] : sb[j]) postings[term].emplace_back(j, w);

  struct Hit {
    std::size_t a, b;
    double sim;
  };
  std::vector<Hit> hits;
  std::vector<double> acc(sb.size(), 0.0);
  std::vector<char> seen(sb.size(), 0);
  std::vector<std::uint32_t> touched;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    for (const auto& [term, wa] : sa[i]) {
      for (const auto& [j, wb] : postings[term]) {
        if (!seen[j]) {
          seen[j] = 1;
          touched.push_back(j);
        }
        acc[j] += wa * wb;
      }
    }
    for (auto j : touched) {
      const double sim = std::min(acc[j], 1.0);
      if (sim >= threshold) hits.push_back({i, j, sim});
      acc[j] = 0.0;
      seen[j] = 0;
    }
    touched.clear();
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) {
    if (x.sim != y.sim) return x.sim > y.sim;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  std::vector<DuplicatePair> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back({ids_a[h.a], ids_b[h.b], h.sim});
  return out;
}

/// Duplicate scan with tf-idf document vectors.
inline std::vector<DuplicatePair> near_duplicate_scan(const std::vector<Document>& a,
                                                      const std::vector<Document>& b, double threshold) {
  auto [va, vb] = tfidf_vectors(a, b);
  std::vector<std::string> ida, idb;
  for (const auto& d : a) ida.push_back(d.id());
  for (const auto& d : b) idb.push_back(d.id());
  return near_duplicate_scan_vectors(ida, va, idb, vb, threshold);
}

/// Duplicate scan with a caller-supplied document embedder (Document -> TermVector).
template <typename Embed>
  requires std::is_invocable_r_v<TermVector, const Embed&, const Document&>
std::vector<DuplicatePair> near_duplicate_scan(const std::vector<Document>& a, const std::vector<Document>& b,
                                               double threshold, const Embed& embed) {
  std::vector<std::string> ida, idb;
  std::vector<TermVector> va, vb;
  for (const auto& d : a) {
    ida.push_back(d.id());
    va.push_back(embed(d));
  }
  for (const auto& d : b) {
    idb.push_back(d.id());
    vb.push_back(embed(d));
  }
  return near_duplicate_scan_vectors(ida, va, idb, vb, threshold);
}

// ---------------------------------------------------------------------------
// Corpus statistics

struct CorpusStats {
  std::size_t num_docs = 0;
  std::map<std::size_t, std::size_t> sentence_count_histogram;
  std::map<std::size_t, std::size_t> segment_count_histogram;  // 0 = unsegmented
  std::size_t max_sentences = 0;
  std::size_t max_tokens = 0;  // tokens plus one position marker per sentence
  std::size_t malformed_lines = 0;

  void add(const Example& ex) {
    ++num_docs;
    ++sentence_count_histogram[ex.document.size()];
    ++segment_count_histogram[ex.segmentation ? ex.segmentation->num_segments() : 0];
    max_sentences = std::max(max_sentences, ex.document.size());
    std::size_t tokens = ex.document.size();
    for (const auto& s : ex.document.sentences()) tokens += text::tokenize(s).size();
    max_tokens = std::max(max_tokens, tokens);
  }
};

inline CorpusStats corpus_stats(const std::vector<Example>& corpus) {
  CorpusStats stats;
  for (const auto& ex : corpus) stats.add(ex);
  return stats;
}

inline CorpusStats corpus_stats(std::istream& is) {
  auto read = read_corpus(is);
  auto stats = corpus_stats(read.examples);
  stats.malformed_lines = read.errors.size();
  return stats;
}

inline ordered_json to_json(const CorpusStats& s) {
  auto hist = [](const std::map<std::size_t, std::size_t>& h) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : h) j[std::to_string(k)] = v;
    return j;
  };
  ordered_json j;
  j["num_docs"] = s.num_docs;
  j["sentence_count_histogram"] = hist(s.sentence_count_histogram);
  j["segment_count_histogram"] = hist(s.segment_count_histogram);
  j["max_sentences"] = s.max_sentences;
  j["max_tokens"] = s.max_tokens;
  j["malformed_lines"] = s.malformed_lines;
  return j;
}

}  // namespace structseg
