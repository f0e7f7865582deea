#pragma once

// Evaluation metrics: P_k, Rouge-1/2/L over serialized labels, label F1 after
// max-overlap alignment, and the erroneous-output fraction of raw targets.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "structseg/codec.hpp"
#include "structseg/text.hpp"
#include "structseg/types.hpp"

namespace structseg {

// ---------------------------------------------------------------------------
// P_k

/// Half the mean reference segment length, rounded half-up, at least 1.
inline std::size_t compute_k(const Segmentation& ref) {
  const std::size_t n = ref.num_segments();
  const std::size_t k = (ref.num_sentences() + n) / (2 * n);
  return std::max<std::size_t>(1, k);
}

/// Probability that two sentences k apart are in the same segment under one
/// segmentation but not the other. Windows are (i, i+k) for i in [0, |S|-k).
/// When k is not given it defaults to compute_k(ref); it is clamped to [1, |S|-1].
inline double pk(const Segmentation& ref, const Segmentation& hyp,
                 std::optional<std::size_t> k = std::nullopt) {
  const std::size_t n = ref.num_sentences();
  if (hyp.num_sentences() != n)
    throw std::invalid_argument("pk: reference has " + std::to_string(n) +
                                " sentences, hypothesis has " +
                                std::to_string(hyp.num_sentences()));
  if (n < 2) throw std::invalid_argument("pk is undefined for fewer than 2 sentences");
  std::size_t window = k ? *k : compute_k(ref);
  window = std::clamp<std::size_t>(window, 1, n - 1);

  const auto ref_ids = ref.segment_ids();
  const auto hyp_ids = hyp.segment_ids();
  std::size_t disagreements = 0;
  const std::size_t windows = n - window;
  for (std::size_t i = 0; i < windows; ++i) {
    const bool same_ref = ref_ids[i] == ref_ids[i + window];
    const bool same_hyp = hyp_ids[i] == hyp_ids[i + window];
    if (same_ref != same_hyp) ++disagreements;
  }
  return static_cast<double>(disagreements) / static_cast<double>(windows);
}

// ---------------------------------------------------------------------------
// Rouge

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static RougeScore from_counts(std::size_t overlap, std::size_t pred_total, std::size_t ref_total) {
    RougeScore s;
    s.precision = pred_total ? static_cast<double>(overlap) / static_cast<double>(pred_total) : 0.0;
    s.recall = ref_total ? static_cast<double>(overlap) / static_cast<double>(ref_total) : 0.0;
    const double sum = s.precision + s.recall;
    s.f1 = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
    return s;
  }
};

/// Raw overlap counts; summing these across documents gives corpus-level
/// (micro-averaged) Rouge.
struct RougeCounts {
  std::size_t overlap = 0;
  std::size_t pred_total = 0;
  std::size_t ref_total = 0;

  RougeCounts& operator+=(const RougeCounts& o) {
    overlap += o.overlap;
    pred_total += o.pred_total;
    ref_total += o.ref_total;
    return *this;
  }
  RougeScore score() const { return RougeScore::from_counts(overlap, pred_total, ref_total); }
};

inline std::string serialize_labels(const std::vector<std::string>& labels) {
  return text::join(labels, kSegmentDelimiter);
}

namespace detail {

inline std::map<std::vector<std::string>, std::size_t> ngram_counts(
    const std::vector<std::string>& tokens, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return counts;
}

inline std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace detail

inline RougeCounts rouge_n_counts(std::string_view pred, std::string_view ref, std::size_t n) {
  if (n == 0) throw std::invalid_argument("rouge_n needs n >= 1");
  const auto p = detail::ngram_counts(text::tokenize_folded(pred), n);
  const auto r = detail::ngram_counts(text::tokenize_folded(ref), n);
  RougeCounts c;
  for (const auto& [gram, count] : p) c.pred_total += count;
  for (const auto& [gram, count] : r) {
    c.ref_total += count;
    if (auto it = p.find(gram); it != p.end()) c.overlap += std::min(count, it->second);
  }
  return c;
}

inline RougeScore rouge_n(std::string_view pred, std::string_view ref, std::size_t n) {
  return rouge_n_counts(pred, ref, n).score();
}

inline RougeCounts rouge_l_counts(std::string_view pred, std::string_view ref) {
  const auto p = text::tokenize_folded(pred);
  const auto r = text::tokenize_folded(ref);
  return {detail::lcs_length(p, r), p.size(), r.size()};
}

inline RougeScore rouge_l(std::string_view pred, std::string_view ref) {
  return rouge_l_counts(pred, ref).score();
}

// ---------------------------------------------------------------------------
// Label F1

/// For each hypothesis segment, the index of the reference segment sharing
/// the most sentences with it. Ties go to the earlier reference segment.
inline std::vector<std::size_t> align_segments(const Segmentation& hyp, const Segmentation& ref) {
  if (hyp.num_sentences() != ref.num_sentences())
    throw std::invalid_argument("align_segments: sentence counts differ");
  const auto hyp_spans = hyp.spans();
  const auto ref_spans = ref.spans();
  std::vector<std::size_t> map;
  map.reserve(hyp_spans.size());
  std::size_t r = 0;  // first reference segment that can still overlap
  for (const auto& h : hyp_spans) {
    while (ref_spans[r].last < h.first) ++r;
    std::size_t best = r;
    std::size_t best_overlap = 0;
    for (std::size_t j = r; j < ref_spans.size() && ref_spans[j].first <= h.last; ++j) {
      const std::size_t lo = std::max(h.first, ref_spans[j].first);
      const std::size_t hi = std::min(h.last, ref_spans[j].last);
      const std::size_t overlap = hi - lo + 1;
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = j;
      }
    }
    map.push_back(best);
  }
  return map;
}

struct LabelAgreement {
  std::size_t correct = 0;
  std::size_t total = 0;

  LabelAgreement& operator+=(const LabelAgreement& o) {
    correct += o.correct;
    total += o.total;
    return *this;
  }
  double f1() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

inline bool labels_match(std::string_view a, std::string_view b) {
  return text::fold_case(text::trim(a)) == text::fold_case(text::trim(b));
}

inline LabelAgreement label_agreement(const LabeledSegmentation& hyp, const LabeledSegmentation& ref) {
  if (hyp.num_sentences() != ref.num_sentences())
    throw std::invalid_argument("label_f1: sentence counts differ");
  const auto map = align_segments(hyp.segmentation(), ref.segmentation());
  LabelAgreement a;
  for (std::size_t i = 0; i < map.size(); ++i) {
    ++a.total;
    if (labels_match(hyp.labels()[i], ref.labels()[map[i]])) ++a.correct;
  }
  return a;
}

/// Micro-averaged F1 over predicted segments. Every prediction has exactly
/// one gold label (its aligned reference segment), so each wrong prediction
/// is one false positive plus one false negative and
/// TP / (TP + (FP + FN) / 2) equals plain accuracy.
inline double label_f1(const LabeledSegmentation& hyp, const LabeledSegmentation& ref) {
  return label_agreement(hyp, ref).f1();
}

// ---------------------------------------------------------------------------
// Erroneous fraction

inline std::size_t dropped_parts(std::string_view raw, std::size_t num_sentences, TargetMode mode) {
  switch (mode) {
    case TargetMode::seg_only:
      return decode_segmentation(raw, num_sentences).dropped_parts;
    case TargetMode::combined:
      return decode_combined(raw, num_sentences).dropped_parts;
    case TargetMode::labels_only:
      return 0;
  }
  return 0;
}

/// Share of raw outputs with at least one unusable part. 0 for empty input.
inline double erroneous_fraction(const std::vector<std::string>& raws,
                                 const std::vector<std::size_t>& num_sentences,
                                 TargetMode mode = TargetMode::seg_only) {
  if (raws.size() != num_sentences.size())
    throw std::invalid_argument("erroneous_fraction: " + std::to_string(raws.size()) +
                                " outputs but " + std::to_string(num_sentences.size()) +
                                " sentence counts");
  if (raws.empty()) return 0.0;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < raws.size(); ++i)
    if (dropped_parts(raws[i], num_sentences[i], mode) > 0) ++bad;
  return static_cast<double>(bad) / static_cast<double>(raws.size());
}

// ---------------------------------------------------------------------------
// Corpus-level report

/// One reference/hypothesis pair. Label vectors are empty when unavailable.
struct EvalItem {
  Segmentation reference;
  std::vector<std::string> reference_labels;
  std::optional<Segmentation> hypothesis;
  std::vector<std::string> hypothesis_labels;
  std::size_t dropped_parts = 0;
};

struct EvalOptions {
  TargetMode mode = TargetMode::combined;
  std::optional<std::size_t> k;
};

/// Corpus results. pk is the mean of per-document P_k over documents with at
/// least two sentences; Rouge and label F1 are micro-averaged over the corpus.
/// Fields that the mode cannot produce are left empty.
struct EvalReport {
  std::optional<double> pk;
  std::optional<RougeScore> rouge1;
  std::optional<RougeScore> rouge2;
  std::optional<RougeScore> rougeL;
  std::optional<double> label_f1;
  double erroneous_fraction = 0.0;
  std::size_t documents_evaluated = 0;
  std::vector<std::size_t> k_values;
};

inline EvalReport evaluate(const std::vector<EvalItem>& items, const EvalOptions& opts) {
  EvalReport report;
  report.documents_evaluated = items.size();
  const bool want_pk = opts.mode != TargetMode::labels_only;
  const bool want_rouge = opts.mode != TargetMode::seg_only;
  const bool want_f1 = opts.mode == TargetMode::combined;

  double pk_sum = 0.0;
  std::size_t pk_docs = 0;
  RougeCounts r1, r2, rl;
  LabelAgreement agreement;
  bool have_labels = want_f1;
  std::size_t erroneous = 0;

  for (const auto& item : items) {
    if (item.dropped_parts > 0) ++erroneous;
    if (want_pk) {
      if (!item.hypothesis) throw std::invalid_argument("evaluate: hypothesis boundaries missing");
      std::size_t k = std::max<std::size_t>(1, opts.k.value_or(compute_k(item.reference)));
      if (item.reference.num_sentences() >= 2) {
        k = std::min(k, item.reference.num_sentences() - 1);
        pk_sum += pk(item.reference, *item.hypothesis, k);
        ++pk_docs;
      }
      report.k_values.push_back(k);
    }
    if (want_rouge) {
      const auto pred = serialize_labels(item.hypothesis_labels);
      const auto ref = serialize_labels(item.reference_labels);
      r1 += rouge_n_counts(pred, ref, 1);
      r2 += rouge_n_counts(pred, ref, 2);
      rl += rouge_l_counts(pred, ref);
    }
    if (want_f1) {
      if (item.reference_labels.empty() || !item.hypothesis ||
          item.hypothesis_labels.size() != item.hypothesis->num_segments()) {
        have_labels = false;
        continue;
      }
      agreement += label_agreement(LabeledSegmentation(*item.hypothesis, item.hypothesis_labels),
                                   LabeledSegmentation(item.reference, item.reference_labels));
    }
  }

  if (want_pk && pk_docs) report.pk = pk_sum / static_cast<double>(pk_docs);
  if (want_rouge) {
    report.rouge1 = r1.score();
    report.rouge2 = r2.score();
    report.rougeL = rl.score();
  }
  if (have_labels && agreement.total) report.label_f1 = agreement.f1();
  if (!items.empty())
    report.erroneous_fraction = static_cast<double>(erroneous) / static_cast<double>(items.size());
  return report;
}

}  // namespace structseg
