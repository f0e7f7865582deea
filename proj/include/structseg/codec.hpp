#pragma once

// Target-sequence codec.
//
//   seg_only     "31 | 410 | 680"
//   labels_only  "History | Geography"
//   combined     "31 := History | 410 := Geography"
//
// Encoding is exact. Decoding is total: any input string yields a valid
// segmentation, and the number of unusable parts is reported alongside so
// callers can measure how often generated output was malformed.

#include <algorithm>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "structseg/text.hpp"
#include "structseg/types.hpp"

namespace structseg {

inline constexpr std::string_view kSegmentDelimiter = " | ";
inline constexpr std::string_view kPairDelimiter = " := ";

struct DecodedSegmentation {
  Segmentation segmentation;
  std::size_t dropped_parts = 0;
};

struct DecodedLabeledSegmentation {
  LabeledSegmentation labeled;
  std::size_t dropped_parts = 0;
};

struct DecodedLabels {
  std::vector<std::string> labels;
  std::size_t dropped_parts = 0;
};

inline TargetSequence encode_segmentation(const Segmentation& seg) {
  std::string out;
  for (std::size_t i = 0; i < seg.boundaries().size(); ++i) {
    if (i) out += kSegmentDelimiter;
    out += std::to_string(seg.boundaries()[i]);
  }
  return {std::move(out), TargetMode::seg_only};
}

inline TargetSequence encode_labels(const std::vector<std::string>& labels) {
  return {text::join(labels, kSegmentDelimiter), TargetMode::labels_only};
}

inline TargetSequence encode_combined(const LabeledSegmentation& ls) {
  std::string out;
  const auto& b = ls.boundaries();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out += kSegmentDelimiter;
    out += std::to_string(b[i]);
    out += kPairDelimiter;
    out += ls.labels()[i];
  }
  return {std::move(out), TargetMode::combined};
}

inline TargetSequence encode(const LabeledSegmentation& ls, TargetMode mode) {
  switch (mode) {
    case TargetMode::seg_only:
      return encode_segmentation(ls.segmentation());
    case TargetMode::labels_only:
      return encode_labels(ls.labels());
    case TargetMode::combined:
      return encode_combined(ls);
  }
  return encode_combined(ls);
}

namespace detail {

// A sentence position: a plain run of decimal digits within [0, num_sentences).
inline std::optional<std::size_t> parse_position(std::string_view part, std::size_t num_sentences) {
  part = text::trim(part);
  if (part.empty()) return std::nullopt;
  unsigned long long value = 0;
  const auto* end = part.data() + part.size();
  const auto [ptr, ec] = std::from_chars(part.data(), end, value, 10);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  if (value >= num_sentences) return std::nullopt;
  return static_cast<std::size_t>(value);
}

inline std::vector<std::string_view> split_parts(std::string_view raw) {
  if (text::trim(raw).empty()) return {};
  return text::split(raw, "|");
}

}  // namespace detail

/// Parses a seg_only sequence. Invalid parts are skipped and counted; the
/// closing boundary num_sentences - 1 is added if missing (not counted).
inline DecodedSegmentation decode_segmentation(std::string_view raw, std::size_t num_sentences) {
  if (num_sentences == 0) throw std::invalid_argument("decode needs at least one sentence");
  std::vector<std::size_t> positions;
  std::size_t dropped = 0;
  for (auto part : detail::split_parts(raw)) {
    if (auto p = detail::parse_position(part, num_sentences))
      positions.push_back(*p);
    else
      ++dropped;
  }
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  if (positions.empty() || positions.back() != num_sentences - 1)
    positions.push_back(num_sentences - 1);
  return {Segmentation(std::move(positions), num_sentences), dropped};
}

/// Parses a combined sequence. Each part is split on its first ":="; a part
/// without ":=" is a bare position with an empty label. On duplicate positions
/// the first label seen wins.
inline DecodedLabeledSegmentation decode_combined(std::string_view raw, std::size_t num_sentences) {
  if (num_sentences == 0) throw std::invalid_argument("decode needs at least one sentence");
  struct Unit {
    std::size_t position;
    std::size_t order;
    std::string label;
  };
  std::vector<Unit> units;
  std::size_t dropped = 0;
  for (auto part : detail::split_parts(raw)) {
    const auto sep = part.find(":=");
    const auto pos_text = sep == std::string_view::npos ? part : part.substr(0, sep);
    const auto label = sep == std::string_view::npos ? std::string_view{}
                                                     : text::trim(part.substr(sep + 2));
    if (auto p = detail::parse_position(pos_text, num_sentences))
      units.push_back({*p, units.size(), std::string(label)});
    else
      ++dropped;
  }
  std::stable_sort(units.begin(), units.end(),
                   [](const Unit& a, const Unit& b) { return a.position < b.position; });
  std::vector<std::size_t> positions;
  std::vector<std::string> labels;
  for (auto& u : units) {
    if (!positions.empty() && positions.back() == u.position) continue;
    positions.push_back(u.position);
    labels.push_back(std::move(u.label));
  }
  if (positions.empty() || positions.back() != num_sentences - 1) {
    positions.push_back(num_sentences - 1);
    labels.emplace_back();
  }
  return {LabeledSegmentation(Segmentation(std::move(positions), num_sentences), std::move(labels)),
          dropped};
}

/// Splits a labels_only sequence. Nothing is ever dropped.
inline DecodedLabels decode_labels(std::string_view raw) {
  DecodedLabels out;
  for (auto part : detail::split_parts(raw)) out.labels.push_back(normalize_label(part));
  return out;
}

/// L[i] = 1 iff sentence i closes a segment.
inline std::vector<int> boundary_labels(const Segmentation& seg) {
  std::vector<int> v(seg.num_sentences(), 0);
  for (auto b : seg.boundaries()) v[b] = 1;
  return v;
}

inline Segmentation segmentation_from_labels(const std::vector<int>& v) {
  if (v.empty()) throw std::invalid_argument("empty boundary label vector");
  std::vector<std::size_t> boundaries;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) boundaries.push_back(i);
  if (boundaries.empty() || boundaries.back() != v.size() - 1) boundaries.push_back(v.size() - 1);
  return Segmentation(std::move(boundaries), v.size());
}

// ---------------------------------------------------------------------------
// Sentence-position marking of encoder input.

enum class MarkerScheme {
  fixed_bos,  // every sentence starts with the same marker (id 0)
  indexed,    // sentence i starts with marker id i
};

struct MarkedToken {
  std::string text;
  std::size_t sentence_index = 0;
  bool is_sentence_marker = false;
  std::optional<std::size_t> marker_id;

  friend bool operator==(const MarkedToken&, const MarkedToken&) = default;
};

struct MarkedTokenStream {
  std::vector<MarkedToken> tokens;
  MarkerScheme scheme = MarkerScheme::fixed_bos;

  std::size_t marker_count() const {
    return static_cast<std::size_t>(std::count_if(
        tokens.begin(), tokens.end(), [](const MarkedToken& t) { return t.is_sentence_marker; }));
  }
};

inline std::string marker_text(MarkerScheme scheme, std::size_t sentence_index) {
  if (scheme == MarkerScheme::fixed_bos) return "<bos>";
  return "<sent_" + std::to_string(sentence_index) + ">";
}

inline MarkedTokenStream mark_sentence_positions(const Document& doc, MarkerScheme scheme) {
  MarkedTokenStream out;
  out.scheme = scheme;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::size_t id = scheme == MarkerScheme::indexed ? i : 0;
    out.tokens.push_back({marker_text(scheme, i), i, true, id});
    for (auto& tok : text::tokenize(doc.sentences()[i]))
      out.tokens.push_back({std::move(tok), i, false, std::nullopt});
  }
  return out;
}

}  // namespace structseg
