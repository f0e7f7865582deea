#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "structseg/text.hpp"

namespace structseg {

enum class Modality { document, conversation };

inline std::string_view to_string(Modality m) {
  return m == Modality::conversation ? "conversation" : "document";
}

inline std::optional<Modality> parse_modality(std::string_view s) {
  if (s == "document") return Modality::document;
  if (s == "conversation") return Modality::conversation;
  return std::nullopt;
}

/// An ordered list of sentences (or conversation turns). Sentences may be
/// empty strings, but there is always at least one.
class Document {
 public:
  Document(std::string id, std::vector<std::string> sentences,
           Modality modality = Modality::document)
      : id_(std::move(id)), sentences_(std::move(sentences)), modality_(modality) {
    if (sentences_.empty()) throw std::invalid_argument("document '" + id_ + "' has no sentences");
  }

  const std::string& id() const { return id_; }
  const std::vector<std::string>& sentences() const { return sentences_; }
  Modality modality() const { return modality_; }
  std::size_t size() const { return sentences_.size(); }

  friend bool operator==(const Document&, const Document&) = default;

 private:
  std::string id_;
  std::vector<std::string> sentences_;
  Modality modality_;
};

/// Closed sentence interval [first, last] covered by one segment.
struct Span {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t length() const { return last - first + 1; }
  friend bool operator==(const Span&, const Span&) = default;
};

/// A linear segmentation stored as the index of the last sentence of every
/// segment. Boundaries are strictly increasing and the final one is always
/// num_sentences - 1, so the segments partition the document.
class Segmentation {
 public:
  Segmentation(std::vector<std::size_t> boundaries, std::size_t num_sentences)
      : boundaries_(std::move(boundaries)), num_sentences_(num_sentences) {
    if (num_sentences_ == 0) throw std::invalid_argument("segmentation over zero sentences");
    if (boundaries_.empty()) throw std::invalid_argument("segmentation without boundaries");
    for (std::size_t i = 0; i < boundaries_.size(); ++i) {
      if (boundaries_[i] >= num_sentences_)
        throw std::invalid_argument("boundary " + std::to_string(boundaries_[i]) +
                                    " out of range for " + std::to_string(num_sentences_) +
                                    " sentences");
      if (i && boundaries_[i] <= boundaries_[i - 1])
        throw std::invalid_argument("boundaries must be strictly increasing");
    }
    if (boundaries_.back() != num_sentences_ - 1)
      throw std::invalid_argument("final boundary must be the last sentence (" +
                                  std::to_string(num_sentences_ - 1) + ")");
  }

  /// One segment covering the whole document.
  static Segmentation single(std::size_t num_sentences) {
    return Segmentation({num_sentences - 1}, num_sentences);
  }

  const std::vector<std::size_t>& boundaries() const { return boundaries_; }
  std::size_t num_sentences() const { return num_sentences_; }
  std::size_t num_segments() const { return boundaries_.size(); }

  std::vector<Span> spans() const {
    std::vector<Span> out;
    out.reserve(boundaries_.size());
    std::size_t first = 0;
    for (auto b : boundaries_) {
      out.push_back({first, b});
      first = b + 1;
    }
    return out;
  }

  /// segment_ids()[i] is the 0-based segment that sentence i belongs to.
  std::vector<std::size_t> segment_ids() const {
    std::vector<std::size_t> ids(num_sentences_);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < num_sentences_; ++i) {
      ids[i] = seg;
      if (i == boundaries_[seg]) ++seg;
    }
    return ids;
  }

  friend bool operator==(const Segmentation&, const Segmentation&) = default;

 private:
  std::vector<std::size_t> boundaries_;
  std::size_t num_sentences_;
};

/// Replaces the codec delimiters inside a label and trims surrounding whitespace.
inline std::string normalize_label(std::string_view label) {
  std::string out = text::replace_all(std::string(label), ":=", "/");
  out = text::replace_all(std::move(out), "|", "/");
  return std::string(text::trim(out));
}

/// A segmentation with one free-text label per segment. Labels are normalized
/// on construction so they never contain "|" or ":=".
class LabeledSegmentation {
 public:
  LabeledSegmentation(Segmentation segmentation, std::vector<std::string> labels)
      : segmentation_(std::move(segmentation)), labels_(std::move(labels)) {
    if (labels_.size() != segmentation_.num_segments())
      throw std::invalid_argument("got " + std::to_string(labels_.size()) + " labels for " +
                                  std::to_string(segmentation_.num_segments()) + " segments");
    for (auto& l : labels_) l = normalize_label(l);
  }

  const Segmentation& segmentation() const { return segmentation_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::size_t>& boundaries() const { return segmentation_.boundaries(); }
  std::size_t num_sentences() const { return segmentation_.num_sentences(); }

  friend bool operator==(const LabeledSegmentation&, const LabeledSegmentation&) = default;

 private:
  Segmentation segmentation_;
  std::vector<std::string> labels_;
};

enum class TargetMode { seg_only, labels_only, combined };

inline std::string_view to_string(TargetMode m) {
  switch (m) {
    case TargetMode::seg_only:
      return "seg_only";
    case TargetMode::labels_only:
      return "labels_only";
    case TargetMode::combined:
      return "combined";
  }
  return "combined";
}

inline std::optional<TargetMode> parse_target_mode(std::string_view s) {
  if (s == "seg_only") return TargetMode::seg_only;
  if (s == "labels_only") return TargetMode::labels_only;
  if (s == "combined") return TargetMode::combined;
  return std::nullopt;
}

/// Flat string form of a (labeled) segmentation.
struct TargetSequence {
  std::string text;
  TargetMode mode = TargetMode::seg_only;

  friend bool operator==(const TargetSequence&, const TargetSequence&) = default;
};

}  // namespace structseg
