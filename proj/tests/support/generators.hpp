#pragma once

// Seeded random generators for property tests.

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "structseg/structseg.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Boundary list over n sentences with exactly `segments` segments.
inline std::vector<std::size_t> boundaries(Rng& rng, std::size_t n, std::size_t segments) {
  segments = std::clamp<std::size_t>(segments, 1, n);
  std::vector<std::size_t> cuts(n - 1);
  std::iota(cuts.begin(), cuts.end(), 0);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(segments - 1);
  cuts.push_back(n - 1);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

inline structseg::Segmentation segmentation(Rng& rng, std::size_t max_sentences, std::size_t max_segments) {
  const std::size_t n = uniform(rng, 1, max_sentences);
  const std::size_t m = uniform(rng, 1, std::min(n, max_segments));
  return structseg::Segmentation(boundaries(rng, n, m), n);
}

inline std::string word(Rng& rng) {
  static const std::vector<std::string> pool{"history", "Geography", "early life", "career", "économie",
                                             "see also", "References", "taxonomy", "2019 season", "Ω"};
  return pool[uniform(rng, 0, pool.size() - 1)];
}

/// Label text with occasional delimiter characters and odd spacing mixed in.
inline std::string label(Rng& rng) {
  std::string out;
  const std::size_t words = uniform(rng, 0, 3);
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out += uniform(rng, 0, 6) == 0 ? "  " : " ";
    out += word(rng);
    switch (uniform(rng, 0, 12)) {
      case 0:
        out += "|";
        break;
      case 1:
        out += ":=";
        break;
      case 2:
        out += ":";
        break;
      case 3:
        out += "=";
        break;
      default:
        break;
    }
  }
  return out;
}

inline structseg::LabeledSegmentation labeled(Rng& rng, std::size_t max_sentences, std::size_t max_segments) {
  auto seg = segmentation(rng, max_sentences, max_segments);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < seg.num_segments(); ++i) labels.push_back(label(rng));
  return structseg::LabeledSegmentation(std::move(seg), std::move(labels));
}

inline std::string sentence(Rng& rng, std::size_t max_words = 12) {
  static const std::vector<std::string> pool{"the", "river", "flows", "north", "city", "was", "founded",
                                             "in", "1820", "by", "settlers", "and", "grew", "quickly",
                                             "population", "declined", "after", "war", "(see", "below)."};
  std::string out;
  const std::size_t words = uniform(rng, 0, max_words);
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out += ' ';
    out += pool[uniform(rng, 0, pool.size() - 1)];
  }
  return out;
}

inline structseg::Document document(Rng& rng, std::size_t max_sentences,
                                    structseg::Modality modality = structseg::Modality::document) {
  const std::size_t n = uniform(rng, 1, max_sentences);
  std::vector<std::string> sentences;
  for (std::size_t i = 0; i < n; ++i) sentences.push_back(sentence(rng));
  return structseg::Document("doc" + std::to_string(rng() % 100000), std::move(sentences), modality);
}

/// Document made of vocabulary-disjoint blocks; returns the document and the
/// true boundaries (last sentence of each block).
struct BlockDocument {
  structseg::Document document;
  structseg::Segmentation truth;
};

inline BlockDocument disjoint_blocks(Rng& rng, std::size_t blocks, std::size_t min_len, std::size_t max_len,
                                     std::size_t vocab_per_block = 6, std::size_t words_per_sentence = 10) {
  std::vector<std::string> sentences;
  std::vector<std::size_t> bounds;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t len = uniform(rng, min_len, max_len);
    for (std::size_t s = 0; s < len; ++s) {
      std::string sent;
      for (std::size_t w = 0; w < words_per_sentence; ++w) {
        if (w) sent += ' ';
        sent += "b" + std::to_string(b) + "w" + std::to_string(uniform(rng, 0, vocab_per_block - 1));
      }
      sentences.push_back(sent + ".");
    }
    bounds.push_back(sentences.size() - 1);
  }
  const std::size_t n = sentences.size();
  return {structseg::Document("blocks", std::move(sentences)), structseg::Segmentation(std::move(bounds), n)};
}

}  // namespace gen
