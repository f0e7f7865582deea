#pragma once

// Baseline segmenters: TextTiling-style valley detection on a coherence
// profile, thresholding of externally produced boundary probabilities, and
// the binary cross-entropy of such probabilities against a reference.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "structseg/codec.hpp"
#include "structseg/text.hpp"
#include "structseg/types.hpp"

namespace structseg {

/// Sparse bag-of-words vector keyed by token.
using TermVector = std::map<std::string, double>;

inline double cosine_similarity(const TermVector& a, const TermVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, w] : a) na += w * w;
  for (const auto& [t, w] : b) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

/// Maps a window of sentences to a vector comparable with cosine_similarity().
template <typename E>
concept SentenceEmbedder = requires(const E& e, std::span<const std::string> window) {
  { cosine_similarity(e(window), e(window)) } -> std::convertible_to<double>;
};

/// Default embedder: case-folded term frequencies, punctuation ignored.
struct TermFrequencyEmbedder {
  TermVector operator()(std::span<const std::string> window) const {
    TermVector v;
    for (const auto& sentence : window)
      for (auto& tok : text::tokenize_folded(sentence))
        if (!text::is_punctuation_token(tok)) v[tok] += 1.0;
    return v;
  }
};

struct TilingParams {
  std::size_t block_size = 3;       // sentences on each side of a gap
  std::size_t smoothing_width = 1;  // moving-average width; <= 1 disables smoothing
  double cutoff = 1.4;              // boundary iff depth >= mean + cutoff * stddev
};

/// scores[g] is the coherence across the gap between sentence g and g + 1.
struct CoherenceProfile {
  std::vector<double> scores;
  std::size_t block_size = 1;
};

namespace detail {

inline std::vector<double> moving_average(const std::vector<double>& xs, std::size_t width) {
  if (width <= 1 || xs.empty()) return xs;
  const std::size_t left = (width - 1) / 2;
  const std::size_t right = width / 2;
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(xs.size() - 1, i + right);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += xs[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace detail

template <SentenceEmbedder Embedder = TermFrequencyEmbedder>
CoherenceProfile coherence_profile(const Document& doc, const TilingParams& params,
                                   const Embedder& embed = {}) {
  const std::size_t n = doc.size();
  if (n < 2) throw std::invalid_argument("coherence_profile needs at least 2 sentences");
  if (params.block_size == 0) throw std::invalid_argument("block_size must be >= 1");
  const std::span<const std::string> sentences(doc.sentences());
  CoherenceProfile profile;
  profile.block_size = params.block_size;
  profile.scores.reserve(n - 1);
  for (std::size_t gap = 0; gap + 1 < n; ++gap) {
    const std::size_t left_begin = gap + 1 >= params.block_size ? gap + 1 - params.block_size : 0;
    const std::size_t right_end = std::min(n, gap + 1 + params.block_size);
    const auto left = sentences.subspan(left_begin, gap + 1 - left_begin);
    const auto right = sentences.subspan(gap + 1, right_end - gap - 1);
    profile.scores.push_back(static_cast<double>(cosine_similarity(embed(left), embed(right))));
  }
  profile.scores = detail::moving_average(profile.scores, params.smoothing_width);
  return profile;
}

/// Valley depth at every gap: the climb to the highest point reachable by
/// walking left while scores do not decrease, plus the same to the right.
/// Only valley bottoms score; slopes, plateaus and the two ends get 0.
inline std::vector<double> depth_scores(const CoherenceProfile& profile) {
  const auto& s = profile.scores;
  std::vector<double> depth(s.size(), 0.0);
  for (std::size_t g = 1; g + 1 < s.size(); ++g) {
    if (s[g - 1] < s[g] || s[g + 1] < s[g]) continue;
    std::size_t l = g;
    while (l > 0 && s[l - 1] >= s[l]) --l;
    std::size_t r = g;
    while (r + 1 < s.size() && s[r + 1] >= s[r]) ++r;
    depth[g] = (s[l] - s[g]) + (s[r] - s[g]);
  }
  return depth;
}

/// Boundaries at gaps whose depth is positive and at least
/// mean + cutoff * stddev (population) of all depths.
inline Segmentation boundaries_from_depths(const std::vector<double>& depth, std::size_t num_sentences,
                                           double cutoff) {
  std::vector<std::size_t> boundaries;
  if (!depth.empty()) {
    const double count = static_cast<double>(depth.size());
    const double mean = std::accumulate(depth.begin(), depth.end(), 0.0) / count;
    double var = 0.0;
    for (double d : depth) var += (d - mean) * (d - mean);
    const double threshold = mean + cutoff * std::sqrt(var / count);
    for (std::size_t g = 0; g < depth.size(); ++g)
      if (depth[g] > 0.0 && depth[g] >= threshold) boundaries.push_back(g);
  }
  boundaries.push_back(num_sentences - 1);
  return Segmentation(std::move(boundaries), num_sentences);
}

template <SentenceEmbedder Embedder = TermFrequencyEmbedder>
Segmentation texttile(const Document& doc, const TilingParams& params = {},
                      const Embedder& embed = {}) {
  const auto profile = coherence_profile(doc, params, embed);
  return boundaries_from_depths(depth_scores(profile), doc.size(), params.cutoff);
}

inline void check_probabilities(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("empty probability vector");
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("probabilities must lie in [0, 1]");
}

/// Sentence i closes a segment iff probs[i] >= threshold.
inline Segmentation threshold_segment(std::span<const double> probs, double threshold = 0.5) {
  check_probabilities(probs);
  std::vector<int> labels(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) labels[i] = probs[i] >= threshold ? 1 : 0;
  return segmentation_from_labels(labels);
}

struct BceLoss {
  double sum = 0.0;
  double mean = 0.0;
};

inline constexpr double kBceEpsilon = 1e-7;

inline BceLoss bce_loss(std::span<const double> probs, const Segmentation& ref) {
  if (probs.size() != ref.num_sentences())
    throw std::invalid_argument("bce_loss: " + std::to_string(probs.size()) + " probabilities for " +
                                std::to_string(ref.num_sentences()) + " sentences");
  const auto labels = boundary_labels(ref);
  BceLoss loss;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (std::isnan(probs[i])) throw std::invalid_argument("bce_loss: NaN probability");
    const double p = std::clamp(probs[i], kBceEpsilon, 1.0 - kBceEpsilon);
    loss.sum -= labels[i] ? std::log(p) : std::log1p(-p);
  }
  loss.mean = loss.sum / static_cast<double>(probs.size());
  return loss;
}

}  // namespace structseg
