#pragma once

// Canonical JSONL corpus records:
//   {"id": str, "modality": "document"|"conversation", "sentences": [str],
//    "boundaries": [int], "labels": [str]}
// boundaries and labels are optional. Keys are written in exactly that order.

#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "structseg/types.hpp"

namespace structseg {

using ordered_json = nlohmann::ordered_json;

/// A document with its (optional) reference segmentation and labels.
struct Example {
  Document document;
  std::optional<Segmentation> segmentation;
  std::vector<std::string> labels;  // empty, or one per segment

  bool labeled() const { return segmentation && !labels.empty(); }

  LabeledSegmentation labeled_segmentation() const {
    if (!labeled()) throw std::logic_error("example '" + document.id() + "' has no labels");
    return LabeledSegmentation(*segmentation, labels);
  }

  static Example from(Document doc, const LabeledSegmentation& ls) {
    return {std::move(doc), ls.segmentation(), ls.labels()};
  }

  friend bool operator==(const Example&, const Example&) = default;
};

/// Dumps without throwing on invalid UTF-8 (bad bytes become U+FFFD).
inline std::string dump_line(const ordered_json& j) {
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

inline ordered_json to_json(const Example& ex) {
  ordered_json j;
  j["id"] = ex.document.id();
  j["modality"] = std::string(to_string(ex.document.modality()));
  j["sentences"] = ex.document.sentences();
  if (ex.segmentation) j["boundaries"] = ex.segmentation->boundaries();
  if (!ex.labels.empty()) j["labels"] = ex.labels;
  return j;
}

namespace detail {

inline std::vector<std::size_t> read_indices(const ordered_json& j, const char* key) {
  if (!j.is_array()) throw std::invalid_argument(std::string("'") + key + "' must be an array");
  std::vector<std::size_t> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw std::invalid_argument(std::string("'") + key + "' must hold non-negative integers");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

inline std::vector<std::string> read_strings(const ordered_json& j, const char* key) {
  if (!j.is_array()) throw std::invalid_argument(std::string("'") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw std::invalid_argument(std::string("'") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace detail

/// Throws std::invalid_argument with a readable message on any schema violation.
inline Example example_from_json(const ordered_json& j) {
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  if (!j.contains("id") || !j["id"].is_string()) throw std::invalid_argument("missing string 'id'");
  const auto id = j["id"].get<std::string>();
  Modality modality = Modality::document;
  if (j.contains("modality")) {
    if (!j["modality"].is_string()) throw std::invalid_argument("'modality' must be a string");
    auto m = parse_modality(j["modality"].get<std::string>());
    if (!m) throw std::invalid_argument("unknown modality '" + j["modality"].get<std::string>() + "'");
    modality = *m;
  }
  if (!j.contains("sentences")) throw std::invalid_argument("missing 'sentences'");
  Document doc(id, detail::read_strings(j["sentences"], "sentences"), modality);

  Example ex{std::move(doc), std::nullopt, {}};
  if (j.contains("boundaries"))
    ex.segmentation = Segmentation(detail::read_indices(j["boundaries"], "boundaries"), ex.document.size());
  if (j.contains("labels")) {
    if (!ex.segmentation) throw std::invalid_argument("'labels' given without 'boundaries'");
    // Construct through LabeledSegmentation so labels are count-checked and normalized.
    LabeledSegmentation ls(*ex.segmentation, detail::read_strings(j["labels"], "labels"));
    ex.labels = ls.labels();
  }
  return ex;
}

inline Example parse_example(const std::string& line) {
  return example_from_json(ordered_json::parse(line));
}

inline void write_example(std::ostream& os, const Example& ex) { os << dump_line(to_json(ex)) << '\n'; }

/// A problem with one input line. line is 1-based.
struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct ReadResult {
  std::vector<Example> examples;
  std::vector<LineError> errors;
};

/// Reads canonical JSONL. Blank lines are skipped; malformed lines are
/// collected in `errors` and do not stop the read.
inline ReadResult read_corpus(std::istream& is) {
  ReadResult out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    try {
      out.examples.push_back(parse_example(line));
    } catch (const std::exception& e) {
      out.errors.push_back({lineno, e.what()});
    }
  }
  return out;
}

}  // namespace structseg
