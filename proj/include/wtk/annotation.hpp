// annotation.hpp
#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wtk/error.hpp"
#include "wtk/json_util.hpp"
#include "wtk/segment.hpp"
#include "wtk/taxonomy.hpp"

namespace wtk {

/// Inclusive range of action ids carrying a label set.
struct AnnotationSpan {
  std::size_t start_action = 0;
  std::size_t end_action = 0;
  std::vector<std::string> labels;
  std::optional<std::string> note;

  bool operator==(const AnnotationSpan&) const = default;
};

struct AnnotationDoc {
  std::string session_id;
  std::string annotator_id;
  std::string schema_id;
  std::vector<AnnotationSpan> spans;

  bool operator==(const AnnotationDoc&) const = default;
};

/// One LabelSet per action slot.
struct SlotMatrix {
  std::string schema_id;
  std::vector<LabelSet> rows;

  std::size_t n_slots() const noexcept { return rows.size(); }
  bool operator==(const SlotMatrix&) const = default;
};

struct SlotDisagreement {
  std::size_t slot = 0;
  std::vector<std::string> only_a;
  std::vector<std::string> only_b;

  bool operator==(const SlotDisagreement&) const = default;
};

inline void check_schema(const AnnotationDoc& doc, const TaxonomySchema& schema) {
  if (doc.schema_id != schema.schema_id())
    throw Error(ErrorCode::SchemaMismatch, "annotation '" + doc.annotator_id + "' uses schema '" + doc.schema_id +
                                               "', expected '" + schema.schema_id() + "'");
}

/// Union of all spans covering each slot, parent-closed. Uncovered slots stay empty.
inline SlotMatrix project(const AnnotationDoc& doc, std::size_t n_slots, const TaxonomySchema& schema) {
  check_schema(doc, schema);
  SlotMatrix m{schema.schema_id(), std::vector<LabelSet>(n_slots, LabelSet(schema.width()))};
  for (const auto& span : doc.spans) {
    if (span.start_action > span.end_action || span.end_action >= n_slots)
      throw Error(ErrorCode::SpanOutOfRange, "span [" + std::to_string(span.start_action) + "," +
                                                 std::to_string(span.end_action) + "] outside 0.." +
                                                 std::to_string(n_slots == 0 ? 0 : n_slots - 1));
    const auto bits = close_labels(schema, encode(schema, span.labels));
    for (std::size_t i = span.start_action; i <= span.end_action; ++i) m.rows[i] |= bits;
  }
  for (std::size_t i = 0; i < n_slots; ++i) {
    const auto v = validate_labels(schema, m.rows[i]);
    if (!v.empty())
      throw Error(ErrorCode::InvalidLabelCombination,
                  "slot " + std::to_string(i) + ": " + v.front().rule + " (" + v.front().label + ")");
  }
  return m;
}

inline SlotMatrix project(const AnnotationDoc& doc, const ActionStream& stream, const TaxonomySchema& schema) {
  if (doc.session_id != stream.session_id)
    throw Error(ErrorCode::SessionMismatch,
                "annotation is for '" + doc.session_id + "', stream is '" + stream.session_id + "'");
  return project(doc, stream.actions.size(), schema);
}

inline void check_same_shape(const SlotMatrix& a, const SlotMatrix& b) {
  if (a.schema_id != b.schema_id) throw Error(ErrorCode::SchemaMismatch, a.schema_id + " vs " + b.schema_id);
  if (a.n_slots() != b.n_slots())
    throw Error(ErrorCode::SizeMismatch,
                std::to_string(a.n_slots()) + " slots vs " + std::to_string(b.n_slots()));
}

/// One entry per slot whose label sets differ.
inline std::vector<SlotDisagreement> diff_annotations(const SlotMatrix& a, const SlotMatrix& b,
                                                      const TaxonomySchema& schema) {
  check_same_shape(a, b);
  std::vector<SlotDisagreement> out;
  for (std::size_t i = 0; i < a.n_slots(); ++i) {
    if (a.rows[i] == b.rows[i]) continue;
    out.push_back({i, decode(schema, a.rows[i] - b.rows[i]), decode(schema, b.rows[i] - a.rows[i])});
  }
  return out;
}

// {"session_id":str,"annotator_id":str,"schema_id":str,
//  "spans":[{"start":int,"end":int,"labels":[str,...],"note":str?}]}

template <typename Json>
AnnotationDoc annotation_from_json(const Json& j) {
  try {
    AnnotationDoc doc;
    doc.session_id = j.at("session_id").template get<std::string>();
    doc.annotator_id = j.at("annotator_id").template get<std::string>();
    doc.schema_id = j.at("schema_id").template get<std::string>();
    for (const auto& s : j.at("spans")) {
      AnnotationSpan span;
      span.start_action = detail::get_uint(s, "start");
      span.end_action = detail::get_uint(s, "end");
      span.labels = s.at("labels").template get<std::vector<std::string>>();
      if (s.contains("note") && !s.at("note").is_null()) span.note = s.at("note").template get<std::string>();
      doc.spans.push_back(std::move(span));
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("annotation: ") + e.what());
  }
}

inline nlohmann::ordered_json annotation_to_json(const AnnotationDoc& doc) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["session_id"] = doc.session_id;
  j["annotator_id"] = doc.annotator_id;
  j["schema_id"] = doc.schema_id;
  auto spans = oj::array();
  for (const auto& s : doc.spans) {
    oj js{{"start", s.start_action}, {"end", s.end_action}, {"labels", s.labels}};
    if (s.note) js["note"] = *s.note;
    spans.push_back(std::move(js));
  }
  j["spans"] = std::move(spans);
  return j;
}

inline AnnotationDoc load_annotation(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, e.what());
  }
  return annotation_from_json(j);
}

/// Span-level checks usable without a stream; pass n_slots to check ranges too.
inline std::vector<LabelViolation> validate_annotation(const AnnotationDoc& doc, const TaxonomySchema& schema,
                                                       std::optional<std::size_t> n_slots = std::nullopt) {
  check_schema(doc, schema);
  std::vector<LabelViolation> out;
  for (std::size_t k = 0; k < doc.spans.size(); ++k) {
    const auto& span = doc.spans[k];
    const std::string where = "span " + std::to_string(k);
    if (span.start_action > span.end_action) out.push_back({"SpanReversed", where});
    if (n_slots && span.end_action >= *n_slots) out.push_back({"SpanOutOfRange", where});
    bool known = true;
    for (const auto& l : span.labels) {
      if (!schema.index_of(l)) {
        out.push_back({"UnknownLabel", where + ": " + l});
        known = false;
      }
    }
    if (!known) continue;
    for (auto v : validate_labels(schema, close_labels(schema, encode(schema, span.labels)))) {
      v.label = where + ": " + v.label;
      out.push_back(std::move(v));
    }
  }
  if (n_slots && out.empty()) {
    try {
      project(doc, *n_slots, schema);
    } catch (const Error& e) {
      out.push_back({std::string(to_string(e.code())), e.what()});
    }
  }
  return out;
}

}  // namespace wtk
