// stats.hpp
#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wtk/annotation.hpp"
#include "wtk/error.hpp"
#include "wtk/segment.hpp"
#include "wtk/taxonomy.hpp"

namespace wtk {

struct SampleStats {
  std::string sample_id;
  std::size_t n_disc_edits = 0;
  std::size_t words_added = 0;
  std::size_t words_deleted = 0;
  std::size_t n_actions = 0;
  bool operator==(const SampleStats&) const = default;
};

inline SampleStats sample_stats(const ActionStream& stream) {
  return {stream.session_id, stream.totals.n_disc_edits, stream.totals.words_added, stream.totals.words_deleted,
          stream.totals.n_actions};
}

inline std::string render_stats_csv(const std::vector<SampleStats>& rows) {
  std::ostringstream os;
  os << "sample,n_disc_edits,words_added,words_deleted,n_actions\n";
  for (const auto& r : rows)
    os << r.sample_id << ',' << r.n_disc_edits << ',' << r.words_added << ',' << r.words_deleted << ','
       << r.n_actions << '\n';
  return os.str();
}

inline std::string render_stats_table(const std::vector<SampleStats>& rows) {
  std::size_t w = 6;
  for (const auto& r : rows) w = std::max(w, r.sample_id.size());
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %10s  %11s  %13s  %16s\n", static_cast<int>(w), "Sample", "Disc-edits",
                "Added words", "Deleted words", "Recorded actions");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %10zu  %11zu  %13zu  %16zu\n", static_cast<int>(w), r.sample_id.c_str(),
                  r.n_disc_edits, r.words_added, r.words_deleted, r.n_actions);
    os << buf;
  }
  return os.str();
}

enum class DistributionUnit { Spans, Slots };

constexpr std::string_view to_string(DistributionUnit u) { return u == DistributionUnit::Spans ? "spans" : "slots"; }

inline std::optional<DistributionUnit> parse_distribution_unit(std::string_view s) {
  if (s == "spans") return DistributionUnit::Spans;
  if (s == "slots") return DistributionUnit::Slots;
  return std::nullopt;
}

/// Per-label count, averaged over annotators, in schema bit order.
struct LabelDistribution {
  std::string sample_id;
  DistributionUnit unit = DistributionUnit::Spans;
  std::vector<std::string> labels;
  std::vector<double> mean_counts;

  double at(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return mean_counts[i];
    throw Error(ErrorCode::UnknownLabel, std::string(label));
  }
};

/// Spans: a span counts once for every label literally listed on it.
/// Slots: a slot counts once for every bit set after projection (needs n_slots).
inline LabelDistribution label_distribution(const std::vector<AnnotationDoc>& docs, const TaxonomySchema& schema,
                                            DistributionUnit unit = DistributionUnit::Spans,
                                            std::optional<std::size_t> n_slots = std::nullopt) {
  if (docs.empty()) throw Error(ErrorCode::EmptyInput, "no annotation documents");
  if (unit == DistributionUnit::Slots && !n_slots)
    throw Error(ErrorCode::EmptyInput, "slot counting needs the action stream");
  LabelDistribution d;
  d.sample_id = docs.front().session_id;
  d.unit = unit;
  d.labels = schema.bit_order();
  d.mean_counts.assign(schema.width(), 0.0);
  for (const auto& doc : docs) {
    check_schema(doc, schema);
    if (doc.session_id != d.sample_id)
      throw Error(ErrorCode::SessionMismatch, "documents cover '" + d.sample_id + "' and '" + doc.session_id + "'");
    if (unit == DistributionUnit::Spans) {
      for (const auto& span : doc.spans)
        for (const auto bit : encode(schema, span.labels).ones()) d.mean_counts[bit] += 1.0;
    } else {
      for (const auto& row : project(doc, *n_slots, schema).rows)
        for (const auto bit : row.ones()) d.mean_counts[bit] += 1.0;
    }
  }
  for (auto& c : d.mean_counts) c /= static_cast<double>(docs.size());
  return d;
}

inline std::string format_count(double v, const char* fmt = "%.1f") {
  char buf[32];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

/// Labels down, samples across. Actions and units are indented under intentions.
inline std::string render_distribution_table(const std::vector<LabelDistribution>& cols, const TaxonomySchema& schema) {
  std::ostringstream os;
  if (cols.empty()) return {};
  os << "# label counts per sample: unit=" << to_string(cols.front().unit) << ", averaged over annotators\n";
  std::size_t w = 5;
  for (const auto& l : schema.labels()) w = std::max(w, l.name.size() + 2);
  std::size_t cw = 6;
  for (const auto& c : cols) cw = std::max(cw, c.sample_id.size());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(w), "Label");
  os << buf;
  for (const auto& c : cols) {
    std::snprintf(buf, sizeof buf, "  %*s", static_cast<int>(cw), c.sample_id.c_str());
    os << buf;
  }
  os << '\n';
  for (std::size_t b = 0; b < schema.width(); ++b) {
    const auto& info = schema.label(b);
    const bool nested = info.level == LabelLevel::Action || info.level == LabelLevel::Unit;
    const std::string name = (nested ? "  " : "") + info.name;
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(w), name.c_str());
    os << buf;
    for (const auto& c : cols) {
      std::snprintf(buf, sizeof buf, "  %*s", static_cast<int>(cw), format_count(c.mean_counts[b]).c_str());
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

inline std::string render_distribution_csv(const std::vector<LabelDistribution>& cols, const TaxonomySchema& schema) {
  std::ostringstream os;
  os << "label";
  for (const auto& c : cols) os << ',' << c.sample_id;
  os << '\n';
  for (std::size_t b = 0; b < schema.width(); ++b) {
    os << schema.label(b).name;
    for (const auto& c : cols) os << ',' << format_count(c.mean_counts[b], "%.6g");
    os << '\n';
  }
  return os.str();
}

}  // namespace wtk
