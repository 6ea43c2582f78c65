// agreement.hpp
//
// Micro-averaged multi-label agreement over slot bitmaps. Annotator a is the
// prediction, annotator b the reference; all scores are percentages.
#pragma once

#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wtk/annotation.hpp"
#include "wtk/error.hpp"

namespace wtk {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  bool operator==(const Confusion&) const = default;
};

struct Scores {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool operator==(const Scores&) const = default;
};

inline constexpr const char* kZeroDivisionConvention =
    "micro-averaged over (slot, label-bit) pairs; a=prediction, b=reference; 0/0 scores 100.0 when both "
    "matrices are all-zero, otherwise an undefined component scores 0.0";

inline Confusion confusion(const SlotMatrix& a, const SlotMatrix& b) {
  check_same_shape(a, b);
  Confusion c;
  for (std::size_t i = 0; i < a.n_slots(); ++i) {
    c.tp += (a.rows[i] & b.rows[i]).count();
    c.fp += (a.rows[i] - b.rows[i]).count();
    c.fn += (b.rows[i] - a.rows[i]).count();
  }
  return c;
}

inline Scores scores_from_confusion(const Confusion& c) {
  if (c.tp + c.fp + c.fn == 0) return {100.0, 100.0, 100.0};
  Scores s;
  const double tp = static_cast<double>(c.tp);
  s.precision = (c.tp + c.fp) == 0 ? 0.0 : 100.0 * tp / static_cast<double>(c.tp + c.fp);
  s.recall = (c.tp + c.fn) == 0 ? 0.0 : 100.0 * tp / static_cast<double>(c.tp + c.fn);
  s.f1 = (s.precision + s.recall) == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

inline Scores score_pair(const SlotMatrix& a, const SlotMatrix& b) { return scores_from_confusion(confusion(a, b)); }

struct SampleScore {
  std::string sample_id;
  std::string prediction;  // annotator id of a
  std::string reference;   // annotator id of b
  Scores scores;
};

struct AgreementReport {
  std::vector<SampleScore> per_sample;
  Scores mean;
  std::string prediction;
  std::string reference;
};

/// Unweighted means over samples; nothing is rounded here.
inline AgreementReport mean_report(std::vector<SampleScore> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples to average");
  AgreementReport r;
  double f = 0, p = 0, rc = 0;
  for (const auto& s : samples) {
    f += s.scores.f1;
    p += s.scores.precision;
    rc += s.scores.recall;
  }
  const double n = static_cast<double>(samples.size());
  r.mean = {f / n, p / n, rc / n};

  auto join_distinct = [&](auto member) {
    std::vector<std::string> ids;
    for (const auto& s : samples)
      if (std::find(ids.begin(), ids.end(), s.*member) == ids.end()) ids.push_back(s.*member);
    std::string out;
    for (const auto& id : ids) out += (out.empty() ? "" : ",") + id;
    return out;
  };
  r.prediction = join_distinct(&SampleScore::prediction);
  r.reference = join_distinct(&SampleScore::reference);
  r.per_sample = std::move(samples);
  return r;
}

inline std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// Plain-text table: Sample | F | P | R, then a Mean row.
inline std::string render_agreement_table(const AgreementReport& r) {
  std::size_t w = 6;
  for (const auto& s : r.per_sample) w = std::max(w, s.sample_id.size());
  std::ostringstream os;
  auto row = [&](const std::string& name, const Scores& s) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-*s  %7s  %7s  %7s\n", static_cast<int>(w), name.c_str(),
                  format_percent(s.f1).c_str(), format_percent(s.precision).c_str(),
                  format_percent(s.recall).c_str());
    os << buf;
  };
  char head[160];
  std::snprintf(head, sizeof head, "%-*s  %7s  %7s  %7s\n", static_cast<int>(w), "Sample", "F", "P", "R");
  os << head << std::string(w + 27, '-') << '\n';
  for (const auto& s : r.per_sample) row(s.sample_id, s.scores);
  os << std::string(w + 27, '-') << '\n';
  row("Mean", r.mean);
  return os.str();
}

inline nlohmann::ordered_json report_to_json(const AgreementReport& r) {
  using oj = nlohmann::ordered_json;
  auto scores = [](const Scores& s) { return oj{{"f1", s.f1}, {"precision", s.precision}, {"recall", s.recall}}; };
  oj j;
  j["conventions"] = kZeroDivisionConvention;
  auto arr = oj::array();
  for (const auto& s : r.per_sample) {
    oj e{{"sample_id", s.sample_id}, {"prediction", s.prediction}, {"reference", s.reference}};
    e.update(scores(s.scores));
    arr.push_back(std::move(e));
  }
  j["per_sample"] = std::move(arr);
  j["mean"] = scores(r.mean);
  j["direction"] = oj{{"prediction", r.prediction}, {"reference", r.reference}};
  return j;
}

}  // namespace wtk
