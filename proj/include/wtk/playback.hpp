// playback.hpp
#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wtk/annotation.hpp"
#include "wtk/error.hpp"
#include "wtk/segment.hpp"
#include "wtk/session.hpp"
#include "wtk/taxonomy.hpp"

namespace wtk {

struct PlaybackFrame {
  std::size_t step = 0;
  std::uint64_t t_ms = 0;
  std::string file_id;
  Text text_after;
  std::size_t caret_hint = 0;

  bool operator==(const PlaybackFrame&) const = default;
};

/// Replays the stream over each file's first snapshot. Throws
/// ReplayDivergence when a file's replayed text differs from its last snapshot.
inline std::vector<PlaybackFrame> build_playback(const Session& s, const ActionStream& stream) {
  if (s.events.empty()) throw Error(ErrorCode::EmptyInput, "session has no events");
  if (stream.session_id != s.session_id)
    throw Error(ErrorCode::SessionMismatch, "stream '" + stream.session_id + "' vs session '" + s.session_id + "'");
  std::vector<PlaybackFrame> frames;
  if (stream.actions.empty()) {
    const auto& e = s.initial();
    frames.push_back({0, e.t_ms, e.file_id, e.text, 0});
  }
  std::map<std::string, Text> current;
  for (const auto& a : stream.actions) {
    auto it = current.find(a.file_id);
    if (it == current.end()) {
      const Text* first = s.first_text(a.file_id);
      if (!first) throw Error(ErrorCode::ReplayDivergence, "action on unknown file '" + a.file_id + "'");
      it = current.emplace(a.file_id, *first).first;
    }
    it->second = apply_action(it->second, a);
    frames.push_back({frames.size(), a.t_ms, a.file_id, it->second, a.start_offset});
  }
  for (const auto& [file, text] : current) {
    if (text != *s.last_text(file))
      throw Error(ErrorCode::ReplayDivergence, "replayed text of '" + file + "' differs from its last snapshot");
  }
  return frames;
}

struct TimelinePoint {
  std::size_t step = 0;
  std::vector<std::string> labels;
  std::string band;
  bool multi_intention = false;

  bool operator==(const TimelinePoint&) const = default;
};

/// One point per slot. The band is the lowest-ordered intention present, or
/// the None label when no intention bit is set.
inline std::vector<TimelinePoint> export_timeline(const SlotMatrix& m, const TaxonomySchema& schema) {
  const auto intentions = schema.intention_bits();
  std::vector<TimelinePoint> out;
  out.reserve(m.n_slots());
  for (std::size_t i = 0; i < m.n_slots(); ++i) {
    TimelinePoint p;
    p.step = i;
    p.labels = decode(schema, m.rows[i]);
    std::size_t n_int = 0;
    for (const auto bit : intentions) {
      if (!m.rows[i].test(bit)) continue;
      if (n_int++ == 0) p.band = schema.label(bit).name;
    }
    if (n_int == 0) p.band = schema.none_label();
    p.multi_intention = n_int > 1;
    out.push_back(std::move(p));
  }
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

/// `step,band,labels,multi_intention`; labels are ';'-joined in bit order.
inline std::string timeline_csv(const std::vector<TimelinePoint>& points) {
  std::ostringstream os;
  os << "step,band,labels,multi_intention\n";
  for (const auto& p : points) {
    std::string labels;
    for (const auto& l : p.labels) labels += (labels.empty() ? "" : ";") + l;
    os << p.step << ',' << csv_field(p.band) << ',' << csv_field(labels) << ','
       << (p.multi_intention ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace wtk
