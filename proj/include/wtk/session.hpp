// session.hpp
//
// Session logs: one JSON object per line. A record is either a full snapshot
//   {"seq":0,"t_ms":0,"trigger":"space","file":"main.tex","text":"..."}
// or a delta against an earlier snapshot
//   {"seq":1,"t_ms":9,"trigger":"space","file":"main.tex","base_seq":0,"ops":[["eq",4],["ins"," x"]]}
// An optional first line {"session_id":...,"participant_id":...,"keyframe_interval":...}
// carries session metadata; without it the session id is the file stem.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "wtk/diff.hpp"
#include "wtk/error.hpp"
#include "wtk/unicode.hpp"

namespace wtk {

enum class EventTrigger { Space, Newline, FocusLoss, Copy, Paste, Cut, FileSwitch, SessionEnd };

inline constexpr std::array<std::pair<EventTrigger, std::string_view>, 8> kTriggerNames{{
    {EventTrigger::Space, "space"},
    {EventTrigger::Newline, "newline"},
    {EventTrigger::FocusLoss, "focus_loss"},
    {EventTrigger::Copy, "copy"},
    {EventTrigger::Paste, "paste"},
    {EventTrigger::Cut, "cut"},
    {EventTrigger::FileSwitch, "file_switch"},
    {EventTrigger::SessionEnd, "session_end"},
}};

constexpr std::string_view to_string(EventTrigger t) {
  for (const auto& [k, name] : kTriggerNames)
    if (k == t) return name;
  return "?";
}

inline std::optional<EventTrigger> parse_trigger(std::string_view s) {
  for (const auto& [k, name] : kTriggerNames)
    if (name == s) return k;
  return std::nullopt;
}

struct SnapshotEvent {
  std::uint64_t seq = 0;
  std::uint64_t t_ms = 0;
  EventTrigger trigger = EventTrigger::Space;
  std::string file_id;
  Text text;

  bool operator==(const SnapshotEvent&) const = default;
};

struct Session {
  std::string session_id;
  std::string participant_id;
  std::vector<SnapshotEvent> events;
  std::size_t keyframe_interval = 100;

  bool operator==(const Session&) const = default;

  const SnapshotEvent& initial() const { return events.front(); }
  const SnapshotEvent& final() const { return events.back(); }

  /// Distinct file ids in order of first appearance.
  std::vector<std::string> files() const {
    std::vector<std::string> out;
    for (const auto& e : events)
      if (std::find(out.begin(), out.end(), e.file_id) == out.end()) out.push_back(e.file_id);
    return out;
  }

  /// Last snapshot text of `file_id`, or nullptr when the file never appears.
  const Text* last_text(std::string_view file_id) const {
    for (auto it = events.rbegin(); it != events.rend(); ++it)
      if (it->file_id == file_id) return &it->text;
    return nullptr;
  }

  const Text* first_text(std::string_view file_id) const {
    for (const auto& e : events)
      if (e.file_id == file_id) return &e.text;
    return nullptr;
  }
};

struct Violation {
  std::optional<std::uint64_t> seq;
  std::string rule;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

namespace detail {

using json = nlohmann::json;

inline std::uint64_t require_uint(const json& rec, const char* key, std::size_t line) {
  const auto it = rec.find(key);
  if (it == rec.end()) throw Error(ErrorCode::MalformedRecord, std::string("missing '") + key + "'", line);
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0))
    throw Error(ErrorCode::MalformedRecord, std::string("'") + key + "' must be a non-negative integer", line);
  return it->get<std::uint64_t>();
}

inline std::string require_string(const json& rec, const char* key, std::size_t line) {
  const auto it = rec.find(key);
  if (it == rec.end()) throw Error(ErrorCode::MalformedRecord, std::string("missing '") + key + "'", line);
  if (!it->is_string()) throw Error(ErrorCode::MalformedRecord, std::string("'") + key + "' must be a string", line);
  return it->get<std::string>();
}

inline Text decode_text(const std::string& s, std::size_t line) {
  try {
    return from_utf8(s);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedRecord, e.what(), line);
  }
}

}  // namespace detail

/// Parses and materializes a session log. Delta records resolve against the
/// already-materialized snapshot named by `base_seq`.
inline Session parse_session(std::istream& in, std::string default_session_id) {
  using detail::json;
  Session s;
  s.session_id = std::move(default_session_id);
  std::unordered_map<std::uint64_t, std::size_t> by_seq;
  std::string raw;
  std::size_t line_no = 0;
  bool seen_record = false;

  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(raw);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedRecord, e.what(), line_no);
    }
    if (!rec.is_object()) throw Error(ErrorCode::MalformedRecord, "record must be an object", line_no);

    if (!rec.contains("seq") && rec.contains("session_id")) {
      if (seen_record) throw Error(ErrorCode::MalformedRecord, "header must be the first record", line_no);
      seen_record = true;
      s.session_id = detail::require_string(rec, "session_id", line_no);
      if (rec.contains("participant_id")) s.participant_id = detail::require_string(rec, "participant_id", line_no);
      if (rec.contains("keyframe_interval")) {
        s.keyframe_interval = detail::require_uint(rec, "keyframe_interval", line_no);
        if (s.keyframe_interval == 0)
          throw Error(ErrorCode::MalformedRecord, "keyframe_interval must be positive", line_no);
      }
      continue;
    }
    seen_record = true;

    SnapshotEvent ev;
    ev.seq = detail::require_uint(rec, "seq", line_no);
    const std::uint64_t expected = s.events.empty() ? 0 : s.events.back().seq + 1;
    if (ev.seq != expected)
      throw Error(ErrorCode::NonMonotonicSeq,
                  "expected seq " + std::to_string(expected) + ", got " + std::to_string(ev.seq), line_no);
    ev.t_ms = detail::require_uint(rec, "t_ms", line_no);
    const auto trig = detail::require_string(rec, "trigger", line_no);
    const auto parsed = parse_trigger(trig);
    if (!parsed) throw Error(ErrorCode::UnknownTrigger, "'" + trig + "'", line_no);
    ev.trigger = *parsed;
    ev.file_id = detail::require_string(rec, "file", line_no);

    const bool has_text = rec.contains("text");
    const bool has_delta = rec.contains("base_seq") || rec.contains("ops");
    if (has_text == has_delta)
      throw Error(ErrorCode::MalformedRecord, "record needs exactly one of 'text' or 'base_seq'+'ops'", line_no);
    if (has_text) {
      ev.text = detail::decode_text(detail::require_string(rec, "text", line_no), line_no);
    } else {
      const auto base = detail::require_uint(rec, "base_seq", line_no);
      if (!rec.contains("ops")) throw Error(ErrorCode::MalformedRecord, "missing 'ops'", line_no);
      EditScript script;
      try {
        script = script_from_json(rec["ops"]);
      } catch (const Error& e) {
        throw Error(ErrorCode::MalformedRecord, e.what(), line_no);
      }
      const auto hit = by_seq.find(base);
      if (hit == by_seq.end())
        throw Error(ErrorCode::DanglingDelta, "base_seq " + std::to_string(base) + " not found earlier", line_no);
      const Text& base_text = s.events[hit->second].text;
      if (script.old_len != base_text.size())
        throw Error(ErrorCode::DanglingDelta,
                    "ops span " + std::to_string(script.old_len) + " scalars but base has " +
                        std::to_string(base_text.size()),
                    line_no);
      ev.text = wtk::apply(base_text, script);
    }
    by_seq.emplace(ev.seq, s.events.size());
    s.events.push_back(std::move(ev));
  }
  if (s.events.empty()) throw Error(ErrorCode::MalformedRecord, "session has no events", line_no);
  return s;
}

inline Session load_session(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_session(in, path.stem().string());
}

enum class SessionForm { Full, Delta };

/// Writes a session log. In Delta form every `keyframe_interval`-th event and
/// each file's first snapshot are stored in full; the rest are deltas against
/// the previous snapshot of the same file.
inline void write_session(std::ostream& out, const Session& s, SessionForm form = SessionForm::Full) {
  using oj = nlohmann::ordered_json;
  oj header;
  header["session_id"] = s.session_id;
  header["participant_id"] = s.participant_id;
  header["keyframe_interval"] = s.keyframe_interval;
  out << header.dump() << '\n';

  std::unordered_map<std::string, std::size_t> last_of_file;
  const std::size_t interval = s.keyframe_interval == 0 ? 1 : s.keyframe_interval;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& ev = s.events[i];
    oj rec;
    rec["seq"] = ev.seq;
    rec["t_ms"] = ev.t_ms;
    rec["trigger"] = std::string(to_string(ev.trigger));
    rec["file"] = ev.file_id;
    const auto prev = last_of_file.find(ev.file_id);
    if (form == SessionForm::Full || i % interval == 0 || prev == last_of_file.end()) {
      rec["text"] = to_utf8(ev.text);
    } else {
      const auto& base = s.events[prev->second];
      rec["base_seq"] = base.seq;
      rec["ops"] = script_to_json(diff(base.text, ev.text));
    }
    out << rec.dump() << '\n';
    last_of_file[ev.file_id] = i;
  }
}

inline void save_session(const std::filesystem::path& path, const Session& s, SessionForm form = SessionForm::Full) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_session(out, s, form);
}

/// Checks the session invariants. Violations are data, never thrown.
inline std::vector<Violation> validate_session(const Session& s) {
  std::vector<Violation> out;
  if (s.events.empty()) {
    out.push_back({std::nullopt, "non_empty", "session has no events"});
    return out;
  }
  if (s.keyframe_interval == 0) out.push_back({std::nullopt, "keyframe_interval_positive", ""});
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& ev = s.events[i];
    if (ev.seq != i)
      out.push_back({ev.seq, "seq_dense", "expected seq " + std::to_string(i)});
    if (i > 0 && ev.t_ms < s.events[i - 1].t_ms)
      out.push_back({ev.seq, "time_monotonic",
                     std::to_string(ev.t_ms) + " < " + std::to_string(s.events[i - 1].t_ms)});
    if (std::any_of(ev.text.begin(), ev.text.end(), [](char32_t c) { return !is_scalar_value(c); }))
      out.push_back({ev.seq, "well_formed_text", "text holds a non-scalar code point"});
  }
  return out;
}

}  // namespace wtk
