// segment.hpp
//
// Groups the character diff of each consecutive same-file snapshot pair into
// recorded actions, and assigns actions to discontinuous edits.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "wtk/diff.hpp"
#include "wtk/error.hpp"
#include "wtk/json_util.hpp"
#include "wtk/session.hpp"
#include "wtk/unicode.hpp"

namespace wtk {

/// Whitespace-separated tokens. A LaTeX control sequence (backslash, letters,
/// optional braced argument) is a single token; tokens without any letter or
/// digit are dropped.
inline std::vector<Text> tokenize_words(TextView t) {
  std::vector<Text> out;
  const std::size_t n = t.size();
  auto control_at = [&](std::size_t i) { return t[i] == U'\\' && i + 1 < n && is_ascii_letter(t[i + 1]); };
  auto keep = [&](TextView tok) {
    if (std::any_of(tok.begin(), tok.end(), is_word_char)) out.emplace_back(tok);
  };

  std::size_t i = 0;
  while (i < n) {
    if (is_space(t[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (control_at(i)) {
      j = i + 1;
      while (j < n && is_ascii_letter(t[j])) ++j;
      if (j < n && t[j] == U'{') {
        std::size_t depth = 0, k = j;
        for (; k < n; ++k) {
          if (t[k] == U'{') ++depth;
          if (t[k] == U'}' && --depth == 0) break;
        }
        if (k < n) {
          j = k + 1;
        } else {
          // Unclosed argument: stop at the next whitespace.
          while (j < n && !is_space(t[j])) ++j;
        }
      }
    } else {
      while (j < n && !is_space(t[j]) && !(j > i && control_at(j))) ++j;
    }
    keep(t.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::size_t count_words(TextView t) { return tokenize_words(t).size(); }

/// `.`, `!` or `?` followed by whitespace or the end of the text.
inline bool has_sentence_terminator(TextView t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char32_t c = t[i];
    if ((c == U'.' || c == U'!' || c == U'?') && (i + 1 == t.size() || is_space(t[i + 1]))) return true;
  }
  return false;
}

enum class Granularity { Word, Sentence };

constexpr std::string_view to_string(Granularity g) { return g == Granularity::Word ? "word" : "sentence"; }

struct EditAction {
  std::uint64_t action_id = 0;
  std::uint64_t seq_from = 0;
  std::uint64_t seq_to = 0;
  std::string file_id;
  /// Offset in the file's text as it stands immediately before this action.
  std::size_t start_offset = 0;
  Text deleted_text;
  Text inserted_text;
  Granularity granularity = Granularity::Word;
  std::size_t words_added = 0;
  std::size_t words_deleted = 0;
  std::uint64_t t_ms = 0;
  std::uint64_t cont_group = 0;

  bool operator==(const EditAction&) const = default;
};

struct StreamTotals {
  std::size_t n_actions = 0;
  std::size_t n_disc_edits = 0;
  std::size_t words_added = 0;
  std::size_t words_deleted = 0;

  bool operator==(const StreamTotals&) const = default;
};

struct ActionStream {
  std::string session_id;
  std::vector<EditAction> actions;
  StreamTotals totals;

  bool operator==(const ActionStream&) const = default;
};

struct SegmentConfig {
  /// Locality threshold, in scalars, around the previous action's modified range.
  std::size_t disc_gap = 20;
  /// Change regions separated by an Equal run with fewer words than this are one action.
  std::size_t merge_gap_words = 2;
  DiffOptions diff;
};

inline StreamTotals recompute_totals(const std::vector<EditAction>& actions) {
  StreamTotals t;
  t.n_actions = actions.size();
  for (const auto& a : actions) {
    t.words_added += a.words_added;
    t.words_deleted += a.words_deleted;
  }
  t.n_disc_edits = actions.empty() ? 0 : 1;
  for (std::size_t i = 1; i < actions.size(); ++i)
    if (actions[i].cont_group != actions[i - 1].cont_group) ++t.n_disc_edits;
  return t;
}

namespace detail {

struct Region {
  std::size_t old_begin, old_end, new_begin, new_end;
};

// Maximal change regions of a script, merging across short Equal runs.
inline std::vector<Region> change_regions(const EditScript& script, TextView old_text, std::size_t merge_gap_words) {
  std::vector<Region> out;
  std::size_t oa = 0, ob = 0;
  bool gap_seen = false;  // an Equal run followed the last region
  std::size_t gap_words = 0;
  for (const auto& op : script.ops) {
    if (op.kind == OpKind::Equal) {
      if (!out.empty()) {
        gap_seen = true;
        gap_words = count_words(old_text.substr(oa, op.length));
      }
      oa += op.length;
      ob += op.length;
      continue;
    }
    const std::size_t da = op.kind == OpKind::Delete ? op.length : 0;
    const std::size_t db = op.kind == OpKind::Insert ? op.length : 0;
    const bool extend = !out.empty() && (!gap_seen || gap_words < merge_gap_words);
    if (extend) {
      out.back().old_end = oa + da;
      out.back().new_end = ob + db;
    } else {
      out.push_back({oa, oa + da, ob, ob + db});
    }
    gap_seen = false;
    oa += da;
    ob += db;
  }
  return out;
}

}  // namespace detail

/// Turns a session into its recorded-action stream.
inline ActionStream segment(const Session& s, const SegmentConfig& cfg = {}) {
  ActionStream stream;
  stream.session_id = s.session_id;
  std::unordered_map<std::string, std::size_t> last_of_file;

  struct Last {
    std::string file_id;
    std::size_t start;
    std::size_t inserted;
  };
  std::optional<Last> prev;
  std::uint64_t group = 0;

  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& ev = s.events[i];
    std::optional<std::size_t> before_idx;
    if (const auto hit = last_of_file.find(ev.file_id); hit != last_of_file.end()) before_idx = hit->second;
    last_of_file[ev.file_id] = i;
    if (!before_idx) continue;
    const auto& before = s.events[*before_idx];
    if (before.text == ev.text) continue;

    const auto script = diff(before.text, ev.text, cfg.diff);
    for (const auto& r : detail::change_regions(script, before.text, cfg.merge_gap_words)) {
      EditAction a;
      a.action_id = stream.actions.size();
      a.seq_from = before.seq;
      a.seq_to = ev.seq;
      a.file_id = ev.file_id;
      // Everything before new_begin already matches the new text.
      a.start_offset = r.new_begin;
      a.deleted_text = before.text.substr(r.old_begin, r.old_end - r.old_begin);
      a.inserted_text = ev.text.substr(r.new_begin, r.new_end - r.new_begin);
      a.granularity = has_sentence_terminator(a.inserted_text) || has_sentence_terminator(a.deleted_text)
                          ? Granularity::Sentence
                          : Granularity::Word;
      a.words_added = count_words(a.inserted_text);
      a.words_deleted = count_words(a.deleted_text);
      a.t_ms = ev.t_ms;

      if (prev) {
        const bool same_file = prev->file_id == a.file_id;
        const bool near = a.start_offset + cfg.disc_gap >= prev->start &&
                          a.start_offset <= prev->start + prev->inserted + cfg.disc_gap;
        if (!same_file || !near) ++group;
      }
      a.cont_group = group;
      prev = Last{a.file_id, a.start_offset, a.inserted_text.size()};
      stream.actions.push_back(std::move(a));
    }
  }
  stream.totals = recompute_totals(stream.actions);
  return stream;
}

/// Applies one action to the text of its file.
inline Text apply_action(TextView text, const EditAction& a) {
  const auto del = a.deleted_text.size();
  if (a.start_offset + del > text.size() || text.substr(a.start_offset, del) != a.deleted_text)
    throw Error(ErrorCode::ReplayDivergence,
                "action " + std::to_string(a.action_id) + " does not match its pre-state text");
  Text out;
  out.reserve(text.size() - del + a.inserted_text.size());
  out.append(text.substr(0, a.start_offset));
  out.append(a.inserted_text);
  out.append(text.substr(a.start_offset + del));
  return out;
}

/// Checks the stream invariants that can be verified without the session.
inline std::vector<Violation> validate_stream(const ActionStream& st) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < st.actions.size(); ++i) {
    const auto& a = st.actions[i];
    auto flag = [&](const char* rule, std::string detail = {}) {
      out.push_back({a.seq_to, rule, "action " + std::to_string(i) + (detail.empty() ? "" : ": " + detail)});
    };
    if (a.action_id != i) flag("action_id_dense");
    if (a.deleted_text.empty() && a.inserted_text.empty()) flag("non_empty_action");
    if (a.words_added != count_words(a.inserted_text)) flag("words_added");
    if (a.words_deleted != count_words(a.deleted_text)) flag("words_deleted");
    if (i > 0) {
      const auto& p = st.actions[i - 1];
      if (a.cont_group < p.cont_group) flag("cont_group_monotonic");
      if (a.seq_to < p.seq_to || (a.seq_to == p.seq_to && a.start_offset <= p.start_offset)) flag("action_order");
    }
  }
  if (recompute_totals(st.actions) != st.totals) out.push_back({std::nullopt, "totals", "totals do not match actions"});
  return out;
}

// Action stream file: {"session_id":...,"totals":{...},"actions":[...]}

inline nlohmann::ordered_json stream_to_json(const ActionStream& st) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["session_id"] = st.session_id;
  j["totals"] = oj{{"n_actions", st.totals.n_actions},
                   {"n_disc_edits", st.totals.n_disc_edits},
                   {"words_added", st.totals.words_added},
                   {"words_deleted", st.totals.words_deleted}};
  auto arr = oj::array();
  for (const auto& a : st.actions) {
    oj r;
    r["action_id"] = a.action_id;
    r["seq_from"] = a.seq_from;
    r["seq_to"] = a.seq_to;
    r["file_id"] = a.file_id;
    r["start_offset"] = a.start_offset;
    r["deleted_text"] = to_utf8(a.deleted_text);
    r["inserted_text"] = to_utf8(a.inserted_text);
    r["granularity"] = std::string(to_string(a.granularity));
    r["words_added"] = a.words_added;
    r["words_deleted"] = a.words_deleted;
    r["t_ms"] = a.t_ms;
    r["cont_group"] = a.cont_group;
    arr.push_back(std::move(r));
  }
  j["actions"] = std::move(arr);
  return j;
}

template <typename Json>
ActionStream stream_from_json(const Json& j) {
  auto bad = [](const std::string& why) { return Error(ErrorCode::MalformedRecord, "action stream: " + why); };
  try {
    ActionStream st;
    st.session_id = j.at("session_id").template get<std::string>();
    const auto& t = j.at("totals");
    st.totals.n_actions = detail::get_uint(t, "n_actions");
    st.totals.n_disc_edits = detail::get_uint(t, "n_disc_edits");
    st.totals.words_added = detail::get_uint(t, "words_added");
    st.totals.words_deleted = detail::get_uint(t, "words_deleted");
    for (const auto& r : j.at("actions")) {
      EditAction a;
      a.action_id = detail::get_uint(r, "action_id");
      a.seq_from = detail::get_uint(r, "seq_from");
      a.seq_to = detail::get_uint(r, "seq_to");
      a.file_id = r.at("file_id").template get<std::string>();
      a.start_offset = detail::get_uint(r, "start_offset");
      a.deleted_text = from_utf8(r.at("deleted_text").template get<std::string>());
      a.inserted_text = from_utf8(r.at("inserted_text").template get<std::string>());
      const auto g = r.at("granularity").template get<std::string>();
      if (g != "word" && g != "sentence") throw bad("unknown granularity '" + g + "'");
      a.granularity = g == "word" ? Granularity::Word : Granularity::Sentence;
      a.words_added = detail::get_uint(r, "words_added");
      a.words_deleted = detail::get_uint(r, "words_deleted");
      a.t_ms = detail::get_uint(r, "t_ms");
      a.cont_group = detail::get_uint(r, "cont_group");
      st.actions.push_back(std::move(a));
    }
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw bad(e.what());
  }
}

inline ActionStream load_action_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, e.what());
  }
  return stream_from_json(j);
}

}  // namespace wtk
