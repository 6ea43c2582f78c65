// diff.hpp
//
// Character-level diff over Unicode scalar values: an O(ND) shortest edit
// script (Myers' middle-snake bisection, linear space) followed by an
// optional semantic cleanup pass.
#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "wtk/error.hpp"
#include "wtk/unicode.hpp"

namespace wtk {

enum class OpKind { Equal, Insert, Delete };

/// One edit operation. `length` is always set; `text` is only carried by
/// Insert ops (canonical form stores Equal and Delete as lengths).
struct EditOp {
  OpKind kind = OpKind::Equal;
  std::size_t length = 0;
  Text text;

  static EditOp equal(std::size_t n) { return {OpKind::Equal, n, {}}; }
  static EditOp del(std::size_t n) { return {OpKind::Delete, n, {}}; }
  static EditOp insert(Text t) {
    const auto n = t.size();
    return {OpKind::Insert, n, std::move(t)};
  }

  bool operator==(const EditOp&) const = default;
};

struct EditScript {
  std::vector<EditOp> ops;
  std::size_t old_len = 0;
  std::size_t new_len = 0;

  bool operator==(const EditScript&) const = default;
};

struct DiffOptions {
  bool semantic_cleanup = true;
  /// Insert/Delete groups separated by an Equal run shorter than this are merged.
  std::size_t merge_equal_below = 3;
  std::size_t max_len = 10u * 1024u * 1024u;
};

/// Builds a script from ops, deriving old_len/new_len.
inline EditScript make_script(std::vector<EditOp> ops) {
  EditScript s;
  for (const auto& op : ops) {
    if (op.kind != OpKind::Insert) s.old_len += op.length;
    if (op.kind != OpKind::Delete) s.new_len += op.length;
  }
  s.ops = std::move(ops);
  return s;
}

inline bool is_canonical(const EditScript& s) {
  for (std::size_t i = 0; i < s.ops.size(); ++i) {
    if (s.ops[i].length == 0) return false;
    if (i > 0 && s.ops[i].kind == s.ops[i - 1].kind) return false;
    // Delete comes first inside a change run.
    if (i > 0 && s.ops[i].kind == OpKind::Delete && s.ops[i - 1].kind == OpKind::Insert) return false;
  }
  return true;
}

/// Sum of Insert and Delete lengths.
inline std::size_t edit_cost(const EditScript& s) {
  std::size_t cost = 0;
  for (const auto& op : s.ops)
    if (op.kind != OpKind::Equal) cost += op.length;
  return cost;
}

namespace detail {

struct Run {
  OpKind kind;
  std::size_t len;
};

using Runs = std::vector<Run>;

inline std::size_t common_prefix(TextView a, TextView b) {
  const auto n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

inline std::size_t common_suffix(TextView a, TextView b) {
  const auto n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[a.size() - 1 - i] == b[b.size() - 1 - i]) ++i;
  return i;
}

inline void push(Runs& out, OpKind kind, std::size_t len) {
  if (len == 0) return;
  if (!out.empty() && out.back().kind == kind) {
    out.back().len += len;
    return;
  }
  out.push_back({kind, len});
}

inline void diff_main(TextView a, TextView b, Runs& out);

// Split at the middle snake and recurse on both halves.
inline void bisect_split(TextView a, TextView b, std::size_t x, std::size_t y, Runs& out) {
  diff_main(a.substr(0, x), b.substr(0, y), out);
  diff_main(a.substr(x), b.substr(y), out);
}

inline void bisect(TextView a, TextView b, Runs& out) {
  using idx = std::ptrdiff_t;
  const idx n = static_cast<idx>(a.size());
  const idx m = static_cast<idx>(b.size());
  const idx max_d = (n + m + 1) / 2;
  const idx v_offset = max_d;
  const idx v_length = 2 * max_d;
  std::vector<idx> v1(static_cast<std::size_t>(v_length), -1);
  std::vector<idx> v2(static_cast<std::size_t>(v_length), -1);
  v1[v_offset + 1] = 0;
  v2[v_offset + 1] = 0;
  const idx delta = n - m;
  // With an odd delta the forward path collides with the reverse one.
  const bool front = (delta % 2 != 0);
  idx k1start = 0, k1end = 0, k2start = 0, k2end = 0;

  for (idx d = 0; d < max_d; ++d) {
    for (idx k1 = -d + k1start; k1 <= d - k1end; k1 += 2) {
      const idx k1_offset = v_offset + k1;
      idx x1 = (k1 == -d || (k1 != d && v1[k1_offset - 1] < v1[k1_offset + 1])) ? v1[k1_offset + 1]
                                                                                  : v1[k1_offset - 1] + 1;
      idx y1 = x1 - k1;
      while (x1 < n && y1 < m && a[x1] == b[y1]) ++x1, ++y1;
      v1[k1_offset] = x1;
      if (x1 > n) {
        k1end += 2;
      } else if (y1 > m) {
        k1start += 2;
      } else if (front) {
        const idx k2_offset = v_offset + delta - k1;
        if (k2_offset >= 0 && k2_offset < v_length && v2[k2_offset] != -1) {
          const idx x2 = n - v2[k2_offset];
          if (x1 >= x2) {
            bisect_split(a, b, static_cast<std::size_t>(x1), static_cast<std::size_t>(y1), out);
            return;
          }
        }
      }
    }
    for (idx k2 = -d + k2start; k2 <= d - k2end; k2 += 2) {
      const idx k2_offset = v_offset + k2;
      idx x2 = (k2 == -d || (k2 != d && v2[k2_offset - 1] < v2[k2_offset + 1])) ? v2[k2_offset + 1]
                                                                                  : v2[k2_offset - 1] + 1;
      idx y2 = x2 - k2;
      while (x2 < n && y2 < m && a[n - x2 - 1] == b[m - y2 - 1]) ++x2, ++y2;
      v2[k2_offset] = x2;
      if (x2 > n) {
        k2end += 2;
      } else if (y2 > m) {
        k2start += 2;
      } else if (!front) {
        const idx k1_offset = v_offset + delta - k2;
        if (k1_offset >= 0 && k1_offset < v_length && v1[k1_offset] != -1) {
          const idx x1 = v1[k1_offset];
          const idx y1 = v_offset + x1 - k1_offset;
          if (x1 >= n - x2) {
            bisect_split(a, b, static_cast<std::size_t>(x1), static_cast<std::size_t>(y1), out);
            return;
          }
        }
      }
    }
  }
  // Unreachable for complete searches; kept as a correct fallback.
  push(out, OpKind::Delete, a.size());
  push(out, OpKind::Insert, b.size());
}

// Assumes nothing about a and b; strips common affixes first.
inline void diff_main(TextView a, TextView b, Runs& out) {
  const auto pre = common_prefix(a, b);
  push(out, OpKind::Equal, pre);
  a.remove_prefix(pre);
  b.remove_prefix(pre);
  const auto suf = common_suffix(a, b);
  a.remove_suffix(suf);
  b.remove_suffix(suf);

  if (a.empty()) {
    push(out, OpKind::Insert, b.size());
  } else if (b.empty()) {
    push(out, OpKind::Delete, a.size());
  } else {
    const bool a_longer = a.size() > b.size();
    const TextView longer = a_longer ? a : b;
    const TextView shorter = a_longer ? b : a;
    const auto hit = longer.find(shorter);
    if (hit != TextView::npos) {
      // The shorter text is a substring: the LCS is the shorter text itself.
      const auto edge = a_longer ? OpKind::Delete : OpKind::Insert;
      push(out, edge, hit);
      push(out, OpKind::Equal, shorter.size());
      push(out, edge, longer.size() - hit - shorter.size());
    } else if (shorter.size() == 1) {
      push(out, OpKind::Delete, a.size());
      push(out, OpKind::Insert, b.size());
    } else {
      bisect(a, b, out);
    }
  }
  push(out, OpKind::Equal, suf);
}

// Merge same-kind neighbours and fold every change run into Delete then Insert.
inline Runs canonicalize(const Runs& in) {
  Runs out;
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i].kind == OpKind::Equal) {
      push(out, OpKind::Equal, in[i].len);
      ++i;
      continue;
    }
    std::size_t del = 0, ins = 0;
    while (i < in.size() && in[i].kind != OpKind::Equal) {
      (in[i].kind == OpKind::Delete ? del : ins) += in[i].len;
      ++i;
    }
    push(out, OpKind::Delete, del);
    push(out, OpKind::Insert, ins);
  }
  return out;
}

// Interior Equal runs shorter than `below` become part of both sides of the
// surrounding change. Equal lengths never change here, so one pass is a fixpoint.
inline Runs merge_short_equalities(const Runs& in, std::size_t below) {
  Runs out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const bool interior = i > 0 && i + 1 < in.size();
    if (in[i].kind == OpKind::Equal && interior && in[i].len < below) {
      out.push_back({OpKind::Delete, in[i].len});
      out.push_back({OpKind::Insert, in[i].len});
    } else {
      out.push_back(in[i]);
    }
  }
  return canonicalize(out);
}

// Slide each change run left, through text it shares with the preceding
// Equal run, to the nearest position that starts a word.
inline Runs align_to_whitespace(Runs runs, TextView a, TextView b) {
  std::size_t oa = 0, ob = 0;  // positions at the start of runs[i]
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].kind == OpKind::Equal || i == 0 || runs[i - 1].kind != OpKind::Equal) {
      // Only change runs that start right after an Equal run are candidates.
      if (runs[i].kind != OpKind::Insert) oa += runs[i].len;
      if (runs[i].kind != OpKind::Delete) ob += runs[i].len;
      continue;
    }
    std::size_t del = 0, ins = 0, j = i;
    for (; j < runs.size() && runs[j].kind != OpKind::Equal; ++j)
      (runs[j].kind == OpKind::Delete ? del : ins) += runs[j].len;

    const std::size_t eq_len = runs[i - 1].len;
    const bool eq_at_start = (i - 1 == 0);
    const std::size_t limit_edit = std::min(del ? del : ins, ins ? ins : del);
    const std::size_t limit = std::min(eq_at_start ? eq_len : eq_len - 1, limit_edit);

    auto aligned = [&](std::size_t k) {
      const std::size_t sa = oa - k;
      if (sa == 0) return true;
      if (is_space(a[sa - 1])) return true;
      if (k > 0) return is_space(a[sa]);
      return (del == 0 || is_space(a[oa])) && (ins == 0 || is_space(b[ob]));
    };

    std::size_t shift = 0;
    bool found = false;
    for (std::size_t k = 0; k <= limit; ++k) {
      if (k > 0) {
        // The k-th character from the end must be shared by the Equal run and every edit text.
        const char32_t c = a[oa - k];
        if (del && a[oa + del - k] != c) break;
        if (ins && b[ob + ins - k] != c) break;
      }
      if (aligned(k)) {
        shift = k;
        found = true;
        break;
      }
    }
    if (found && shift > 0) {
      runs[i - 1].len -= shift;
      if (j < runs.size()) {
        runs[j].len += shift;
      } else {
        runs.push_back({OpKind::Equal, shift});
      }
      oa -= shift;
      ob -= shift;
    }
    oa += del;
    ob += ins;
    i = j - 1;
  }
  std::erase_if(runs, [](const Run& r) { return r.len == 0; });
  return canonicalize(runs);
}

inline EditScript materialize(const Runs& runs, TextView b) {
  std::vector<EditOp> ops;
  ops.reserve(runs.size());
  std::size_t ob = 0;
  for (const auto& r : runs) {
    switch (r.kind) {
      case OpKind::Equal:
        ops.push_back(EditOp::equal(r.len));
        ob += r.len;
        break;
      case OpKind::Delete:
        ops.push_back(EditOp::del(r.len));
        break;
      case OpKind::Insert:
        ops.push_back(EditOp::insert(Text(b.substr(ob, r.len))));
        ob += r.len;
        break;
    }
  }
  return make_script(std::move(ops));
}

inline void check_size(TextView a, TextView b, std::size_t cap) {
  if (a.size() > cap || b.size() > cap)
    throw Error(ErrorCode::InputTooLarge,
                "diff input exceeds " + std::to_string(cap) + " scalar values");
}

}  // namespace detail

/// The LCS-optimal script before any cleanup, in canonical form.
inline EditScript shortest_edit_script(TextView old_text, TextView new_text,
                                       std::size_t max_len = DiffOptions{}.max_len) {
  detail::check_size(old_text, new_text, max_len);
  detail::Runs runs;
  detail::diff_main(old_text, new_text, runs);
  return detail::materialize(detail::canonicalize(runs), new_text);
}

/// Shortest edit script, then (by default) semantic cleanup: short Equal runs
/// between changes are absorbed, and change boundaries slide left to word starts.
inline EditScript diff(TextView old_text, TextView new_text, const DiffOptions& opts = {}) {
  detail::check_size(old_text, new_text, opts.max_len);
  detail::Runs runs;
  detail::diff_main(old_text, new_text, runs);
  runs = detail::canonicalize(runs);
  if (opts.semantic_cleanup) {
    runs = detail::merge_short_equalities(runs, opts.merge_equal_below);
    runs = detail::align_to_whitespace(std::move(runs), old_text, new_text);
  }
  return detail::materialize(runs, new_text);
}

inline Text apply(TextView old_text, const EditScript& script) {
  if (script.old_len != old_text.size())
    throw Error(ErrorCode::LengthMismatch, "script expects " + std::to_string(script.old_len) +
                                               " scalars, text has " + std::to_string(old_text.size()));
  Text out;
  out.reserve(script.new_len);
  std::size_t pos = 0;
  for (const auto& op : script.ops) {
    switch (op.kind) {
      case OpKind::Equal:
        if (pos + op.length > old_text.size()) throw Error(ErrorCode::LengthMismatch, "equal op overruns text");
        out.append(old_text.substr(pos, op.length));
        pos += op.length;
        break;
      case OpKind::Delete:
        if (pos + op.length > old_text.size()) throw Error(ErrorCode::LengthMismatch, "delete op overruns text");
        pos += op.length;
        break;
      case OpKind::Insert:
        out.append(op.text);
        break;
    }
  }
  if (pos != old_text.size() || out.size() != script.new_len)
    throw Error(ErrorCode::LengthMismatch, "script does not cover the text");
  return out;
}

// Serialization: [["eq",n],["ins",str],["del",n],...]

inline nlohmann::ordered_json script_to_json(const EditScript& s) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& op : s.ops) {
    switch (op.kind) {
      case OpKind::Equal: arr.push_back({"eq", op.length}); break;
      case OpKind::Delete: arr.push_back({"del", op.length}); break;
      case OpKind::Insert: arr.push_back({"ins", to_utf8(op.text)}); break;
    }
  }
  return arr;
}

/// Accepts the canonical form plus Equal ops carrying text.
template <typename Json>
EditScript script_from_json(const Json& j) {
  auto bad = [](const std::string& why) { return Error(ErrorCode::MalformedRecord, "edit script: " + why); };
  if (!j.is_array()) throw bad("expected an array of ops");
  std::vector<EditOp> ops;
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string()) throw bad("op must be [kind, payload]");
    const auto kind = item[0].template get<std::string>();
    const auto& payload = item[1];
    if (kind == "ins") {
      if (!payload.is_string()) throw bad("ins payload must be a string");
      ops.push_back(EditOp::insert(from_utf8(payload.template get<std::string>())));
    } else if (kind == "eq" || kind == "del") {
      std::size_t n = 0;
      if (payload.is_number_unsigned()) {
        n = payload.template get<std::size_t>();
      } else if (kind == "eq" && payload.is_string()) {
        n = from_utf8(payload.template get<std::string>()).size();
      } else {
        throw bad(kind + " payload must be a non-negative integer");
      }
      ops.push_back(kind == "eq" ? EditOp::equal(n) : EditOp::del(n));
    } else {
      throw bad("unknown op kind '" + kind + "'");
    }
  }
  return make_script(std::move(ops));
}

}  // namespace wtk
