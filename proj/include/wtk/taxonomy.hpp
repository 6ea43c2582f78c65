// taxonomy.hpp
//
// Label hierarchy: intention -> writer action -> information unit, plus a
// distinguished None label. Each label owns one bit of a LabelSet; the bit
// order is intentions each followed by their actions (declaration order),
// then distinct units in first-declaration order, then None.
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "wtk/error.hpp"

namespace wtk {

/// Fixed-width bit vector sized to a schema's bit order.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

  /// Bit i of `pattern` becomes label bit i.
  static LabelSet from_pattern(std::uint64_t pattern, std::size_t n) {
    LabelSet ls(n);
    for (std::size_t i = 0; i < n && i < 64; ++i)
      if (pattern >> i & 1u) ls.set(i);
    return ls;
  }

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const { return words_[i / 64] >> (i % 64) & 1u; }
  void set(std::size_t i, bool v = true) {
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    if (v) {
      words_[i / 64] |= bit;
    } else {
      words_[i / 64] &= ~bit;
    }
  }
  bool any() const {
    return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  std::vector<std::size_t> ones() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size_; ++i)
      if (test(i)) out.push_back(i);
    return out;
  }

  LabelSet& operator|=(const LabelSet& o) {
    check(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  friend LabelSet operator&(LabelSet a, const LabelSet& b) {
    a.check(b);
    for (std::size_t i = 0; i < a.words_.size(); ++i) a.words_[i] &= b.words_[i];
    return a;
  }
  /// Bits set in a but not in b.
  friend LabelSet operator-(LabelSet a, const LabelSet& b) {
    a.check(b);
    for (std::size_t i = 0; i < a.words_.size(); ++i) a.words_[i] &= ~b.words_[i];
    return a;
  }
  bool operator==(const LabelSet&) const = default;

  /// "0110..." with bit 0 first.
  std::string to_bitstring() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
      if (test(i)) s[i] = '1';
    return s;
  }

 private:
  void check(const LabelSet& o) const {
    if (o.size_ != size_) throw Error(ErrorCode::SizeMismatch, "label sets differ in width");
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class LabelLevel { Intention, Action, Unit, None };

struct ActionDef {
  std::string name;
  std::vector<std::string> units;
  bool operator==(const ActionDef&) const = default;
};

struct IntentionDef {
  std::string name;
  std::vector<ActionDef> actions;
  bool operator==(const IntentionDef&) const = default;
};

struct LabelInfo {
  std::string name;
  LabelLevel level;
  std::vector<std::size_t> parents;  // intention bit for actions; action bits for units
};

class TaxonomySchema {
 public:
  /// Validates and derives the bit order. Throws DuplicateName / EmptySchema.
  TaxonomySchema(std::string schema_id, std::vector<IntentionDef> intentions, std::string none_label = "None",
                 bool none_exclusive = true)
      : schema_id_(std::move(schema_id)),
        intentions_(std::move(intentions)),
        none_label_(std::move(none_label)),
        none_exclusive_(none_exclusive) {
    build();
  }

  const std::string& schema_id() const noexcept { return schema_id_; }
  const std::vector<IntentionDef>& intentions() const noexcept { return intentions_; }
  const std::string& none_label() const noexcept { return none_label_; }
  bool none_exclusive() const noexcept { return none_exclusive_; }

  std::size_t width() const noexcept { return labels_.size(); }
  const std::vector<LabelInfo>& labels() const noexcept { return labels_; }
  const LabelInfo& label(std::size_t bit) const { return labels_.at(bit); }
  std::size_t none_bit() const noexcept { return labels_.size() - 1; }

  std::vector<std::string> bit_order() const {
    std::vector<std::string> out;
    out.reserve(labels_.size());
    for (const auto& l : labels_) out.push_back(l.name);
    return out;
  }

  std::optional<std::size_t> index_of(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Intention bits in declaration order.
  std::vector<std::size_t> intention_bits() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i].level == LabelLevel::Intention) out.push_back(i);
    return out;
  }

  bool operator==(const TaxonomySchema& o) const {
    return schema_id_ == o.schema_id_ && intentions_ == o.intentions_ && none_label_ == o.none_label_ &&
           none_exclusive_ == o.none_exclusive_;
  }

 private:
  void add(std::string name, LabelLevel level, std::vector<std::size_t> parents) {
    if (name.empty()) throw Error(ErrorCode::MalformedRecord, "label names must be non-empty");
    if (!index_.emplace(name, labels_.size()).second) throw Error(ErrorCode::DuplicateName, "'" + name + "'");
    labels_.push_back({std::move(name), level, std::move(parents)});
  }

  void build() {
    if (intentions_.empty()) throw Error(ErrorCode::EmptySchema, "schema '" + schema_id_ + "' has no intentions");
    for (const auto& in : intentions_) {
      const std::size_t ibit = labels_.size();
      add(in.name, LabelLevel::Intention, {});
      for (const auto& act : in.actions) add(act.name, LabelLevel::Action, {ibit});
    }
    // Units are shared across actions: one bit per distinct unit name.
    for (const auto& in : intentions_) {
      for (const auto& act : in.actions) {
        const std::size_t abit = index_.at(act.name);
        std::set<std::string> seen;
        for (const auto& unit : act.units) {
          if (!seen.insert(unit).second)
            throw Error(ErrorCode::DuplicateName, "unit '" + unit + "' repeated under '" + act.name + "'");
          const auto it = index_.find(unit);
          if (it == index_.end()) {
            add(unit, LabelLevel::Unit, {abit});
          } else if (labels_[it->second].level == LabelLevel::Unit) {
            labels_[it->second].parents.push_back(abit);
          } else {
            throw Error(ErrorCode::DuplicateName, "unit '" + unit + "' collides with a non-unit label");
          }
        }
      }
    }
    add(none_label_, LabelLevel::None, {});
  }

  std::string schema_id_;
  std::vector<IntentionDef> intentions_;
  std::string none_label_;
  bool none_exclusive_;
  std::vector<LabelInfo> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// The ten-label schema: Planning{generation, organization},
/// Implementation{lexical_chaining}, Revision{syntactic, lexical, structural}, None.
inline const TaxonomySchema& builtin_simple_schema() {
  static const TaxonomySchema schema(
      "simple-v1",
      {
          {"Planning", {{"generation", {}}, {"organization", {}}}},
          {"Implementation", {{"lexical_chaining", {}}}},
          {"Revision", {{"syntactic", {}}, {"lexical", {}}, {"structural", {}}}},
      },
      "None", true);
  return schema;
}

// Schema file:
// {"schema_id":str,"intentions":[{"name":str,"actions":[{"name":str,"units":[str,...]?}]}],
//  "none_label":str,"none_exclusive":bool}
// A top-level "actions":[{"name":str,"parent":str,"units":[...]?}] list may
// attach further actions to declared intentions.

template <typename Json>
TaxonomySchema schema_from_json(const Json& j) {
  auto bad = [](const std::string& why) { return Error(ErrorCode::MalformedRecord, "schema: " + why); };
  try {
    if (!j.is_object()) throw bad("expected an object");
    const auto id = j.at("schema_id").template get<std::string>();
    auto parse_action = [](const auto& a) {
      ActionDef def{a.at("name").template get<std::string>(), {}};
      if (a.contains("units")) def.units = a.at("units").template get<std::vector<std::string>>();
      return def;
    };
    std::vector<IntentionDef> intentions;
    if (j.contains("intentions")) {
      for (const auto& in : j.at("intentions")) {
        IntentionDef def{in.at("name").template get<std::string>(), {}};
        if (in.contains("actions"))
          for (const auto& a : in.at("actions")) def.actions.push_back(parse_action(a));
        intentions.push_back(std::move(def));
      }
    }
    if (j.contains("actions")) {
      for (const auto& a : j.at("actions")) {
        const auto parent = a.at("parent").template get<std::string>();
        const auto it = std::find_if(intentions.begin(), intentions.end(),
                                     [&](const IntentionDef& d) { return d.name == parent; });
        if (it == intentions.end())
          throw Error(ErrorCode::OrphanAction, "action '" + a.at("name").template get<std::string>() +
                                                   "' names unknown intention '" + parent + "'");
        it->actions.push_back(parse_action(a));
      }
    }
    const auto none = j.contains("none_label") ? j.at("none_label").template get<std::string>() : "None";
    const bool excl = j.contains("none_exclusive") ? j.at("none_exclusive").template get<bool>() : true;
    return TaxonomySchema(id, std::move(intentions), none, excl);
  } catch (const nlohmann::json::exception& e) {
    throw bad(e.what());
  }
}

inline TaxonomySchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, e.what());
  }
  return schema_from_json(j);
}

inline nlohmann::ordered_json schema_to_json(const TaxonomySchema& s) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["schema_id"] = s.schema_id();
  auto ins = oj::array();
  for (const auto& in : s.intentions()) {
    auto acts = oj::array();
    for (const auto& a : in.actions) {
      oj ja{{"name", a.name}};
      if (!a.units.empty()) ja["units"] = a.units;
      acts.push_back(std::move(ja));
    }
    ins.push_back(oj{{"name", in.name}, {"actions", std::move(acts)}});
  }
  j["intentions"] = std::move(ins);
  j["none_label"] = s.none_label();
  j["none_exclusive"] = s.none_exclusive();
  return j;
}

struct LabelViolation {
  std::string rule;  // OrphanActionBit | OrphanUnitBit | NoneNotExclusive
  std::string label;
  bool operator==(const LabelViolation&) const = default;
};

inline void check_width(const TaxonomySchema& schema, const LabelSet& ls) {
  if (ls.size() != schema.width())
    throw Error(ErrorCode::SizeMismatch, "label set has " + std::to_string(ls.size()) + " bits, schema '" +
                                             schema.schema_id() + "' has " + std::to_string(schema.width()));
}

/// Parent closure and None exclusivity.
inline std::vector<LabelViolation> validate_labels(const TaxonomySchema& schema, const LabelSet& ls) {
  check_width(schema, ls);
  std::vector<LabelViolation> out;
  for (const auto bit : ls.ones()) {
    const auto& info = schema.label(bit);
    const bool has_parent =
        std::any_of(info.parents.begin(), info.parents.end(), [&](std::size_t p) { return ls.test(p); });
    if (info.level == LabelLevel::Action && !has_parent) out.push_back({"OrphanActionBit", info.name});
    if (info.level == LabelLevel::Unit && !has_parent) out.push_back({"OrphanUnitBit", info.name});
  }
  if (schema.none_exclusive() && ls.test(schema.none_bit()) && ls.count() > 1)
    out.push_back({"NoneNotExclusive", schema.none_label()});
  return out;
}

/// Adds implied ancestors: an action's intention, and a unit's action when
/// the unit has a single parent action.
inline LabelSet close_labels(const TaxonomySchema& schema, LabelSet ls) {
  check_width(schema, ls);
  for (const auto bit : ls.ones()) {
    const auto& info = schema.label(bit);
    if (info.level == LabelLevel::Unit && info.parents.size() == 1) ls.set(info.parents.front());
  }
  for (const auto bit : ls.ones()) {
    const auto& info = schema.label(bit);
    if (info.level == LabelLevel::Action) ls.set(info.parents.front());
  }
  return ls;
}

template <typename Names>
LabelSet encode(const TaxonomySchema& schema, const Names& names) {
  LabelSet ls(schema.width());
  for (const auto& name : names) {
    const auto bit = schema.index_of(name);
    if (!bit) throw Error(ErrorCode::UnknownLabel, "'" + std::string(name) + "' is not in schema '" +
                                                       schema.schema_id() + "'");
    ls.set(*bit);
  }
  return ls;
}

inline LabelSet encode(const TaxonomySchema& schema, std::initializer_list<std::string_view> names) {
  return encode<std::initializer_list<std::string_view>>(schema, names);
}

/// Label names in bit order.
inline std::vector<std::string> decode(const TaxonomySchema& schema, const LabelSet& ls) {
  check_width(schema, ls);
  std::vector<std::string> out;
  for (const auto bit : ls.ones()) out.push_back(schema.label(bit).name);
  return out;
}

}  // namespace wtk
