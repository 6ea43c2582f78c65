// bundle.hpp
//
// Self-contained playback bundle consumed by the annotator UI:
//   {"format":"wtk-bundle","version":1,
//    "session":{"session_id","participant_id","n_events","files":[{"file_id","initial_text","final_text"}]},
//    "schema":{...},"totals":{...},"actions":[...],
//    "frames":[{"step","t_ms","file_id","caret_hint","ops":[...]}],
//    "annotations":[{...}, ...]}
// Frame ops transform the previous frame of the same file (or the file's
// initial text) into that frame's text.
#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wtk/annotation.hpp"
#include "wtk/diff.hpp"
#include "wtk/error.hpp"
#include "wtk/json_util.hpp"
#include "wtk/playback.hpp"
#include "wtk/segment.hpp"
#include "wtk/session.hpp"
#include "wtk/taxonomy.hpp"

namespace wtk {

inline constexpr int kBundleVersion = 1;

struct BundleFile {
  std::string file_id;
  Text initial_text;
  Text final_text;
};

struct Bundle {
  std::string session_id;
  std::string participant_id;
  std::size_t n_events = 0;
  std::vector<BundleFile> files;
  TaxonomySchema schema = builtin_simple_schema();
  ActionStream stream;
  std::vector<PlaybackFrame> frames;
  std::vector<AnnotationDoc> annotations;

  const BundleFile* file(std::string_view id) const {
    for (const auto& f : files)
      if (f.file_id == id) return &f;
    return nullptr;
  }
};

namespace detail {

// The script that replaces `deleted` at `at` with `inserted` in a text of length n.
inline EditScript splice_script(std::size_t n, std::size_t at, std::size_t deleted, const Text& inserted) {
  std::vector<EditOp> ops;
  if (at > 0) ops.push_back(EditOp::equal(at));
  if (deleted > 0) ops.push_back(EditOp::del(deleted));
  if (!inserted.empty()) ops.push_back(EditOp::insert(inserted));
  if (n > at + deleted) ops.push_back(EditOp::equal(n - at - deleted));
  return make_script(std::move(ops));
}

}  // namespace detail

inline nlohmann::ordered_json make_bundle(const Session& s, const ActionStream& stream, const TaxonomySchema& schema,
                                          const std::vector<AnnotationDoc>& annotations) {
  using oj = nlohmann::ordered_json;
  for (const auto& doc : annotations) {
    if (doc.session_id != s.session_id)
      throw Error(ErrorCode::SessionMismatch,
                  "annotation '" + doc.annotator_id + "' is for session '" + doc.session_id + "'");
    check_schema(doc, schema);
    project(doc, stream, schema);
  }
  const auto frames = build_playback(s, stream);

  oj j;
  j["format"] = "wtk-bundle";
  j["version"] = kBundleVersion;
  oj files = oj::array();
  for (const auto& f : s.files())
    files.push_back(oj{{"file_id", f}, {"initial_text", to_utf8(*s.first_text(f))}, {"final_text", to_utf8(*s.last_text(f))}});
  j["session"] = oj{{"session_id", s.session_id},
                    {"participant_id", s.participant_id},
                    {"n_events", s.events.size()},
                    {"files", std::move(files)}};
  j["schema"] = schema_to_json(schema);
  auto st = stream_to_json(stream);
  j["totals"] = std::move(st["totals"]);
  j["actions"] = std::move(st["actions"]);

  oj jf = oj::array();
  std::map<std::string, std::size_t> len;
  for (const auto& f : s.files()) len[f] = s.first_text(f)->size();
  for (const auto& fr : frames) {
    EditScript ops;
    if (stream.actions.empty()) {
      ops = detail::splice_script(fr.text_after.size(), 0, 0, {});
    } else {
      const auto& a = stream.actions[fr.step];
      ops = detail::splice_script(len[a.file_id], a.start_offset, a.deleted_text.size(), a.inserted_text);
    }
    len[fr.file_id] = fr.text_after.size();
    jf.push_back(oj{{"step", fr.step},
                    {"t_ms", fr.t_ms},
                    {"file_id", fr.file_id},
                    {"caret_hint", fr.caret_hint},
                    {"ops", script_to_json(ops)}});
  }
  j["frames"] = std::move(jf);
  oj ja = oj::array();
  for (const auto& doc : annotations) ja.push_back(annotation_to_json(doc));
  j["annotations"] = std::move(ja);
  return j;
}

/// Parses a bundle and materializes every frame; checks that each file's
/// last frame reproduces its recorded final text.
template <typename Json>
Bundle read_bundle(const Json& j) {
  Bundle b;
  try {
    if (j.at("format").template get<std::string>() != "wtk-bundle")
      throw Error(ErrorCode::MalformedRecord, "not a wtk bundle");
    const int version = j.at("version").template get<int>();
    if (version != kBundleVersion)
      throw Error(ErrorCode::MalformedRecord, "unsupported bundle version " + std::to_string(version));
    const auto& sj = j.at("session");
    b.session_id = sj.at("session_id").template get<std::string>();
    b.participant_id = sj.at("participant_id").template get<std::string>();
    b.n_events = detail::get_uint(sj, "n_events");
    for (const auto& f : sj.at("files"))
      b.files.push_back({f.at("file_id").template get<std::string>(),
                         from_utf8(f.at("initial_text").template get<std::string>()),
                         from_utf8(f.at("final_text").template get<std::string>())});
    b.schema = schema_from_json(j.at("schema"));
    Json st = Json::object();
    st["session_id"] = b.session_id;
    st["totals"] = j.at("totals");
    st["actions"] = j.at("actions");
    b.stream = stream_from_json(st);

    std::map<std::string, Text> current;
    for (const auto& f : b.files) current[f.file_id] = f.initial_text;
    for (const auto& fj : j.at("frames")) {
      PlaybackFrame fr;
      fr.step = detail::get_uint(fj, "step");
      fr.t_ms = detail::get_uint(fj, "t_ms");
      fr.file_id = fj.at("file_id").template get<std::string>();
      fr.caret_hint = detail::get_uint(fj, "caret_hint");
      const auto it = current.find(fr.file_id);
      if (it == current.end()) throw Error(ErrorCode::MalformedRecord, "frame on unknown file '" + fr.file_id + "'");
      it->second = wtk::apply(it->second, script_from_json(fj.at("ops")));
      fr.text_after = it->second;
      b.frames.push_back(std::move(fr));
    }
    for (const auto& aj : j.at("annotations")) b.annotations.push_back(annotation_from_json(aj));
    for (const auto& f : b.files)
      if (current[f.file_id] != f.final_text)
        throw Error(ErrorCode::ReplayDivergence, "bundle frames for '" + f.file_id + "' do not reach its final text");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("bundle: ") + e.what());
  }
  return b;
}

inline Bundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, e.what());
  }
  return read_bundle(j);
}

}  // namespace wtk
