// wtk - writing trajectory toolkit command line.
//
//   wtk validate FILE...                      sessions, action streams, schemas, annotations, bundles
//   wtk segment SESSION                       -> <out>/<session>.actions.json
//   wtk stats STREAM... [--annotations A...]  -> <out>/stats.{csv,txt} [+ labels.{csv,txt}]
//   wtk iaa A B STREAM [A B STREAM]...        -> <out>/iaa.{json,txt}
//   wtk timeline ANNOTATION STREAM            -> <out>/<session>.<annotator>.timeline.csv
//   wtk bundle SESSION STREAM [ANNOTATION...] -> <out>/<session>.bundle.json
//
// Exit codes: 0 success, 2 input or validation error, 3 cross-file mismatch.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wtk/wtk.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kMismatch = 3;

struct RunConfig {
  std::string schema = "simple";
  std::size_t disc_gap = 20;
  std::size_t merge_gap_words = 2;
  std::string distribution_unit = "spans";
  std::string out = ".";
  std::string log;
};

/// Thrown for failures that are not library errors but map to an exit code.
struct Exit {
  int code;
  std::string message;
};

wtk::TaxonomySchema resolve_schema(const std::string& spec) {
  if (spec == "simple" || spec == "simple-v1") return wtk::builtin_simple_schema();
  return wtk::load_schema(spec);
}

void write_file(const fs::path& path, const std::string& content) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw wtk::Error(wtk::ErrorCode::Io, "cannot write " + path.string());
  out << content;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

void append_log(const RunConfig& cfg, const std::string& command, const std::vector<std::string>& inputs) {
  if (cfg.log.empty()) return;
  std::ofstream out(cfg.log, std::ios::app);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  nlohmann::ordered_json j{{"time", stamp}, {"command", command}, {"inputs", inputs}, {"out", cfg.out},
                           {"schema", cfg.schema}, {"disc_gap", cfg.disc_gap},
                           {"merge_gap_words", cfg.merge_gap_words}, {"distribution_unit", cfg.distribution_unit}};
  out << j.dump() << '\n';
}

wtk::DistributionUnit resolve_unit(const std::string& s) {
  const auto unit = wtk::parse_distribution_unit(s);
  if (!unit) throw Exit{kInputError, "unknown distribution unit '" + s + "' (expected spans|slots)"};
  return *unit;
}

void print_violations(const std::string& file, const std::vector<wtk::Violation>& vs) {
  for (const auto& v : vs)
    std::cerr << file << ": " << v.rule << (v.seq ? " at seq " + std::to_string(*v.seq) : "")
              << (v.detail.empty() ? "" : " (" + v.detail + ")") << '\n';
}

// ---------------------------------------------------------------------------

enum class FileKind { Session, Stream, Schema, Annotation, Bundle };

FileKind sniff(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wtk::Error(wtk::ErrorCode::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const auto j = nlohmann::json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return FileKind::Session;
  if (j.contains("format")) return FileKind::Bundle;
  if (j.contains("spans")) return FileKind::Annotation;
  if (j.contains("intentions")) return FileKind::Schema;
  if (j.contains("actions") && j.contains("totals")) return FileKind::Stream;
  return FileKind::Session;
}

int cmd_validate(const RunConfig& cfg, const std::vector<std::string>& files, const std::string& stream_path) {
  bool ok = true;
  for (const auto& f : files) {
    switch (sniff(f)) {
      case FileKind::Session: {
        const auto s = wtk::load_session(f);
        const auto vs = wtk::validate_session(s);
        print_violations(f, vs);
        if (vs.empty()) std::cout << f << ": ok (session, " << s.events.size() << " events)\n";
        ok &= vs.empty();
        break;
      }
      case FileKind::Stream: {
        const auto st = wtk::load_action_stream(f);
        const auto vs = wtk::validate_stream(st);
        print_violations(f, vs);
        if (vs.empty()) std::cout << f << ": ok (action stream, " << st.actions.size() << " actions)\n";
        ok &= vs.empty();
        break;
      }
      case FileKind::Schema: {
        const auto schema = wtk::load_schema(f);
        std::cout << f << ": ok (schema " << schema.schema_id() << ", " << schema.width() << " bits)\n";
        break;
      }
      case FileKind::Annotation: {
        const auto doc = wtk::load_annotation(f);
        const auto schema = resolve_schema(cfg.schema);
        std::optional<std::size_t> n_slots;
        if (!stream_path.empty()) {
          const auto st = wtk::load_action_stream(stream_path);
          if (st.session_id != doc.session_id)
            throw wtk::Error(wtk::ErrorCode::SessionMismatch,
                             "annotation is for '" + doc.session_id + "', stream is '" + st.session_id + "'");
          n_slots = st.actions.size();
        }
        const auto vs = wtk::validate_annotation(doc, schema, n_slots);
        for (const auto& v : vs) std::cerr << f << ": " << v.rule << " (" << v.label << ")\n";
        if (vs.empty()) std::cout << f << ": ok (annotation by " << doc.annotator_id << ", " << doc.spans.size() << " spans)\n";
        ok &= vs.empty();
        break;
      }
      case FileKind::Bundle: {
        const auto b = wtk::load_bundle(f);
        std::cout << f << ": ok (bundle " << b.session_id << ", " << b.frames.size() << " frames, "
                  << b.annotations.size() << " annotations)\n";
        break;
      }
    }
  }
  return ok ? kOk : kInputError;
}

int cmd_segment(const RunConfig& cfg, const std::string& session_path) {
  const auto s = wtk::load_session(session_path);
  const auto vs = wtk::validate_session(s);
  if (!vs.empty()) {
    print_violations(session_path, vs);
    return kInputError;
  }
  wtk::SegmentConfig sc;
  sc.disc_gap = cfg.disc_gap;
  sc.merge_gap_words = cfg.merge_gap_words;
  const auto stream = wtk::segment(s, sc);
  const fs::path out = fs::path(cfg.out) / (s.session_id + ".actions.json");
  write_file(out, dump(wtk::stream_to_json(stream)));
  const auto& t = stream.totals;
  std::cout << s.session_id << ": " << t.n_actions << " actions, " << t.n_disc_edits << " disc-edits, +"
            << t.words_added << "/-" << t.words_deleted << " words -> " << out.string() << '\n';
  return kOk;
}

int cmd_stats(const RunConfig& cfg, const std::vector<std::string>& streams, const std::vector<std::string>& annotations) {
  std::vector<wtk::SampleStats> rows;
  std::map<std::string, std::size_t> n_slots;
  std::vector<std::string> order;
  for (const auto& p : streams) {
    const auto st = wtk::load_action_stream(p);
    rows.push_back(wtk::sample_stats(st));
    n_slots[st.session_id] = st.actions.size();
    order.push_back(st.session_id);
  }
  write_file(fs::path(cfg.out) / "stats.csv", wtk::render_stats_csv(rows));
  const auto table = wtk::render_stats_table(rows);
  write_file(fs::path(cfg.out) / "stats.txt", table);
  std::cout << table;

  if (annotations.empty()) return kOk;
  const auto schema = resolve_schema(cfg.schema);
  const auto unit = resolve_unit(cfg.distribution_unit);
  std::map<std::string, std::vector<wtk::AnnotationDoc>> by_session;
  for (const auto& p : annotations) {
    auto doc = wtk::load_annotation(p);
    if (!n_slots.count(doc.session_id))
      throw wtk::Error(wtk::ErrorCode::SessionMismatch, p + " annotates '" + doc.session_id + "', which has no stream");
    by_session[doc.session_id].push_back(std::move(doc));
  }
  std::vector<wtk::LabelDistribution> cols;
  for (const auto& id : order) {
    const auto it = by_session.find(id);
    if (it == by_session.end()) continue;
    cols.push_back(wtk::label_distribution(it->second, schema, unit, n_slots[id]));
  }
  write_file(fs::path(cfg.out) / "labels.csv", wtk::render_distribution_csv(cols, schema));
  const auto dist = wtk::render_distribution_table(cols, schema);
  write_file(fs::path(cfg.out) / "labels.txt", dist);
  std::cout << '\n' << dist;
  return kOk;
}

int cmd_iaa(const RunConfig& cfg, const std::vector<std::string>& args) {
  if (args.empty() || args.size() % 3 != 0)
    throw Exit{kInputError, "iaa expects triples: ANNOTATION_A ANNOTATION_B STREAM"};
  const auto schema = resolve_schema(cfg.schema);
  std::vector<wtk::SampleScore> samples;
  for (std::size_t i = 0; i < args.size(); i += 3) {
    const auto a = wtk::load_annotation(args[i]);
    const auto b = wtk::load_annotation(args[i + 1]);
    const auto st = wtk::load_action_stream(args[i + 2]);
    if (a.session_id != b.session_id)
      throw wtk::Error(wtk::ErrorCode::SessionMismatch, args[i] + " and " + args[i + 1] + " cover different sessions");
    if (a.schema_id != b.schema_id)
      throw wtk::Error(wtk::ErrorCode::SchemaMismatch, args[i] + " and " + args[i + 1] + " use different schemas");
    const auto ma = wtk::project(a, st, schema);
    const auto mb = wtk::project(b, st, schema);
    samples.push_back({st.session_id, a.annotator_id, b.annotator_id, wtk::score_pair(ma, mb)});
  }
  const auto report = wtk::mean_report(std::move(samples));
  write_file(fs::path(cfg.out) / "iaa.json", dump(wtk::report_to_json(report)));
  const auto table = wtk::render_agreement_table(report);
  write_file(fs::path(cfg.out) / "iaa.txt", table);
  std::cout << table;
  return kOk;
}

int cmd_timeline(const RunConfig& cfg, const std::string& annotation, const std::string& stream_path) {
  const auto schema = resolve_schema(cfg.schema);
  const auto doc = wtk::load_annotation(annotation);
  const auto st = wtk::load_action_stream(stream_path);
  const auto points = wtk::export_timeline(wtk::project(doc, st, schema), schema);
  const fs::path out = fs::path(cfg.out) / (doc.session_id + "." + doc.annotator_id + ".timeline.csv");
  write_file(out, wtk::timeline_csv(points));
  std::cout << doc.session_id << ": " << points.size() << " timeline points -> " << out.string() << '\n';
  return kOk;
}

int cmd_bundle(const RunConfig& cfg, const std::string& session_path, const std::string& stream_path,
               const std::vector<std::string>& annotations) {
  const auto schema = resolve_schema(cfg.schema);
  const auto s = wtk::load_session(session_path);
  const auto st = wtk::load_action_stream(stream_path);
  if (st.session_id != s.session_id)
    throw wtk::Error(wtk::ErrorCode::SessionMismatch, "stream '" + st.session_id + "' vs session '" + s.session_id + "'");
  std::vector<wtk::AnnotationDoc> docs;
  for (const auto& p : annotations) docs.push_back(wtk::load_annotation(p));
  const auto j = wtk::make_bundle(s, st, schema, docs);
  const fs::path out = fs::path(cfg.out) / (s.session_id + ".bundle.json");
  write_file(out, dump(j));
  std::cout << s.session_id << ": bundle with " << j["frames"].size() << " frames, " << docs.size()
            << " annotations -> " << out.string() << '\n';
  return kOk;
}

int exit_code_for(wtk::ErrorCode code) {
  return code == wtk::ErrorCode::SchemaMismatch || code == wtk::ErrorCode::SessionMismatch ? kMismatch : kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wtk - reconstruct and analyse writing trajectories from snapshot logs"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--schema", cfg.schema, "builtin schema name (simple) or schema file")->capture_default_str();
    sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
    sub->add_option("--log", cfg.log, "append run metadata to this sidecar log");
  };

  std::vector<std::string> files;
  std::string stream_path;
  auto* validate = app.add_subcommand("validate", "validate session, stream, schema, annotation or bundle files");
  validate->add_option("files", files, "files to validate")->required();
  validate->add_option("--stream", stream_path, "action stream used to range-check annotations");
  add_common(validate);

  std::string session_path;
  auto* segment = app.add_subcommand("segment", "diff a session into recorded actions");
  segment->add_option("session", session_path, "session log")->required();
  segment->add_option("--disc-gap,--disc_gap", cfg.disc_gap, "locality threshold in scalars")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  segment->add_option("--merge-gap-words,--merge_gap_words", cfg.merge_gap_words, "merge regions separated by fewer words")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(segment);

  std::vector<std::string> streams, annotations;
  auto* stats = app.add_subcommand("stats", "per-sample statistics and label distributions");
  stats->add_option("streams", streams, "action stream files")->required();
  stats->add_option("--annotations", annotations, "annotation files for label distributions");
  stats->add_option("--distribution-unit", cfg.distribution_unit, "spans|slots")->capture_default_str();
  add_common(stats);

  std::vector<std::string> iaa_args;
  auto* iaa = app.add_subcommand("iaa", "inter-annotator agreement over annotation pairs");
  iaa->add_option("triples", iaa_args, "ANNOTATION_A ANNOTATION_B STREAM, repeated per sample")->required();
  add_common(iaa);

  std::string annotation;
  auto* timeline = app.add_subcommand("timeline", "export the labeled step timeline");
  timeline->add_option("annotation", annotation, "annotation file")->required();
  timeline->add_option("stream", stream_path, "action stream file")->required();
  add_common(timeline);

  std::vector<std::string> bundle_annotations;
  auto* bundle = app.add_subcommand("bundle", "write a playback bundle for the annotator UI");
  bundle->add_option("session", session_path, "session log")->required();
  bundle->add_option("stream", stream_path, "action stream file")->required();
  bundle->add_option("annotations", bundle_annotations, "annotation files to embed");
  add_common(bundle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    int rc = kOk;
    std::vector<std::string> inputs;
    if (sub == validate) {
      rc = cmd_validate(cfg, files, stream_path);
      inputs = files;
    } else if (sub == segment) {
      rc = cmd_segment(cfg, session_path);
      inputs = {session_path};
    } else if (sub == stats) {
      rc = cmd_stats(cfg, streams, annotations);
      inputs = streams;
      inputs.insert(inputs.end(), annotations.begin(), annotations.end());
    } else if (sub == iaa) {
      rc = cmd_iaa(cfg, iaa_args);
      inputs = iaa_args;
    } else if (sub == timeline) {
      rc = cmd_timeline(cfg, annotation, stream_path);
      inputs = {annotation, stream_path};
    } else if (sub == bundle) {
      rc = cmd_bundle(cfg, session_path, stream_path, bundle_annotations);
      inputs = {session_path, stream_path};
      inputs.insert(inputs.end(), bundle_annotations.begin(), bundle_annotations.end());
    }
    append_log(cfg, name, inputs);
    return rc;
  } catch (const Exit& e) {
    std::cerr << "wtk: " << e.message << '\n';
    return e.code;
  } catch (const wtk::Error& e) {
    std::cerr << "wtk: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "wtk: " << e.what() << '\n';
    return kInputError;
  }
}
