#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "wtk/wtk.hpp"

using namespace wtk;

namespace {

const TaxonomySchema& simple() { return builtin_simple_schema(); }

AnnotationDoc doc(std::string annotator, std::vector<AnnotationSpan> spans, std::string session = "s") {
  return {std::move(session), std::move(annotator), "simple-v1", std::move(spans)};
}

AnnotationSpan span(std::size_t a, std::size_t b, std::vector<std::string> labels) { return {a, b, std::move(labels), {}}; }

}  // namespace

TEST(Stats, EmptyStream) {
  ActionStream st;
  st.session_id = "e";
  EXPECT_EQ(sample_stats(st), (SampleStats{"e", 0, 0, 0, 0}));
}

TEST(Stats, SyntheticMatchesRecount) {
  const auto st = segment(load_session(oracle::fixture("synthetic_a.jsonl")));
  const auto j = nlohmann::json::parse(oracle::read_file(oracle::fixture("synthetic_a.expected.json")));
  const auto s = sample_stats(st);
  EXPECT_EQ(s.n_actions, j["totals"]["n_actions"].get<std::size_t>());
  EXPECT_EQ(s.n_disc_edits, j["totals"]["n_disc_edits"].get<std::size_t>());
  EXPECT_EQ(s.words_added, j["totals"]["words_added"].get<std::size_t>());
  EXPECT_EQ(s.words_deleted, j["totals"]["words_deleted"].get<std::size_t>());
  EXPECT_EQ(st.totals, recompute_totals(st.actions));
}

TEST(Stats, FourSampleReport) {
  std::vector<SampleStats> rows;
  for (const char* id : {"sample2", "sample3", "sample4", "synthetic_a"})
    rows.push_back(sample_stats(segment(load_session(oracle::fixture(std::string(id) + ".jsonl")))));
  const auto csv = render_stats_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sample,n_disc_edits,words_added,words_deleted,n_actions");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_NE(csv.find("synthetic_a,3,29,5,12\n"), std::string::npos);

  const auto table = render_stats_table(rows);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 5);
  const auto header = table.substr(0, table.find('\n'));
  EXPECT_LT(header.find("Disc-edits"), header.find("Added words"));
  EXPECT_LT(header.find("Added words"), header.find("Deleted words"));
  EXPECT_LT(header.find("Deleted words"), header.find("Recorded actions"));
}

TEST(Distribution, OneAnnotator) {
  const auto d = label_distribution(
      {doc("a", {span(0, 0, {"Planning", "generation"}), span(1, 1, {"Planning", "generation"}),
                 span(2, 2, {"Planning", "generation"})})},
      simple());
  EXPECT_EQ(d.at("Planning"), 3.0);
  EXPECT_EQ(d.at("generation"), 3.0);
  EXPECT_EQ(d.at("Revision"), 0.0);
}

TEST(Distribution, AveragesAcrossAnnotators) {
  const auto a = doc("a", {span(0, 1, {"Planning", "generation"}), span(2, 2, {"Planning", "generation"})});
  const auto b = doc("b", {span(0, 2, {"Planning", "generation"})});
  const auto d = label_distribution({a, b}, simple());
  EXPECT_EQ(d.at("generation"), 1.5);
  EXPECT_EQ(format_count(d.at("generation")), "1.5");
  // Duplicating every document leaves the means alone.
  EXPECT_EQ(label_distribution({a, b, a, b}, simple()).mean_counts, d.mean_counts);
}

TEST(Distribution, SpansCountLiteralLabels) {
  const auto d = label_distribution({doc("a", {span(0, 3, {"lexical"})})}, simple());
  EXPECT_EQ(d.at("lexical"), 1.0);
  EXPECT_EQ(d.at("Revision"), 0.0);
  const auto slots = label_distribution({doc("a", {span(0, 3, {"lexical"})})}, simple(), DistributionUnit::Slots, 5);
  EXPECT_EQ(slots.at("lexical"), 4.0);
  EXPECT_EQ(slots.at("Revision"), 4.0);
}

TEST(Distribution, Errors) {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code([] { label_distribution({}, simple()); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code([] { label_distribution({doc("a", {}, "s"), doc("b", {}, "t")}, simple()); }),
            ErrorCode::SessionMismatch);
  EXPECT_EQ(code([] {
              auto d = doc("a", {});
              d.schema_id = "other";
              label_distribution({d}, simple());
            }),
            ErrorCode::SchemaMismatch);
  EXPECT_EQ(code([] { label_distribution({doc("a", {})}, simple(), DistributionUnit::Slots); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code([] { label_distribution({doc("a", {})}, simple()).at("nope"); }), ErrorCode::UnknownLabel);
}

TEST(Distribution, Rendering) {
  const auto d = label_distribution({doc("a", {span(0, 0, {"Planning", "generation"})}),
                                     doc("b", {span(0, 0, {"Planning", "organization"})})},
                                    simple());
  const auto csv = render_distribution_csv({d}, simple());
  EXPECT_NE(csv.find("generation,0.5\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("Planning,1\n"), std::string::npos) << csv;
  const auto table = render_distribution_table({d}, simple());
  EXPECT_EQ(table.rfind("# label counts per sample: unit=spans", 0), 0u);
  EXPECT_NE(table.find("  generation"), std::string::npos);
  EXPECT_TRUE(render_distribution_table({}, simple()).empty());
  EXPECT_EQ(parse_distribution_unit("slots"), DistributionUnit::Slots);
  EXPECT_FALSE(parse_distribution_unit("rows").has_value());
}
