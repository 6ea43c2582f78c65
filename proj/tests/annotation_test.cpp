#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "wtk/annotation.hpp"

using namespace wtk;

namespace {

const TaxonomySchema& simple() { return builtin_simple_schema(); }

AnnotationDoc doc_with(std::vector<AnnotationSpan> spans, std::string annotator = "a") {
  return {"s", std::move(annotator), "simple-v1", std::move(spans)};
}

LabelSet bits(std::initializer_list<std::string_view> names) { return encode(simple(), names); }

ErrorCode project_error(const AnnotationDoc& d, std::size_t n) {
  try {
    project(d, n, simple());
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "projection succeeded";
  return ErrorCode::Io;
}

}  // namespace

TEST(Projection, NoSpans) {
  const auto m = project(doc_with({}), 5, simple());
  ASSERT_EQ(m.n_slots(), 5u);
  for (const auto& r : m.rows) EXPECT_FALSE(r.any());
  EXPECT_EQ(m.schema_id, "simple-v1");
}

TEST(Projection, OneSpanCoversAll) {
  const auto m = project(doc_with({{0, 4, {"Planning", "generation"}, {}}}), 5, simple());
  for (const auto& r : m.rows) EXPECT_EQ(r.ones(), (std::vector<std::size_t>{0, 1}));
}

TEST(Projection, OverlapIsUnion) {
  const auto m = project(doc_with({{0, 2, {"Planning", "generation"}, {}}, {2, 4, {"Planning", "organization"}, {}}}),
                         5, simple());
  EXPECT_EQ(m.rows[2].ones(), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(m.rows[1].ones(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(m.rows[4].ones(), (std::vector<std::size_t>{0, 2}));
}

TEST(Projection, ParentsAreImplied) {
  const auto m = project(doc_with({{1, 1, {"lexical"}, {}}}), 3, simple());
  EXPECT_EQ(m.rows[1], bits({"Revision", "lexical"}));
}

TEST(Projection, Errors) {
  EXPECT_EQ(project_error(doc_with({{0, 5, {"Planning"}, {}}}), 5), ErrorCode::SpanOutOfRange);
  EXPECT_EQ(project_error(doc_with({{3, 2, {"Planning"}, {}}}), 5), ErrorCode::SpanOutOfRange);
  EXPECT_EQ(project_error(doc_with({{0, 2, {"None"}, {}}, {2, 3, {"Planning"}, {}}}), 5),
            ErrorCode::InvalidLabelCombination);
  EXPECT_EQ(project_error(doc_with({{0, 0, {"Drafting"}, {}}}), 5), ErrorCode::UnknownLabel);
  auto other = doc_with({});
  other.schema_id = "extended-v1";
  EXPECT_EQ(project_error(other, 5), ErrorCode::SchemaMismatch);

  ActionStream st;
  st.session_id = "elsewhere";
  try {
    project(doc_with({}), st, simple());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SessionMismatch);
  }
}

TEST(Projection, MonotoneAndOrderIndependent) {
  std::mt19937_64 rng(21);
  const std::vector<std::vector<std::string>> choices = {
      {"Planning", "generation"}, {"Planning", "organization"}, {"Implementation", "lexical_chaining"},
      {"Revision", "syntactic"},  {"lexical"},                   {"structural"},
      {"Implementation"}};
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<AnnotationSpan> spans;
    const std::size_t n_spans = rng() % 6;
    for (std::size_t i = 0; i < n_spans; ++i) {
      std::size_t a = rng() % n, b = rng() % n;
      if (a > b) std::swap(a, b);
      spans.push_back({a, b, choices[rng() % choices.size()], {}});
    }
    SlotMatrix prev = project(doc_with({}), n, simple());
    std::vector<AnnotationSpan> growing;
    for (const auto& sp : spans) {
      growing.push_back(sp);
      const auto cur = project(doc_with(growing), n, simple());
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(prev.rows[i] - cur.rows[i], LabelSet(10));
      prev = cur;
    }
    auto shuffled = spans;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(project(doc_with(shuffled), n, simple()), project(doc_with(spans), n, simple()));
  }
}

TEST(DiffAnnotations, Examples) {
  const auto a = project(doc_with({{0, 2, {"Planning", "generation"}, {}}}), 3, simple());
  EXPECT_TRUE(diff_annotations(a, a, simple()).empty());

  const auto b = project(doc_with({{0, 2, {"Implementation", "lexical_chaining"}, {}}}), 3, simple());
  const auto d = diff_annotations(a, b, simple());
  ASSERT_EQ(d.size(), 3u);
  for (const auto& x : d) {
    EXPECT_EQ(x.only_a, (std::vector<std::string>{"Planning", "generation"}));
    EXPECT_EQ(x.only_b, (std::vector<std::string>{"Implementation", "lexical_chaining"}));
  }

  EXPECT_THROW(diff_annotations(a, project(doc_with({}), 4, simple()), simple()), Error);
}

TEST(DiffAnnotations, FixturePairDiffersAtSlotSeven) {
  const auto stream_n = 12u;
  const auto a = project(load_annotation(oracle::fixture("synthetic_a.ann1.json")), stream_n, simple());
  const auto b = project(load_annotation(oracle::fixture("synthetic_a.ann2.json")), stream_n, simple());
  const auto d = diff_annotations(a, b, simple());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].slot, 7u);
}

TEST(AnnotationFile, RoundTrip) {
  auto d = doc_with({{0, 1, {"Planning"}, std::string("first pass")}, {2, 2, {"None"}, {}}});
  const auto back = annotation_from_json(nlohmann::json::parse(annotation_to_json(d).dump()));
  EXPECT_EQ(back, d);
  const auto f = load_annotation(oracle::fixture("synthetic_a.ann1.json"));
  EXPECT_EQ(f.annotator_id, "ann1");
  EXPECT_EQ(annotation_from_json(nlohmann::json::parse(annotation_to_json(f).dump())), f);
}

TEST(AnnotationFile, Malformed) {
  try {
    annotation_from_json(nlohmann::json::parse(R"({"session_id":"s","schema_id":"simple-v1","spans":[]})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedRecord);
  }
  EXPECT_THROW(annotation_from_json(nlohmann::json::parse(
                   R"({"session_id":"s","annotator_id":"a","schema_id":"x","spans":[{"start":-1,"end":0,"labels":[]}]})")),
               Error);
}

TEST(AnnotationFile, Validate) {
  EXPECT_TRUE(validate_annotation(load_annotation(oracle::fixture("synthetic_a.ann1.json")), simple(), 12).empty());
  const auto bad = doc_with({{2, 1, {"Planning"}, {}}, {0, 0, {"Drafting"}, {}}, {0, 9, {"None", "Revision"}, {}}});
  const auto v = validate_annotation(bad, simple(), 5);
  std::vector<std::string> r;
  for (const auto& x : v) r.push_back(x.rule);
  EXPECT_EQ(r, (std::vector<std::string>{"SpanReversed", "UnknownLabel", "SpanOutOfRange", "NoneNotExclusive"}));

  const auto clash = doc_with({{0, 1, {"None"}, {}}, {1, 2, {"Planning"}, {}}});
  EXPECT_TRUE(validate_annotation(clash, simple()).empty());
  const auto with_stream = validate_annotation(clash, simple(), 3);
  ASSERT_EQ(with_stream.size(), 1u);
  EXPECT_EQ(with_stream[0].rule, "InvalidLabelCombination");
}
