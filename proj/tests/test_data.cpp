#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include <sortnet/comparator.hpp>
#include <sortnet/data.hpp>

using namespace sortnet;

namespace {

std::vector<QueryGroup> parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_letor(in);
}

}  // namespace

TEST_CASE("parses labels, query ids, features, and doc ids") {
  const auto groups = parse_text(
      "2 qid:10 1:0.5 2:-1 3:3.5 #docid = GX001-01 inc = 1\n"
      "0 qid:10 1:0 2:0.25 3:1\n"
      "1 qid:7 1:1 2:2 3:3 #docid = GX002-02\n");
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].query_id == "10");
  CHECK(groups[1].query_id == "7");
  REQUIRE(groups[0].docs.size() == 2);
  REQUIRE(groups[1].docs.size() == 1);

  const Document& first = groups[0].docs[0];
  CHECK(first.label == 2);
  CHECK(first.doc_id == "GX001-01");
  CHECK(first.features == std::vector<double>{0.5, -1.0, 3.5});

  // No docid comment: one is synthesized from the query and position.
  CHECK(groups[0].docs[1].doc_id == "q10.2");
}

TEST_CASE("groups keep first-appearance order even when queries interleave") {
  const auto groups = parse_text(
      "0 qid:b 1:1\n"
      "0 qid:a 1:2\n"
      "1 qid:b 1:3\n");
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].query_id == "b");
  CHECK(groups[1].query_id == "a");
  REQUIRE(groups[0].docs.size() == 2);
  CHECK(groups[0].docs[1].features == std::vector<double>{3.0});
}

TEST_CASE("parse errors carry line numbers") {
  auto message_of = [](const std::string& text) {
    try {
      parse_text(text);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK_THROWS_AS(parse_text("x qid:1 1:1\n"), ParseError);
  CHECK_THROWS_AS(parse_text("-1 qid:1 1:1\n"), ParseError);
  CHECK_THROWS_AS(parse_text("1 1:1\n"), ParseError);
  CHECK_THROWS_AS(parse_text("1 qid:1 2:1\n"), ParseError);
  CHECK_THROWS_AS(parse_text("1 qid:1 1:1 3:2\n"), ParseError);
  CHECK_THROWS_AS(parse_text("1 qid:1 1:one\n"), ParseError);
  CHECK_THROWS_AS(parse_text("1 qid:1\n"), ParseError);
  CHECK_THROWS_AS(parse_text(""), ParseError);
  CHECK_THROWS_AS(parse_text("0 qid:1 1:1\n0 qid:1 1:1 2:2\n"), ParseError);

  CHECK(message_of("0 qid:1 1:1\n0 qid:1 1:1 2:2\n").find("line 2") != std::string::npos);
  CHECK(message_of("x qid:1 1:1\n").find("line 1") != std::string::npos);
}

TEST_CASE("serialization round-trips exactly") {
  const auto groups = parse_text(
      "1 qid:5 1:0.1234567890123456 2:-7e-13 3:42 #docid = a1\n"
      "0 qid:5 1:3.14159 2:0 3:-0.0001 #docid = a2\n"
      "2 qid:6 1:1e300 2:5e-324 3:0 #docid = b1\n");
  std::ostringstream out;
  serialize_letor(out, groups);
  std::istringstream in(out.str());
  const auto again = parse_letor(in);
  REQUIRE(again.size() == groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    REQUIRE(again[g].query_id == groups[g].query_id);
    REQUIRE(again[g].docs.size() == groups[g].docs.size());
    for (std::size_t i = 0; i < groups[g].docs.size(); ++i) {
      CHECK(again[g].docs[i].doc_id == groups[g].docs[i].doc_id);
      CHECK(again[g].docs[i].label == groups[g].docs[i].label);
      CHECK(again[g].docs[i].features == groups[g].docs[i].features);
    }
  }

  // A second serialization must produce identical bytes.
  std::ostringstream out2;
  serialize_letor(out2, again);
  CHECK(out.str() == out2.str());
}

TEST_CASE("per-query normalization centers and scales by the raw magnitude") {
  QueryGroup group;
  group.query_id = "q";
  for (const double v : {1.0, 2.0, 3.0}) {
    Document doc;
    doc.query_id = "q";
    doc.doc_id = "d" + std::to_string(static_cast<int>(v));
    doc.features = {v, 0.0};
    group.docs.push_back(doc);
  }
  const QueryGroup normed = normalize_group(group);
  CHECK_THAT(normed.docs[0].features[0], Catch::Matchers::WithinAbs(-1.0 / 3.0, 1e-15));
  CHECK(normed.docs[1].features[0] == 0.0);
  CHECK_THAT(normed.docs[2].features[0], Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-15));
  // The all-zero feature stays exactly zero instead of dividing by zero.
  for (const auto& doc : normed.docs) CHECK(doc.features[1] == 0.0);
}

TEST_CASE("normalized features have zero mean per feature per group") {
  std::mt19937_64 rng(55);
  QueryGroup group;
  group.query_id = "g";
  for (int i = 0; i < 40; ++i) {
    Document doc;
    doc.doc_id = "d" + std::to_string(i);
    for (int k = 0; k < 6; ++k)
      doc.features.push_back(detail::uniform(rng, -100.0, 100.0));
    group.docs.push_back(doc);
  }
  const QueryGroup normed = normalize_group(group);
  for (int k = 0; k < 6; ++k) {
    double sum = 0.0;
    double max_abs = 0.0;
    for (const auto& doc : normed.docs) {
      sum += doc.features[k];
      max_abs = std::max(max_abs, std::fabs(doc.features[k]));
    }
    CHECK(std::fabs(sum / 40.0) < 1e-12);
    CHECK(max_abs <= 2.0);  // centered values over max |raw| cannot exceed 2
  }
}

TEST_CASE("round robin assignment cycles the folds") {
  const auto assignment = round_robin_assignment(7, std::nullopt);
  CHECK(assignment == std::vector<int>{0, 1, 2, 3, 4, 0, 1});
  CHECK_THROWS_AS(round_robin_assignment(4, std::nullopt), std::invalid_argument);
}

TEST_CASE("seeded round robin keeps the folds balanced") {
  const auto assignment = round_robin_assignment(23, 99);
  std::array<int, 5> counts{};
  for (const int a : assignment) {
    REQUIRE((a >= 0 && a <= 4));
    ++counts[a];
  }
  for (const int c : counts) CHECK((c == 4 || c == 5));
  // Same seed, same assignment; different seed, different order.
  CHECK(round_robin_assignment(23, 99) == assignment);
  CHECK(round_robin_assignment(23, 100) != assignment);
}

TEST_CASE("assemble_folds rotates test, validation, and train partitions") {
  std::vector<QueryGroup> groups;
  for (int i = 0; i < 5; ++i) groups.push_back(QueryGroup{"q" + std::to_string(i), {}});
  const std::vector<int> assignment{0, 1, 2, 3, 4};

  const FoldSplit f0 = assemble_folds(groups, assignment, 0);
  REQUIRE(f0.test.size() == 1);
  REQUIRE(f0.valid.size() == 1);
  REQUIRE(f0.train.size() == 3);
  CHECK(f0.test[0].query_id == "q0");
  CHECK(f0.valid[0].query_id == "q1");
  CHECK(f0.train[0].query_id == "q2");

  const FoldSplit f4 = assemble_folds(groups, assignment, 4);
  CHECK(f4.test[0].query_id == "q4");
  CHECK(f4.valid[0].query_id == "q0");

  CHECK_THROWS_AS(assemble_folds(groups, {0, 1}, 0), std::invalid_argument);
  CHECK_THROWS_AS(assemble_folds(groups, assignment, 5), std::invalid_argument);
  CHECK_THROWS_AS(assemble_folds(groups, {0, 1, 2, 3, 7}, 0), std::invalid_argument);
}
