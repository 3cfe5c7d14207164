#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include <sortnet/sortnet.hpp>
#include <sortnet/synthetic.hpp>

using namespace sortnet;

namespace {

std::vector<Document> docs_with_labels(const std::vector<int>& labels) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Document doc;
    doc.doc_id = "d" + std::to_string(i);
    doc.label = labels[i];
    doc.features = {static_cast<double>(i)};
    docs.push_back(std::move(doc));
  }
  return docs;
}

constexpr auto all_tie = [](const Document&, const Document&) { return Preference::tie; };

}  // namespace

TEST_CASE("an all-tie comparator keeps the input order") {
  for (const int n : {1, 2, 4, 7, 13}) {
    const auto docs = docs_with_labels(std::vector<int>(n, 0));
    const RankingResult result = sort_with_comparator(docs, all_tie);
    REQUIRE(result.order.size() == docs.size());
    for (int i = 0; i < n; ++i) CHECK(result.order[i] == "d" + std::to_string(i));
  }
}

TEST_CASE("the label oracle ranks relevant documents first without miscompares") {
  const auto docs = docs_with_labels({0, 1, 0, 1, 1, 0, 0, 1});
  const RankingResult result = sort_with_comparator(docs, label_preference);
  CHECK(result.miscompared.empty());
  // All relevant first, each class in input order (stability).
  const std::vector<std::string> want{"d1", "d3", "d4", "d7", "d0", "d2", "d5", "d6"};
  CHECK(result.order == want);
}

TEST_CASE("an inverted oracle miscompares the pair it flips") {
  const auto docs = docs_with_labels({1, 0});
  const auto inverted = [](const Document& a, const Document& b) {
    if (a.label < b.label) return Preference::succ;
    if (b.label < a.label) return Preference::prec;
    return Preference::tie;
  };
  const RankingResult result = sort_with_comparator(docs, inverted);
  CHECK(result.order == std::vector<std::string>{"d1", "d0"});
  REQUIRE(result.miscompared.size() == 1);
  CHECK(result.miscompared[0] == std::pair<std::string, std::string>{"d0", "d1"});
}

TEST_CASE("hand-traced four document merge under ties") {
  // Input labels [NR, R, R, NR]. The merge compares (d0,d1), (d2,d3),
  // (d0,d2), (d1,d2); with every verdict a tie the left element always wins,
  // so the two cross-class comparisons that put d0 ahead of a relevant
  // document are harvested, oriented relevant-first.
  const auto docs = docs_with_labels({0, 1, 1, 0});
  const RankingResult result = sort_with_comparator(docs, all_tie);
  CHECK(result.order == std::vector<std::string>{"d0", "d1", "d2", "d3"});
  REQUIRE(result.miscompared.size() == 2);
  CHECK(result.miscompared[0] == std::pair<std::string, std::string>{"d1", "d0"});
  CHECK(result.miscompared[1] == std::pair<std::string, std::string>{"d2", "d0"});
}

TEST_CASE("each unordered pair is compared at most once, n log n times total") {
  for (const int n : {2, 3, 8, 100, 257}) {
    const auto docs = docs_with_labels(std::vector<int>(n, 0));
    std::set<std::pair<std::string, std::string>> seen;
    long long comparisons = 0;
    const auto counting = [&](const Document& a, const Document& b) {
      ++comparisons;
      auto key = std::minmax(a.doc_id, b.doc_id);
      REQUIRE(seen.emplace(key.first, key.second).second);
      return Preference::tie;
    };
    sort_with_comparator(docs, counting);
    const double budget = n * std::ceil(std::log2(std::max(2, n)));
    CHECK(static_cast<double>(comparisons) <= budget);
  }
}

TEST_CASE("sorting rejects an empty document set") {
  CHECK_THROWS_AS(sort_with_comparator({}, all_tie), std::invalid_argument);
}

TEST_CASE("ratings_in_order maps ranked ids back to label ratings") {
  QueryGroup group;
  group.query_id = "q";
  group.docs = docs_with_labels({2, 0, 1});
  CHECK(ratings_in_order(group, {"d2", "d0", "d1"}) == std::vector<double>{1, 2, 0});
  CHECK_THROWS_AS(ratings_in_order(group, {"nope"}), std::invalid_argument);
}

TEST_CASE("kendall tau distance and positional differences") {
  const std::vector<std::string> base{"a", "b", "c", "d"};
  CHECK(kendall_tau_distance(base, base) == 0);
  CHECK(positional_differences(base, base) == 0);
  const std::vector<std::string> reversed{"d", "c", "b", "a"};
  CHECK(kendall_tau_distance(base, reversed) == 6);
  CHECK(positional_differences(base, reversed) == 4);
  const std::vector<std::string> swapped{"b", "a", "c", "d"};
  CHECK(kendall_tau_distance(base, swapped) == 1);
  CHECK(positional_differences(base, swapped) == 2);
  CHECK_THROWS_AS(kendall_tau_distance(base, {"a", "b"}), std::invalid_argument);
  CHECK_THROWS_AS(kendall_tau_distance(base, {"a", "b", "c", "x"}),
                  std::invalid_argument);
}

TEST_CASE("run_sortnet with the label oracle stops at iteration zero") {
  SyntheticConfig synth;
  synth.queries = 2;
  synth.docs_per_query = 40;
  synth.dim = 3;
  synth.relevant_fraction = 0.2;
  synth.seed = 12;
  const auto train = make_synthetic_groups(synth);
  synth.seed = 13;
  const auto valid = make_synthetic_groups(synth);

  SortNetConfig cfg;
  cfg.hidden_pairs = 2;
  cfg.max_iter = 8;
  cfg.epochs = 2;
  const SortNetResult result = run_sortnet(train, valid, cfg, label_preference);

  REQUIRE(result.log.size() == 1);
  CHECK(result.log[0].iter == 0);
  CHECK(result.log[0].tp_size == 0);
  CHECK(result.log[0].vp_size == 0);
  CHECK(result.histories.empty());
  // A perfect oracle ranks every relevant document on top.
  CHECK(result.log[0].vq_score == 1.0);
  CHECK(result.best_score == 1.0);
}

TEST_CASE("run_sortnet grows its pair sets monotonically and returns the best net") {
  SyntheticConfig synth;
  synth.queries = 2;
  synth.docs_per_query = 50;
  synth.dim = 2;
  synth.relevant_fraction = 0.2;
  synth.seed = 14;
  const auto train = normalize_groups(make_synthetic_groups(synth));
  synth.seed = 15;
  const auto valid = normalize_groups(make_synthetic_groups(synth));

  SortNetConfig cfg;
  cfg.hidden_pairs = 3;
  cfg.max_iter = 5;
  cfg.epochs = 8;
  cfg.learning_rate = 0.2;
  cfg.seed = 2;
  const SortNetResult result = run_sortnet(train, valid, cfg);

  REQUIRE(!result.log.empty());
  REQUIRE(result.log.size() <= 5);
  for (std::size_t i = 1; i < result.log.size(); ++i) {
    CHECK(result.log[i].tp_size >= result.log[i - 1].tp_size);
    CHECK(result.log[i].vp_size >= result.log[i - 1].vp_size);
    CHECK(result.log[i].iter == static_cast<int>(i));
  }

  double max_score = -1.0;
  for (const auto& row : result.log) max_score = std::max(max_score, row.vq_score);
  CHECK(result.best_score == max_score);

  // Re-ranking the validation set with the returned net reproduces the
  // best logged score exactly.
  std::vector<std::vector<double>> ranked;
  for (const auto& group : valid)
    ranked.push_back(
        ratings_in_order(group, sort_with_comparator(group.docs, result.net).order));
  CHECK(rank_quality_score(cfg.rank_quality, ranked) == result.best_score);
}

TEST_CASE("run_sortnet validates its inputs") {
  SyntheticConfig synth;
  synth.queries = 1;
  synth.docs_per_query = 10;
  synth.dim = 2;
  synth.relevant_fraction = 0.2;
  const auto groups = make_synthetic_groups(synth);
  SortNetConfig cfg;
  CHECK_THROWS_AS(run_sortnet({}, groups, cfg), std::invalid_argument);
  CHECK_THROWS_AS(run_sortnet(groups, {}, cfg), std::invalid_argument);
  cfg.max_iter = 0;
  CHECK_THROWS_AS(run_sortnet(groups, groups, cfg), std::invalid_argument);
}

TEST_CASE("a comparator with a total order is immune to input shuffles") {
  SyntheticConfig synth;
  synth.queries = 2;
  synth.docs_per_query = 30;
  synth.dim = 1;
  synth.relevant_fraction = 0.2;
  synth.seed = 18;
  const auto groups = make_synthetic_groups(synth);

  WeightSharedComparator net;
  net.dim = 1;
  net.hidden_pairs = 1;
  net.activation = Activation::logistic;
  net.v_x = {4.0};
  net.v_y = {-4.0};
  net.b_h = {0.0};
  net.w_succ = {1.0};
  net.w_prec = {-1.0};
  net.b_out = 0.0;

  const auto rows = shuffle_stability_report(groups, net, 3, 77);
  REQUIRE(rows.size() == groups.size() * 3);
  for (const auto& row : rows) {
    CHECK(row.changed_positions == 0);
    CHECK(row.discordant_pairs == 0);
    CHECK(row.kendall_tau == 1.0);
  }
}
