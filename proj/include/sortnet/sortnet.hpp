#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sortnet/comparator.hpp"
#include "sortnet/data.hpp"
#include "sortnet/metrics.hpp"
#include "sortnet/training.hpp"

namespace sortnet {

// Outcome of ranking one query group. miscompared holds the cross-class
// pairs the sort got backwards: every (relevant, non-relevant) pair that was
// actually compared and where the non-relevant document won. Each unordered
// pair of documents is compared at most once by the merge, so the list is
// duplicate free.
struct RankingResult {
  std::vector<std::string> order;  // doc ids, best first
  std::vector<std::pair<std::string, std::string>> miscompared;
};

// Stable bottom-up merge sort driven by a three way preference. The head of
// the left run stays in front unless the comparator strictly prefers the
// right head, so equal ties preserve input order. At most n*ceil(log2 n)
// comparisons.
template <class Cmp>
  requires std::invocable<Cmp&, const Document&, const Document&>
RankingResult sort_with_comparator(const std::vector<Document>& docs, Cmp&& prefer) {
  if (docs.empty())
    throw std::invalid_argument("sort_with_comparator: no documents");
  const std::size_t n = docs.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<std::size_t> buf(n);
  RankingResult result;

  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
      const std::size_t mid = lo + width;
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        const Document& a = docs[idx[i]];
        const Document& b = docs[idx[j]];
        const bool a_first = prefer(a, b) != Preference::prec;
        if (a.label > 0 && b.label == 0 && !a_first)
          result.miscompared.emplace_back(a.doc_id, b.doc_id);
        else if (a.label == 0 && b.label > 0 && a_first)
          result.miscompared.emplace_back(b.doc_id, a.doc_id);
        buf[k++] = a_first ? idx[i++] : idx[j++];
      }
      while (i < mid) buf[k++] = idx[i++];
      while (j < hi) buf[k++] = idx[j++];
      std::copy(buf.begin() + lo, buf.begin() + hi, idx.begin() + lo);
    }
  }

  result.order.reserve(n);
  for (const std::size_t id : idx) result.order.push_back(docs[id].doc_id);
  return result;
}

inline RankingResult sort_with_comparator(const std::vector<Document>& docs,
                                          const WeightSharedComparator& net) {
  return sort_with_comparator(
      docs, [&net](const Document& a, const Document& b) {
        return compare(net, a.features, b.features);
      });
}

// Ground-truth preference read straight off the labels; useful as a
// debugging comparator and as the ideal ranking for metric reports.
inline Preference label_preference(const Document& a, const Document& b) {
  if (a.label > b.label) return Preference::succ;
  if (b.label > a.label) return Preference::prec;
  return Preference::tie;
}

// Relevance ratings of a group's documents in the given ranked order.
inline std::vector<double> ratings_in_order(const QueryGroup& group,
                                            const std::vector<std::string>& order) {
  std::unordered_map<std::string, double> rating;
  for (const auto& doc : group.docs)
    rating.emplace(doc.doc_id, static_cast<double>(doc.label));
  std::vector<double> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    const auto it = rating.find(id);
    if (it == rating.end())
      throw std::invalid_argument("ratings_in_order: unknown doc id " + id);
    out.push_back(it->second);
  }
  return out;
}

using PreferenceFn = std::function<Preference(const Document&, const Document&)>;

struct SortNetConfig {
  int hidden_pairs = 10;
  Activation activation = Activation::logistic;
  int max_iter = 20;
  RankQuality rank_quality{};
  int epochs = 60;
  double learning_rate = 0.1;
  bool shuffle = true;
  std::uint64_t seed = 1;  // drives the net init and every epoch shuffle
};

struct IterationStats {
  int iter = 0;
  std::size_t tp_size = 0;  // accumulated training pairs after this iteration
  std::size_t vp_size = 0;
  double vq_score = 0.0;    // validation ranking quality of this iteration's net
};

struct SortNetResult {
  WeightSharedComparator net;  // the net whose validation score was highest
  double best_score = 0.0;
  std::vector<IterationStats> log;
  std::vector<std::vector<EpochStats>> histories;  // one per retraining pass
};

namespace detail {

// Insertion-ordered pair set, deduplicated by (x_id, y_id).
struct GrowingPairSet {
  std::vector<PairExample> items;
  std::set<std::pair<std::string, std::string>> keys;

  void insert(PairExample p) {
    if (keys.emplace(p.x_id, p.y_id).second) items.push_back(std::move(p));
  }
  bool contains_all(const std::vector<PairExample>& pairs) const {
    for (const auto& p : pairs)
      if (!keys.count({p.x_id, p.y_id})) return false;
    return true;
  }
};

}  // namespace detail

// Incremental training loop. Each iteration ranks every training and
// validation query with the current net, harvests the cross-class pairs the
// sort got backwards into the growing pair sets, scores the validation
// ranking, and retrains the net on everything gathered so far. The loop
// stops early once an iteration discovers nothing new (every harvested pair
// is already known) and always returns the net that scored best, which may
// be the random starting net.
//
// When comparator_override is set the sorts consult it instead of the net;
// the rest of the loop is unchanged. With an oracle override nothing is ever
// miscompared, so the loop stops at iteration 0.
inline SortNetResult run_sortnet(const std::vector<QueryGroup>& train_groups,
                                 const std::vector<QueryGroup>& valid_groups,
                                 const SortNetConfig& cfg,
                                 const PreferenceFn& comparator_override = {}) {
  if (train_groups.empty())
    throw std::invalid_argument("run_sortnet: empty training set");
  if (valid_groups.empty())
    throw std::invalid_argument("run_sortnet: empty validation set");
  if (cfg.max_iter < 1)
    throw std::invalid_argument("run_sortnet: max_iter must be >= 1");
  const int dim = feature_dim(train_groups);
  if (feature_dim(valid_groups) != dim)
    throw std::invalid_argument("run_sortnet: train and validation dims differ");

  std::mt19937_64 seed_stream(cfg.seed);
  WeightSharedComparator net =
      init_random(dim, cfg.hidden_pairs, cfg.activation, seed_stream());

  auto index_group = [](const QueryGroup& g) {
    std::unordered_map<std::string, const Document*> m;
    for (const auto& doc : g.docs) m.emplace(doc.doc_id, &doc);
    return m;
  };
  std::vector<std::unordered_map<std::string, const Document*>> train_index;
  std::vector<std::unordered_map<std::string, const Document*>> valid_index;
  train_index.reserve(train_groups.size());
  valid_index.reserve(valid_groups.size());
  for (const auto& g : train_groups) train_index.push_back(index_group(g));
  for (const auto& g : valid_groups) valid_index.push_back(index_group(g));

  auto harvest = [](const QueryGroup& group,
                    const std::unordered_map<std::string, const Document*>& index,
                    const RankingResult& ranking, std::vector<PairExample>& out) {
    for (const auto& [rel_id, non_id] : ranking.miscompared) {
      PairExample p;
      p.x_id = group.query_id + "/" + rel_id;
      p.y_id = group.query_id + "/" + non_id;
      p.x = index.at(rel_id)->features;
      p.y = index.at(non_id)->features;
      p.target = {1.0, 0.0};
      out.push_back(std::move(p));
    }
  };

  detail::GrowingPairSet tp;
  detail::GrowingPairSet vp;
  SortNetResult result;
  double best = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    auto prefer = [&](const Document& a, const Document& b) {
      return comparator_override ? comparator_override(a, b)
                                 : compare(net, a.features, b.features);
    };

    std::vector<PairExample> tp_new;
    std::vector<PairExample> vp_new;
    for (std::size_t g = 0; g < train_groups.size(); ++g)
      harvest(train_groups[g], train_index[g],
              sort_with_comparator(train_groups[g].docs, prefer), tp_new);

    std::vector<std::vector<double>> ranked;
    ranked.reserve(valid_groups.size());
    for (std::size_t g = 0; g < valid_groups.size(); ++g) {
      const RankingResult r = sort_with_comparator(valid_groups[g].docs, prefer);
      harvest(valid_groups[g], valid_index[g], r, vp_new);
      ranked.push_back(ratings_in_order(valid_groups[g], r.order));
    }
    const double score = rank_quality_score(cfg.rank_quality, ranked);
    if (score > best) {
      best = score;
      result.net = net;
    }

    const bool converged = tp.contains_all(tp_new) && vp.contains_all(vp_new);
    for (auto& p : tp_new) tp.insert(std::move(p));
    for (auto& p : vp_new) vp.insert(std::move(p));
    result.log.push_back({iter, tp.items.size(), vp.items.size(), score});
    if (converged) break;

    if (iter + 1 < cfg.max_iter) {
      TrainConfig tc;
      tc.epochs = cfg.epochs;
      tc.learning_rate = cfg.learning_rate;
      tc.shuffle = cfg.shuffle;
      tc.seed = seed_stream();
      TrainResult trained = train_and_validate(net, tp.items, vp.items, tc);
      net = std::move(trained.net);
      result.histories.push_back(std::move(trained.history));
    }
  }
  result.best_score = best;
  return result;
}

// Number of positions at which two rankings of the same documents disagree.
inline int positional_differences(const std::vector<std::string>& a,
                                  const std::vector<std::string>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("positional_differences: rankings differ in length");
  int changed = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++changed;
  return changed;
}

// Number of document pairs the two rankings order oppositely.
inline long long kendall_tau_distance(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("kendall_tau_distance: rankings differ in length");
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < b.size(); ++i) pos.emplace(b[i], i);
  std::vector<std::size_t> mapped;
  mapped.reserve(a.size());
  for (const auto& id : a) {
    const auto it = pos.find(id);
    if (it == pos.end())
      throw std::invalid_argument("kendall_tau_distance: rankings hold different documents");
    mapped.push_back(it->second);
  }
  long long discordant = 0;
  for (std::size_t i = 0; i < mapped.size(); ++i)
    for (std::size_t j = i + 1; j < mapped.size(); ++j)
      if (mapped[i] > mapped[j]) ++discordant;
  return discordant;
}

struct ShuffleStabilityRow {
  std::string query_id;
  int shuffle_index = 0;  // 1-based
  int changed_positions = 0;
  long long discordant_pairs = 0;
  double kendall_tau = 1.0;  // 1 means the rankings agree on every pair
};

// Re-ranks each group from several shuffled presentation orders and compares
// against the ranking obtained from file order. A comparator that induces a
// total order is immune to shuffling; ties and intransitivities show up here
// as nonzero differences.
inline std::vector<ShuffleStabilityRow> shuffle_stability_report(
    const std::vector<QueryGroup>& groups, const WeightSharedComparator& net,
    int shuffles, std::uint64_t seed) {
  if (shuffles < 1)
    throw std::invalid_argument("shuffle_stability_report: shuffles must be >= 1");
  std::vector<ShuffleStabilityRow> rows;
  std::mt19937_64 rng(seed);
  for (const auto& group : groups) {
    const std::vector<std::string> baseline =
        sort_with_comparator(group.docs, net).order;
    const std::size_t n = group.docs.size();
    for (int s = 1; s <= shuffles; ++s) {
      std::vector<Document> shuffled = group.docs;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const std::vector<std::string> order = sort_with_comparator(shuffled, net).order;
      ShuffleStabilityRow row;
      row.query_id = group.query_id;
      row.shuffle_index = s;
      row.changed_positions = positional_differences(baseline, order);
      row.discordant_pairs = kendall_tau_distance(baseline, order);
      row.kendall_tau =
          n < 2 ? 1.0
                : 1.0 - 4.0 * static_cast<double>(row.discordant_pairs) /
                            (static_cast<double>(n) * static_cast<double>(n - 1));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace sortnet
