#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sortnet/comparator.hpp"
#include "sortnet/data.hpp"

namespace sortnet {

// One ordered training pair: the target says which side should come first,
// [1, 0] for x and [0, 1] for y. Ids are kept so pair sets can be grown
// without duplicates.
struct PairExample {
  std::string x_id;
  std::string y_id;
  std::vector<double> x;
  std::vector<double> y;
  std::array<double, 2> target{1.0, 0.0};
};

inline std::string qualified_doc_id(const QueryGroup& group, const Document& doc) {
  return group.query_id + "/" + doc.doc_id;
}

// Every ordered pair of one relevant and one non-relevant document in the
// group, both directions, so 2 * |R| * |NR| pairs. Ids are qualified by the
// query id and duplicates by (x_id, y_id) are dropped.
inline std::vector<PairExample> build_pairs(const QueryGroup& group) {
  std::vector<const Document*> rel;
  std::vector<const Document*> nonrel;
  for (const auto& doc : group.docs)
    (doc.label > 0 ? rel : nonrel).push_back(&doc);
  std::vector<PairExample> pairs;
  pairs.reserve(2 * rel.size() * nonrel.size());
  std::set<std::pair<std::string, std::string>> seen;
  for (const Document* r : rel) {
    for (const Document* n : nonrel) {
      const std::string rid = qualified_doc_id(group, *r);
      const std::string nid = qualified_doc_id(group, *n);
      if (seen.emplace(rid, nid).second)
        pairs.push_back({rid, nid, r->features, n->features, {1.0, 0.0}});
      if (seen.emplace(nid, rid).second)
        pairs.push_back({nid, rid, n->features, r->features, {0.0, 1.0}});
    }
  }
  return pairs;
}

inline std::vector<PairExample> build_pairs(const std::vector<QueryGroup>& groups) {
  std::vector<PairExample> pairs;
  for (const auto& group : groups) {
    auto from_group = build_pairs(group);
    pairs.insert(pairs.end(), std::make_move_iterator(from_group.begin()),
                 std::make_move_iterator(from_group.end()));
  }
  return pairs;
}

// Fraction of pairs on which compare() picks the side the target prefers.
// A tie verdict never matches either target.
inline double pairwise_accuracy(const WeightSharedComparator& net,
                                const std::vector<PairExample>& pairs) {
  if (pairs.empty())
    throw std::invalid_argument("pairwise_accuracy: empty pair set");
  std::size_t correct = 0;
  for (const auto& p : pairs) {
    const Preference verdict = compare(net, p.x, p.y);
    const Preference wanted = p.target[0] == 1.0 ? Preference::succ : Preference::prec;
    if (verdict == wanted) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

struct TrainConfig {
  int epochs = 60;
  double learning_rate = 0.1;
  bool shuffle = true;       // reshuffle the training pairs every epoch
  std::uint64_t seed = 1;    // drives the shuffle only
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double tp_mean_loss = 0.0;
  double vp_accuracy = 0.0;  // 0.0 when there are no validation pairs
};

struct TrainResult {
  WeightSharedComparator net;
  std::vector<EpochStats> history;
};

// Stochastic gradient descent over the training pairs, one update per pair.
// After every epoch the net is scored on the validation pairs and the
// snapshot with the highest accuracy wins, earliest epoch on ties. Without
// validation pairs the final epoch's net is returned.
inline TrainResult train_and_validate(const WeightSharedComparator& start,
                                      const std::vector<PairExample>& train_pairs,
                                      const std::vector<PairExample>& valid_pairs,
                                      const TrainConfig& cfg) {
  if (train_pairs.empty())
    throw std::invalid_argument("train_and_validate: no training pairs");
  if (cfg.epochs < 1)
    throw std::invalid_argument("train_and_validate: epochs must be >= 1");
  for (const auto& p : train_pairs)
    if (static_cast<int>(p.x.size()) != start.dim || static_cast<int>(p.y.size()) != start.dim)
      throw std::invalid_argument("train_and_validate: pair dimension does not match the net");

  WeightSharedComparator net = start;
  WeightSharedComparator best = net;
  double best_accuracy = -1.0;
  std::vector<EpochStats> history;
  history.reserve(cfg.epochs);

  std::vector<std::size_t> order(train_pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (const std::size_t idx : order) {
      const PairExample& p = train_pairs[idx];
      const ForwardTrace trace = forward(net, p.x, p.y);
      const double e = loss(trace, p.target);
      if (!std::isfinite(e))
        throw NumericFault("train_and_validate: non-finite loss at epoch " +
                           std::to_string(epoch));
      loss_sum += e;
      apply_update(net, backprop(net, p.x, p.y, p.target, trace), cfg.learning_rate);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.tp_mean_loss = loss_sum / static_cast<double>(train_pairs.size());
    if (!valid_pairs.empty()) {
      stats.vp_accuracy = pairwise_accuracy(net, valid_pairs);
      if (stats.vp_accuracy > best_accuracy) {
        best_accuracy = stats.vp_accuracy;
        best = net;
      }
    }
    history.push_back(stats);
  }
  return {valid_pairs.empty() ? std::move(net) : std::move(best), std::move(history)};
}

}  // namespace sortnet
