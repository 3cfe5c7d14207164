#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sortnet {

// Rating lists are orderings of non-negative relevance ratings, most highly
// ranked document first. A document counts as relevant when its rating is
// strictly positive; graded ratings only matter to ndcg_at.

inline double precision_at(const std::vector<double>& ratings, int n) {
  if (n < 1 || static_cast<std::size_t>(n) > ratings.size())
    throw std::invalid_argument("precision_at: n out of range");
  int hits = 0;
  for (int j = 0; j < n; ++j)
    if (ratings[j] > 0.0) ++hits;
  return static_cast<double>(hits) / n;
}

// Mean of precision_at over the relevant positions. A list without a single
// relevant document has no defined value and is reported as empty.
inline std::optional<double> average_precision(const std::vector<double>& ratings) {
  int total = 0;
  for (double r : ratings)
    if (r > 0.0) ++total;
  if (total == 0) return std::nullopt;
  double sum = 0.0;
  int hits = 0;
  for (std::size_t j = 0; j < ratings.size(); ++j) {
    if (ratings[j] > 0.0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(j + 1);
    }
  }
  return sum / total;
}

// Mean average precision over the queries that have at least one relevant
// document. Queries without one are excluded from the mean entirely.
inline double mean_average_precision(const std::vector<std::vector<double>>& per_query) {
  double sum = 0.0;
  int scorable = 0;
  for (const auto& ratings : per_query) {
    if (const auto ap = average_precision(ratings)) {
      sum += *ap;
      ++scorable;
    }
  }
  if (scorable == 0)
    throw std::invalid_argument("mean_average_precision: no query has a relevant document");
  return sum / scorable;
}

namespace detail {

// Discounted cumulative gain of the first n entries, natural log discount.
inline double dcg_at(const std::vector<double>& ratings, int n) {
  double dcg = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double gain = std::exp2(ratings[j - 1]) - 1.0;
    dcg += gain / std::log(1.0 + j);
  }
  return dcg;
}

}  // namespace detail

// Normalized discounted cumulative gain at cutoff n: the DCG of the list
// divided by the DCG of the best possible ordering of the same ratings. When
// even the ideal ordering has zero gain the score is 0 by convention.
inline double ndcg_at(const std::vector<double>& ratings, int n) {
  if (n < 1 || static_cast<std::size_t>(n) > ratings.size())
    throw std::invalid_argument("ndcg_at: n out of range");
  for (double r : ratings)
    if (!(r >= 0.0)) throw std::invalid_argument("ndcg_at: ratings must be non-negative");
  std::vector<double> ideal(ratings);
  std::sort(ideal.begin(), ideal.end(), std::greater<double>());
  const double best = detail::dcg_at(ideal, n);
  if (best == 0.0) return 0.0;
  return detail::dcg_at(ratings, n) / best;
}

// Reporting variants that accept cutoffs beyond the list length: precision
// keeps n in the denominator as if the list were padded with irrelevant
// documents, ndcg simply stops at the end of the list.
inline double precision_at_padded(const std::vector<double>& ratings, int n) {
  if (n < 1) throw std::invalid_argument("precision_at_padded: n out of range");
  const int m = std::min<int>(n, static_cast<int>(ratings.size()));
  int hits = 0;
  for (int j = 0; j < m; ++j)
    if (ratings[j] > 0.0) ++hits;
  return static_cast<double>(hits) / n;
}

inline double ndcg_at_padded(const std::vector<double>& ratings, int n) {
  if (n < 1) throw std::invalid_argument("ndcg_at_padded: n out of range");
  return ndcg_at(ratings, std::min<int>(n, static_cast<int>(ratings.size())));
}

// Validation quality knob: which single number summarizes a set of ranked
// queries. Cutoff metrics are macro-averaged over queries.
struct RankQuality {
  enum class Kind { map, p_at, ndcg_at };
  Kind kind = Kind::map;
  int cutoff = 10;
};

// Accepts "map", "p@K", or "ndcg@K" with K a positive integer.
inline RankQuality parse_rank_quality(const std::string& text) {
  if (text == "map") return {RankQuality::Kind::map, 0};
  auto parse_cutoff = [&](std::size_t at) {
    const std::string digits = text.substr(at);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("rank quality cutoff must be a positive integer: " + text);
    const int k = std::stoi(digits);
    if (k < 1) throw std::invalid_argument("rank quality cutoff must be >= 1: " + text);
    return k;
  };
  if (text.rfind("p@", 0) == 0) return {RankQuality::Kind::p_at, parse_cutoff(2)};
  if (text.rfind("ndcg@", 0) == 0) return {RankQuality::Kind::ndcg_at, parse_cutoff(5)};
  throw std::invalid_argument("unknown rank quality (expected map, p@K, or ndcg@K): " + text);
}

inline std::string to_string(const RankQuality& rq) {
  switch (rq.kind) {
    case RankQuality::Kind::map: return "map";
    case RankQuality::Kind::p_at: return "p@" + std::to_string(rq.cutoff);
    default: return "ndcg@" + std::to_string(rq.cutoff);
  }
}

inline double rank_quality_score(const RankQuality& rq,
                                 const std::vector<std::vector<double>>& per_query) {
  if (per_query.empty())
    throw std::invalid_argument("rank_quality_score: no queries");
  switch (rq.kind) {
    case RankQuality::Kind::map:
      return mean_average_precision(per_query);
    case RankQuality::Kind::p_at: {
      double sum = 0.0;
      for (const auto& ratings : per_query) sum += precision_at_padded(ratings, rq.cutoff);
      return sum / per_query.size();
    }
    default: {
      double sum = 0.0;
      for (const auto& ratings : per_query) sum += ndcg_at_padded(ratings, rq.cutoff);
      return sum / per_query.size();
    }
  }
}

}  // namespace sortnet
