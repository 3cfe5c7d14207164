#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sortnet/comparator.hpp"
#include "sortnet/data.hpp"

namespace sortnet {

// Deterministic labeled ranking data: features are uniform in [-1, 1] and a
// fixed linear utility over them decides relevance, the top fraction of each
// query by utility getting label 1. A comparator can therefore order these
// documents perfectly in principle, which makes the data a useful
// convergence fixture.
struct SyntheticConfig {
  int queries = 3;
  int docs_per_query = 200;
  int dim = 5;
  double relevant_fraction = 0.10;
  std::uint64_t seed = 1;
};

inline double synthetic_utility(const std::vector<double>& features) {
  static constexpr double pattern[] = {0.8, -0.6, 0.4, 0.2, -0.3};
  static constexpr std::size_t pattern_len = sizeof(pattern) / sizeof(pattern[0]);
  double u = 0.0;
  for (std::size_t k = 0; k < features.size(); ++k)
    u += pattern[k % pattern_len] * features[k];
  return u;
}

inline std::vector<QueryGroup> make_synthetic_groups(const SyntheticConfig& cfg) {
  if (cfg.queries < 1 || cfg.docs_per_query < 2 || cfg.dim < 1)
    throw std::invalid_argument("make_synthetic_groups: degenerate shape");
  if (!(cfg.relevant_fraction > 0.0 && cfg.relevant_fraction < 1.0))
    throw std::invalid_argument("make_synthetic_groups: relevant_fraction must be in (0, 1)");

  std::mt19937_64 rng(cfg.seed);
  std::vector<QueryGroup> groups;
  groups.reserve(cfg.queries);
  for (int q = 1; q <= cfg.queries; ++q) {
    QueryGroup group;
    group.query_id = std::to_string(q);
    group.docs.reserve(cfg.docs_per_query);
    for (int j = 1; j <= cfg.docs_per_query; ++j) {
      Document doc;
      doc.query_id = group.query_id;
      doc.doc_id = "q" + group.query_id + "d" + std::to_string(j);
      doc.features.reserve(cfg.dim);
      for (int k = 0; k < cfg.dim; ++k)
        doc.features.push_back(detail::uniform(rng, -1.0, 1.0));
      group.docs.push_back(std::move(doc));
    }

    std::vector<std::size_t> by_utility(group.docs.size());
    std::iota(by_utility.begin(), by_utility.end(), std::size_t{0});
    std::stable_sort(by_utility.begin(), by_utility.end(),
                     [&](std::size_t a, std::size_t b) {
                       return synthetic_utility(group.docs[a].features) >
                              synthetic_utility(group.docs[b].features);
                     });
    const int relevant = std::clamp<int>(
        static_cast<int>(std::ceil(cfg.relevant_fraction * cfg.docs_per_query)), 1,
        cfg.docs_per_query - 1);
    for (int r = 0; r < relevant; ++r) group.docs[by_utility[r]].label = 1;
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace sortnet
