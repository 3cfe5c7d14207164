#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sortnet/comparator.hpp"
#include "sortnet/data.hpp"
#include "sortnet/metrics.hpp"
#include "sortnet/model_io.hpp"
#include "sortnet/sortnet.hpp"
#include "sortnet/symmetrize.hpp"
#include "sortnet/training.hpp"

namespace sortnet {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;
inline constexpr int exit_numeric = 3;

// A bad flag combination or flag value, as opposed to bad input data.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Effective settings of one invocation. Flags the subcommand does not use
// are simply ignored; everything here is echoed into the output directory.
struct RunConfig {
  std::string train_path;
  std::string valid_path;
  std::string test_path;
  std::string model_path;
  std::string out_dir;
  int hidden = 10;
  int max_iter = 20;
  std::string rank_quality = "map";
  int epochs = 60;
  double learning_rate = 0.1;
  std::uint64_t seed = 1;
  int fold = 0;
  std::string activation = "logistic-sigmoid";
  bool oracle = false;       // rank/eval with the label oracle instead of a model
  int shuffle_check = 0;     // rank: also re-rank under this many input shuffles
  bool corrupt_gradient = false;  // selftest hook: sabotage one gradient entry
};

namespace detail {

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

inline void write_config_echo(const std::string& dir, const std::string& command,
                              const RunConfig& cfg) {
  std::ofstream out(dir + "/config.txt");
  if (!out) throw std::runtime_error("cannot write " + dir + "/config.txt");
  out << "command=" << command << '\n'
      << "train=" << cfg.train_path << '\n'
      << "valid=" << cfg.valid_path << '\n'
      << "test=" << cfg.test_path << '\n'
      << "model=" << cfg.model_path << '\n'
      << "out=" << cfg.out_dir << '\n'
      << "hidden=" << cfg.hidden << '\n'
      << "max_iter=" << cfg.max_iter << '\n'
      << "rank_quality=" << cfg.rank_quality << '\n'
      << "epochs=" << cfg.epochs << '\n'
      << "learning_rate=" << format_double(cfg.learning_rate) << '\n'
      << "seed=" << cfg.seed << '\n'
      << "fold=" << cfg.fold << '\n'
      << "activation=" << cfg.activation << '\n'
      << "oracle=" << (cfg.oracle ? 1 : 0) << '\n'
      << "shuffle_check=" << cfg.shuffle_check << '\n';
}

inline void write_iteration_log(const std::string& path,
                                const std::vector<IterationStats>& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter,tp_size,vp_size,vq_score\n";
  for (const auto& row : log)
    out << row.iter << ',' << row.tp_size << ',' << row.vp_size << ','
        << format_double(row.vq_score) << '\n';
}

inline void write_histories(const std::string& dir,
                            const std::vector<std::vector<EpochStats>>& histories) {
  for (std::size_t k = 0; k < histories.size(); ++k) {
    const std::string path = dir + "/history_" + std::to_string(k + 1) + ".csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "epoch,tp_mean_loss,vp_accuracy\n";
    for (const auto& row : histories[k])
      out << row.epoch << ',' << format_double(row.tp_mean_loss) << ','
          << format_double(row.vp_accuracy) << '\n';
  }
}

inline SortNetConfig to_sortnet_config(const RunConfig& cfg) {
  SortNetConfig sc;
  sc.hidden_pairs = cfg.hidden;
  sc.activation = activation_from_string(cfg.activation);
  sc.max_iter = cfg.max_iter;
  sc.rank_quality = parse_rank_quality(cfg.rank_quality);
  sc.epochs = cfg.epochs;
  sc.learning_rate = cfg.learning_rate;
  sc.seed = cfg.seed;
  return sc;
}

inline void validate_common(const RunConfig& cfg) {
  if (cfg.hidden < 1) throw UsageError("--hidden must be >= 1");
  if (cfg.max_iter < 1) throw UsageError("--max-iter must be >= 1");
  if (cfg.epochs < 1) throw UsageError("--epochs must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw UsageError("--lr must be positive");
  if (cfg.fold < 0 || cfg.fold > 4) throw UsageError("--fold must be in 0..4");
  try {
    parse_rank_quality(cfg.rank_quality);
    activation_from_string(cfg.activation);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

}  // namespace detail

// Per-query precision, average precision and NDCG at cutoffs 1..10, plus
// macro means over the queries. MAP averages only the queries that have a
// relevant document.
struct MetricReport {
  struct Row {
    std::string query_id;
    std::optional<double> ap;
    std::array<double, 10> p{};
    std::array<double, 10> ndcg{};
  };
  std::vector<Row> rows;
  double map = 0.0;
  std::array<double, 10> mean_p{};
  std::array<double, 10> mean_ndcg{};
};

inline MetricReport build_metric_report(const std::vector<std::string>& query_ids,
                                        const std::vector<std::vector<double>>& ranked) {
  if (query_ids.size() != ranked.size())
    throw std::invalid_argument("build_metric_report: id/rating count mismatch");
  MetricReport report;
  for (std::size_t q = 0; q < ranked.size(); ++q) {
    MetricReport::Row row;
    row.query_id = query_ids[q];
    row.ap = average_precision(ranked[q]);
    for (int n = 1; n <= 10; ++n) {
      row.p[n - 1] = precision_at_padded(ranked[q], n);
      row.ndcg[n - 1] = ndcg_at_padded(ranked[q], n);
      report.mean_p[n - 1] += row.p[n - 1];
      report.mean_ndcg[n - 1] += row.ndcg[n - 1];
    }
    report.rows.push_back(std::move(row));
  }
  for (int n = 0; n < 10; ++n) {
    report.mean_p[n] /= static_cast<double>(ranked.size());
    report.mean_ndcg[n] /= static_cast<double>(ranked.size());
  }
  report.map = mean_average_precision(ranked);
  return report;
}

inline void write_report_csv(std::ostream& out, const MetricReport& report) {
  out << "query_id,ap";
  for (int n = 1; n <= 10; ++n) out << ",p@" << n;
  for (int n = 1; n <= 10; ++n) out << ",ndcg@" << n;
  out << '\n';
  auto line = [&](const std::string& id, const std::optional<double>& ap,
                  const std::array<double, 10>& p, const std::array<double, 10>& ndcg) {
    out << id << ',';
    if (ap) out << detail::format_double(*ap);
    for (const double v : p) out << ',' << detail::format_double(v);
    for (const double v : ndcg) out << ',' << detail::format_double(v);
    out << '\n';
  };
  for (const auto& row : report.rows) line(row.query_id, row.ap, row.p, row.ndcg);
  line("mean", report.map, report.mean_p, report.mean_ndcg);
}

inline void print_report_table(std::ostream& out, const MetricReport& report) {
  out << std::left << std::setw(12) << "query" << std::right << std::setw(9) << "ap";
  for (const int n : {1, 3, 5, 10}) out << std::setw(8) << ("p@" + std::to_string(n));
  for (const int n : {1, 3, 5, 10}) out << std::setw(9) << ("ndcg@" + std::to_string(n));
  out << '\n';
  auto line = [&](const std::string& id, const std::optional<double>& ap,
                  const std::array<double, 10>& p, const std::array<double, 10>& ndcg) {
    out << std::left << std::setw(12) << id << std::right << std::fixed
        << std::setprecision(4);
    if (ap) out << std::setw(9) << *ap;
    else out << std::setw(9) << "-";
    for (const int n : {1, 3, 5, 10}) out << std::setw(8) << p[n - 1];
    for (const int n : {1, 3, 5, 10}) out << std::setw(9) << ndcg[n - 1];
    out << '\n';
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
  };
  for (const auto& row : report.rows) line(row.query_id, row.ap, row.p, row.ndcg);
  line("mean", report.map, report.mean_p, report.mean_ndcg);
}

// Ranks every group and returns the orders plus the rating lists they induce.
inline void rank_groups(const std::vector<QueryGroup>& groups,
                        const WeightSharedComparator* net, bool oracle,
                        std::vector<std::vector<std::string>>& orders,
                        std::vector<std::vector<double>>& ranked) {
  orders.clear();
  ranked.clear();
  for (const auto& group : groups) {
    RankingResult r = oracle ? sort_with_comparator(group.docs, label_preference)
                             : sort_with_comparator(group.docs, *net);
    ranked.push_back(ratings_in_order(group, r.order));
    orders.push_back(std::move(r.order));
  }
}

// train: run the incremental loop on a train/validation split and write the
// model plus its logs into --out.
inline int cmd_train(const RunConfig& cfg, std::ostream& out) {
  detail::validate_common(cfg);
  if (cfg.train_path.empty() || cfg.valid_path.empty())
    throw UsageError("train needs --train and --valid");
  if (cfg.out_dir.empty()) throw UsageError("train needs --out");

  const auto train_groups = normalize_groups(parse_letor_file(cfg.train_path));
  const auto valid_groups = normalize_groups(parse_letor_file(cfg.valid_path));
  if (feature_dim(train_groups) != feature_dim(valid_groups))
    throw std::runtime_error("train and validation files disagree on feature count");

  const SortNetResult result = run_sortnet(train_groups, valid_groups,
                                           detail::to_sortnet_config(cfg));

  detail::ensure_dir(cfg.out_dir);
  const std::string model_path =
      cfg.model_path.empty() ? cfg.out_dir + "/model.txt" : cfg.model_path;
  save_model_file(model_path, result.net);
  detail::write_iteration_log(cfg.out_dir + "/iteration_log.csv", result.log);
  detail::write_histories(cfg.out_dir, result.histories);
  detail::write_config_echo(cfg.out_dir, "train", cfg);

  out << "iterations: " << result.log.size() << '\n';
  out << "best " << cfg.rank_quality << ": " << detail::format_double(result.best_score)
      << '\n';
  out << "model: " << model_path << '\n';
  return exit_ok;
}

// rank: order the documents of --test with a model (or the label oracle) and
// emit one CSV row per document. With --shuffle-check N each query is also
// re-ranked from N shuffled input orders and the disagreement is reported.
inline int cmd_rank(const RunConfig& cfg, std::ostream& out) {
  detail::validate_common(cfg);
  if (cfg.test_path.empty()) throw UsageError("rank needs --test");
  if (!cfg.oracle && cfg.model_path.empty())
    throw UsageError("rank needs --model (or --oracle)");
  if (cfg.shuffle_check < 0) throw UsageError("--shuffle-check must be >= 0");
  if (cfg.shuffle_check > 0 && cfg.oracle)
    throw UsageError("--shuffle-check needs a model, not --oracle");

  const auto groups = normalize_groups(parse_letor_file(cfg.test_path));
  std::optional<WeightSharedComparator> net;
  if (!cfg.oracle) {
    net = load_model_file(cfg.model_path);
    if (net->dim != feature_dim(groups))
      throw std::runtime_error("model and data disagree on feature count");
  }

  std::vector<std::vector<std::string>> orders;
  std::vector<std::vector<double>> ranked;
  rank_groups(groups, net ? &*net : nullptr, cfg.oracle, orders, ranked);

  std::ostringstream ranking_csv;
  ranking_csv << "query_id,rank,doc_id,label\n";
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t r = 0; r < orders[g].size(); ++r)
      ranking_csv << groups[g].query_id << ',' << (r + 1) << ',' << orders[g][r] << ','
                  << detail::format_double(ranked[g][r]) << '\n';

  std::ostringstream shuffle_csv;
  if (cfg.shuffle_check > 0) {
    shuffle_csv << "query_id,shuffle,changed_positions,discordant_pairs,kendall_tau\n";
    for (const auto& row :
         shuffle_stability_report(groups, *net, cfg.shuffle_check, cfg.seed))
      shuffle_csv << row.query_id << ',' << row.shuffle_index << ','
                  << row.changed_positions << ',' << row.discordant_pairs << ','
                  << detail::format_double(row.kendall_tau) << '\n';
  }

  if (cfg.out_dir.empty()) {
    out << ranking_csv.str();
    if (cfg.shuffle_check > 0) out << shuffle_csv.str();
  } else {
    detail::ensure_dir(cfg.out_dir);
    std::ofstream rank_out(cfg.out_dir + "/ranking.csv");
    if (!rank_out) throw std::runtime_error("cannot write " + cfg.out_dir + "/ranking.csv");
    rank_out << ranking_csv.str();
    if (cfg.shuffle_check > 0) {
      std::ofstream shuffle_out(cfg.out_dir + "/shuffle_report.csv");
      if (!shuffle_out)
        throw std::runtime_error("cannot write " + cfg.out_dir + "/shuffle_report.csv");
      shuffle_out << shuffle_csv.str();
    }
    detail::write_config_echo(cfg.out_dir, "rank", cfg);
    out << "ranked " << groups.size() << " queries into " << cfg.out_dir << '\n';
  }
  return exit_ok;
}

// eval: rank --test with a model (or the label oracle) and report the
// retrieval metrics per query and averaged.
inline int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  detail::validate_common(cfg);
  if (cfg.test_path.empty()) throw UsageError("eval needs --test");
  if (!cfg.oracle && cfg.model_path.empty())
    throw UsageError("eval needs --model (or --oracle)");

  const auto groups = normalize_groups(parse_letor_file(cfg.test_path));
  std::optional<WeightSharedComparator> net;
  if (!cfg.oracle) {
    net = load_model_file(cfg.model_path);
    if (net->dim != feature_dim(groups))
      throw std::runtime_error("model and data disagree on feature count");
  }

  std::vector<std::vector<std::string>> orders;
  std::vector<std::vector<double>> ranked;
  rank_groups(groups, net ? &*net : nullptr, cfg.oracle, orders, ranked);

  std::vector<std::string> qids;
  for (const auto& g : groups) qids.push_back(g.query_id);
  const MetricReport report = build_metric_report(qids, ranked);

  print_report_table(out, report);
  if (!cfg.out_dir.empty()) {
    detail::ensure_dir(cfg.out_dir);
    std::ofstream csv(cfg.out_dir + "/report.csv");
    if (!csv) throw std::runtime_error("cannot write " + cfg.out_dir + "/report.csv");
    write_report_csv(csv, report);
    detail::write_config_echo(cfg.out_dir, "eval", cfg);
  }
  return exit_ok;
}

// kfold: split one dataset into five folds round-robin, train on each
// rotation and evaluate on its test fold, then pool the fold MAPs.
inline int cmd_kfold(const RunConfig& cfg, std::ostream& out) {
  detail::validate_common(cfg);
  if (cfg.train_path.empty()) throw UsageError("kfold needs --train (the full dataset)");
  if (cfg.out_dir.empty()) throw UsageError("kfold needs --out");

  const auto groups = parse_letor_file(cfg.train_path);
  const auto assignment = round_robin_assignment(groups.size(), cfg.seed);
  detail::ensure_dir(cfg.out_dir);

  std::vector<double> fold_maps;
  for (int f = 0; f < 5; ++f) {
    const FoldSplit split = assemble_folds(groups, assignment, f);
    const auto train_groups = normalize_groups(split.train);
    const auto valid_groups = normalize_groups(split.valid);
    const auto test_groups = normalize_groups(split.test);

    const SortNetResult result =
        run_sortnet(train_groups, valid_groups, detail::to_sortnet_config(cfg));

    const std::string fold_dir = cfg.out_dir + "/fold_" + std::to_string(f);
    detail::ensure_dir(fold_dir);
    save_model_file(fold_dir + "/model.txt", result.net);
    detail::write_iteration_log(fold_dir + "/iteration_log.csv", result.log);
    detail::write_histories(fold_dir, result.histories);

    std::vector<std::vector<std::string>> orders;
    std::vector<std::vector<double>> ranked;
    rank_groups(test_groups, &result.net, false, orders, ranked);
    std::vector<std::string> qids;
    for (const auto& g : test_groups) qids.push_back(g.query_id);
    const MetricReport report = build_metric_report(qids, ranked);
    std::ofstream csv(fold_dir + "/report.csv");
    if (!csv) throw std::runtime_error("cannot write " + fold_dir + "/report.csv");
    write_report_csv(csv, report);

    fold_maps.push_back(report.map);
    out << "fold " << f << ": test MAP " << detail::format_double(report.map) << '\n';
  }

  double pooled = 0.0;
  for (const double m : fold_maps) pooled += m;
  pooled /= static_cast<double>(fold_maps.size());

  std::ofstream pooled_csv(cfg.out_dir + "/pooled.csv");
  if (!pooled_csv) throw std::runtime_error("cannot write " + cfg.out_dir + "/pooled.csv");
  pooled_csv << "fold,test_map\n";
  for (std::size_t f = 0; f < fold_maps.size(); ++f)
    pooled_csv << f << ',' << detail::format_double(fold_maps[f]) << '\n';
  pooled_csv << "mean," << detail::format_double(pooled) << '\n';
  detail::write_config_echo(cfg.out_dir, "kfold", cfg);

  out << "pooled MAP over 5 folds: " << detail::format_double(pooled) << '\n';
  return exit_ok;
}

namespace detail {

inline bool selftest_symmetry(std::ostream& out) {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const int dim = 1 + static_cast<int>(rng() % 8);
    const int hidden = 1 + static_cast<int>(rng() % 8);
    const Activation act = (rng() & 1) ? Activation::logistic : Activation::tanh;
    const WeightSharedComparator net = init_random(dim, hidden, act, rng());
    std::vector<double> x(dim), y(dim);
    for (double& v : x) v = uniform(rng, -2.0, 2.0);
    for (double& v : y) v = uniform(rng, -2.0, 2.0);
    const ForwardTrace fwd = forward(net, x, y);
    const ForwardTrace swp = forward(net, y, x);
    if (fwd.n_succ != swp.n_prec || fwd.n_prec != swp.n_succ) {
      out << "suite symmetry: FAIL (swap identity broke at trial " << t << ")\n";
      return false;
    }
    const Preference ab = compare(net, x, y);
    const Preference ba = compare(net, y, x);
    const bool antisymmetric =
        (ab == Preference::tie && ba == Preference::tie) ||
        (ab == Preference::succ && ba == Preference::prec) ||
        (ab == Preference::prec && ba == Preference::succ);
    if (!antisymmetric) {
      out << "suite symmetry: FAIL (verdicts not antisymmetric at trial " << t << ")\n";
      return false;
    }
    ++checked;
  }
  out << "suite symmetry: PASS (" << checked << " random nets, bit-exact swaps)\n";
  return true;
}

inline bool selftest_gradient(std::ostream& out, bool corrupt) {
  std::mt19937_64 rng(11);
  const double step = 1e-5;
  const double tolerance = 1e-4;
  double worst = 0.0;
  for (const auto& [dim, hidden] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{3, 2}}) {
    WeightSharedComparator net = init_random(dim, hidden, Activation::logistic, rng());
    std::vector<double> x(dim), y(dim);
    for (double& v : x) v = uniform(rng, -1.0, 1.0);
    for (double& v : y) v = uniform(rng, -1.0, 1.0);
    const std::array<double, 2> target = (rng() & 1) ? std::array<double, 2>{1.0, 0.0}
                                                     : std::array<double, 2>{0.0, 1.0};
    std::vector<double> analytic = gradient_entries(gradient(net, x, y, target));
    if (corrupt && !analytic.empty()) analytic.front() += 0.01;
    const auto params = parameter_pointers(net);
    for (std::size_t p = 0; p < params.size(); ++p) {
      const double saved = *params[p];
      *params[p] = saved + step;
      const double up = loss(forward(net, x, y), target);
      *params[p] = saved - step;
      const double down = loss(forward(net, x, y), target);
      *params[p] = saved;
      const double fd = (up - down) / (2.0 * step);
      const double rel = std::fabs(analytic[p] - fd) / std::max(1.0, std::fabs(fd));
      worst = std::max(worst, rel);
    }
  }
  if (worst >= tolerance) {
    out << "suite gradient: FAIL (worst relative error " << worst << ")\n";
    return false;
  }
  out << "suite gradient: PASS (worst relative error " << worst << ")\n";
  return true;
}

inline bool selftest_metrics(std::ostream& out) {
  // Brute-force re-derivation on every binary list of length <= 6.
  for (int len = 1; len <= 6; ++len) {
    for (int bits = 0; bits < (1 << len); ++bits) {
      std::vector<double> ratings(len);
      for (int j = 0; j < len; ++j) ratings[j] = (bits >> j) & 1;
      int running = 0;
      double ap_sum = 0.0;
      int total = 0;
      for (int n = 1; n <= len; ++n) {
        if (ratings[n - 1] > 0.0) ++running;
        if (precision_at(ratings, n) != static_cast<double>(running) / n) {
          out << "suite metrics: FAIL (precision_at disagrees)\n";
          return false;
        }
        if (ratings[n - 1] > 0.0) {
          ap_sum += static_cast<double>(running) / n;
          ++total;
        }
      }
      const auto ap = average_precision(ratings);
      if (total == 0 ? ap.has_value() : (!ap || *ap != ap_sum / total)) {
        out << "suite metrics: FAIL (average_precision disagrees)\n";
        return false;
      }
      std::vector<double> ideal(ratings);
      std::sort(ideal.begin(), ideal.end(), std::greater<double>());
      for (int n = 1; n <= len; ++n) {
        const double got = ndcg_at(ideal, n);
        const bool empty_top = std::none_of(ideal.begin(), ideal.begin() + n,
                                            [](double r) { return r > 0.0; });
        if (empty_top ? got != 0.0 : std::fabs(got - 1.0) > 1e-12) {
          out << "suite metrics: FAIL (ideal ndcg is not 1)\n";
          return false;
        }
      }
    }
  }
  out << "suite metrics: PASS (exhaustive binary lists up to length 6)\n";
  return true;
}

inline bool selftest_symmetrize(std::ostream& out) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 25; ++t) {
    const int dim = 1 + static_cast<int>(rng() % 5);
    const int hidden = 1 + static_cast<int>(rng() % 5);
    const PlainThreeLayerNet plain =
        random_plain_net(dim, hidden, Activation::logistic, rng());
    const WeightSharedComparator net = symmetrize_network(plain);
    std::vector<double> x(dim), y(dim);
    for (double& v : x) v = uniform(rng, -1.0, 1.0);
    for (double& v : y) v = uniform(rng, -1.0, 1.0);
    const ForwardTrace fwd = forward(net, x, y);
    const ForwardTrace swp = forward(net, y, x);
    if (fwd.pre_succ != swp.pre_prec || fwd.n_succ != swp.n_prec) {
      out << "suite symmetrize: FAIL (swap identity broke at trial " << t << ")\n";
      return false;
    }
    const auto r_xy = plain_forward(plain, x, y);
    const auto r_yx = plain_forward(plain, y, x);
    const double want_succ = r_xy[0] + r_yx[1];
    const double want_prec = r_xy[1] + r_yx[0];
    if (std::fabs(fwd.pre_succ - want_succ) > 1e-12 * std::max(1.0, std::fabs(want_succ)) ||
        std::fabs(fwd.pre_prec - want_prec) > 1e-12 * std::max(1.0, std::fabs(want_prec))) {
      out << "suite symmetrize: FAIL (decomposition broke at trial " << t << ")\n";
      return false;
    }
  }
  out << "suite symmetrize: PASS (25 random plain nets)\n";
  return true;
}

}  // namespace detail

// selftest: quick in-process spot checks of the numerical core. Exits
// nonzero if any suite fails; --corrupt-gradient sabotages the gradient on
// purpose to demonstrate the checker has teeth.
inline int cmd_selftest(const RunConfig& cfg, std::ostream& out) {
  bool ok = true;
  ok &= detail::selftest_symmetry(out);
  ok &= detail::selftest_gradient(out, cfg.corrupt_gradient);
  ok &= detail::selftest_metrics(out);
  ok &= detail::selftest_symmetrize(out);
  out << (ok ? "selftest: all suites passed\n" : "selftest: FAILURES\n");
  return ok ? exit_ok : exit_usage;
}

// Dispatch plus the exception-to-exit-code policy shared by main and the
// in-process tests.
inline int run_command(const std::string& command, const RunConfig& cfg,
                       std::ostream& out, std::ostream& err) {
  try {
    if (command == "train") return cmd_train(cfg, out);
    if (command == "rank") return cmd_rank(cfg, out);
    if (command == "eval") return cmd_eval(cfg, out);
    if (command == "kfold") return cmd_kfold(cfg, out);
    if (command == "selftest") return cmd_selftest(cfg, out);
    err << "unknown command: " << command << '\n';
    return exit_usage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const NumericFault& e) {
    err << "numeric fault: " << e.what() << '\n';
    return exit_numeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_data;
  }
}

}  // namespace sortnet
