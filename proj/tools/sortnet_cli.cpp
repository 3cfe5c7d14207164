#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include <sortnet/cli.hpp>

namespace {

void add_common_options(CLI::App* sub, sortnet::RunConfig& cfg) {
  sub->add_option("--train", cfg.train_path, "training data (label qid:<id> 1:<v> ... format)");
  sub->add_option("--valid", cfg.valid_path, "validation data");
  sub->add_option("--test", cfg.test_path, "data to rank or evaluate");
  sub->add_option("--model", cfg.model_path, "model file to load, or to write for train");
  sub->add_option("--out", cfg.out_dir, "output directory");
  sub->add_option("--hidden", cfg.hidden, "hidden unit pairs")->capture_default_str();
  sub->add_option("--max-iter", cfg.max_iter, "incremental training iterations")
      ->capture_default_str();
  sub->add_option("--rank-quality", cfg.rank_quality, "validation metric: map, p@K, or ndcg@K")
      ->capture_default_str();
  sub->add_option("--epochs", cfg.epochs, "SGD epochs per iteration")->capture_default_str();
  sub->add_option("--lr", cfg.learning_rate, "SGD learning rate")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "seed for init and shuffling")->capture_default_str();
  sub->add_option("--fold", cfg.fold, "test fold index, 0..4")->capture_default_str();
  sub->add_option("--activation", cfg.activation, "hidden/output activation: logistic-sigmoid or tanh")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sortnet: pairwise neural comparator training and ranking"};
  app.require_subcommand(1);
  sortnet::RunConfig cfg;

  CLI::App* train = app.add_subcommand(
      "train", "run the incremental comparator training loop on a train/valid split");
  add_common_options(train, cfg);

  CLI::App* rank = app.add_subcommand("rank", "order documents with a trained model");
  add_common_options(rank, cfg);
  rank->add_flag("--oracle", cfg.oracle, "rank by labels instead of a model (debugging)");
  rank->add_option("--shuffle-check", cfg.shuffle_check,
                   "re-rank under N shuffled input orders and report stability");

  CLI::App* eval = app.add_subcommand("eval", "rank and report P@n, AP/MAP and NDCG@n");
  add_common_options(eval, cfg);
  eval->add_flag("--oracle", cfg.oracle, "evaluate the label-oracle ranking");

  CLI::App* kfold = app.add_subcommand(
      "kfold", "five-fold cross validation over one dataset (--train)");
  add_common_options(kfold, cfg);

  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in numerical checks");
  selftest->add_flag("--corrupt-gradient", cfg.corrupt_gradient,
                     "sabotage the gradient so the checker must fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sortnet::exit_usage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return sortnet::run_command(command, cfg, std::cout, std::cerr);
}
