#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <sortnet/comparator.hpp>
#include <sortnet/symmetrize.hpp>

#include "support/oracles.hpp"

using namespace sortnet;

namespace {

bool close(double a, double b, double tol = 1e-12) {
  return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b));
}

// Unrolls a weight-shared comparator into an explicit plain net with 2H
// hidden units and equal output biases. By construction this plain net
// scores swapped pairs consistently: r_succ(x, y) == r_prec(y, x).
PlainThreeLayerNet unroll(const WeightSharedComparator& net, double half_bias) {
  PlainThreeLayerNet plain;
  plain.dim = net.dim;
  plain.hidden = 2 * net.hidden_pairs;
  plain.activation = net.activation;
  plain.w_in.resize(static_cast<std::size_t>(plain.hidden) * 2 * plain.dim);
  for (int i = 0; i < net.hidden_pairs; ++i) {
    double* canonical = plain.w_in.data() + static_cast<std::size_t>(2 * i) * 2 * net.dim;
    double* dual = canonical + 2 * net.dim;
    for (int k = 0; k < net.dim; ++k) {
      canonical[k] = net.v_x[i * net.dim + k];
      canonical[net.dim + k] = net.v_y[i * net.dim + k];
      dual[k] = net.v_y[i * net.dim + k];
      dual[net.dim + k] = net.v_x[i * net.dim + k];
    }
    plain.b_hidden.push_back(net.b_h[i]);
    plain.b_hidden.push_back(net.b_h[i]);
    plain.w_succ.push_back(net.w_succ[i]);
    plain.w_succ.push_back(net.w_prec[i]);
    plain.w_prec.push_back(net.w_prec[i]);
    plain.w_prec.push_back(net.w_succ[i]);
  }
  plain.b_succ = half_bias;
  plain.b_prec = half_bias;
  return plain;
}

}  // namespace

TEST_CASE("symmetrized nets satisfy the swap identity bit for bit") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 6);
    const int hidden = 1 + static_cast<int>(rng() % 8);
    const Activation act = (rng() & 1) ? Activation::logistic : Activation::tanh;
    const PlainThreeLayerNet plain = random_plain_net(dim, hidden, act, rng());
    const WeightSharedComparator net = symmetrize_network(plain);
    REQUIRE(net.dim == dim);
    REQUIRE(net.hidden_pairs == hidden);
    for (int rep = 0; rep < 5; ++rep) {
      const auto x = oracles::random_vector(rng, dim, -2.0, 2.0);
      const auto y = oracles::random_vector(rng, dim, -2.0, 2.0);
      const ForwardTrace fwd = forward(net, x, y);
      const ForwardTrace swp = forward(net, y, x);
      REQUIRE(fwd.pre_succ == swp.pre_prec);
      REQUIRE(fwd.pre_prec == swp.pre_succ);
      REQUIRE(fwd.n_succ == swp.n_prec);
    }
  }
}

TEST_CASE("symmetrized outputs decompose into the plain net's swapped sums") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 6);
    const int hidden = 1 + static_cast<int>(rng() % 8);
    const PlainThreeLayerNet plain =
        random_plain_net(dim, hidden, (rng() & 1) ? Activation::logistic : Activation::tanh,
                         rng());
    const WeightSharedComparator net = symmetrize_network(plain);
    for (int rep = 0; rep < 5; ++rep) {
      const auto x = oracles::random_vector(rng, dim, -2.0, 2.0);
      const auto y = oracles::random_vector(rng, dim, -2.0, 2.0);
      const ForwardTrace fwd = forward(net, x, y);
      const auto r_xy = plain_forward(plain, x, y);
      const auto r_yx = plain_forward(plain, y, x);
      REQUIRE(close(fwd.pre_succ, r_xy[0] + r_yx[1]));
      REQUIRE(close(fwd.pre_prec, r_xy[1] + r_yx[0]));
    }
  }
}

TEST_CASE("a plain net that already scores swaps consistently is doubled") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 4);
    const auto base = init_random(dim, 1 + static_cast<int>(rng() % 4),
                                  Activation::logistic, rng());
    const PlainThreeLayerNet plain = unroll(base, 0.25);
    const WeightSharedComparator doubled = symmetrize_network(plain);
    for (int rep = 0; rep < 5; ++rep) {
      const auto x = oracles::random_vector(rng, dim, -2.0, 2.0);
      const auto y = oracles::random_vector(rng, dim, -2.0, 2.0);
      const auto r = plain_forward(plain, x, y);
      const ForwardTrace fwd = forward(doubled, x, y);
      REQUIRE(close(fwd.pre_succ, 2.0 * r[0]));
      REQUIRE(close(fwd.pre_prec, 2.0 * r[1]));
    }
  }
}

TEST_CASE("symmetrize_network validates its input") {
  PlainThreeLayerNet plain = random_plain_net(2, 3, Activation::logistic, 5);
  plain.w_in.pop_back();
  CHECK_THROWS_AS(symmetrize_network(plain), std::invalid_argument);
  PlainThreeLayerNet empty;
  CHECK_THROWS_AS(symmetrize_network(empty), std::invalid_argument);
}
