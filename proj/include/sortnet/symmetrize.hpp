#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "sortnet/comparator.hpp"

namespace sortnet {

// Unconstrained three layer network over the concatenation <x, y>, with m
// hidden units and two linear outputs. This is the shape a comparator has
// before any weight tying is imposed.
struct PlainThreeLayerNet {
  int dim = 0;     // features per object; the input layer reads 2 * dim values
  int hidden = 0;  // m
  Activation activation = Activation::logistic;

  std::vector<double> w_in;      // hidden x 2*dim, row major over the concatenation
  std::vector<double> b_hidden;  // hidden
  std::vector<double> w_succ;    // hidden -> succ output
  std::vector<double> w_prec;    // hidden -> prec output
  double b_succ = 0.0;
  double b_prec = 0.0;
};

// Linear output evaluation r(<x, y>) = (r_succ, r_prec).
inline std::array<double, 2> plain_forward(const PlainThreeLayerNet& net,
                                           std::span<const double> x,
                                           std::span<const double> y) {
  if (static_cast<int>(x.size()) != net.dim || static_cast<int>(y.size()) != net.dim)
    throw std::invalid_argument("plain_forward: input length does not match dim");
  double r_succ = net.b_succ;
  double r_prec = net.b_prec;
  for (int j = 0; j < net.hidden; ++j) {
    const double* w = net.w_in.data() + static_cast<std::size_t>(j) * 2 * net.dim;
    double a = 0.0;
    for (int k = 0; k < net.dim; ++k) a += w[k] * x[k];
    for (int k = 0; k < net.dim; ++k) a += w[net.dim + k] * y[k];
    const double h = activate(net.activation, a + net.b_hidden[j]);
    r_succ += net.w_succ[j] * h;
    r_prec += net.w_prec[j] * h;
  }
  return {r_succ, r_prec};
}

// Builds a weight-shared comparator from an arbitrary plain net. Each plain
// hidden unit j becomes canonical pair j of the result: its weights into the
// x half become v_x, its weights into the y half become v_y, and the implied
// dual unit re-reads the same weights swapped. Output weights carry over and
// the two output biases collapse into the single shared one. The resulting
// pre-activation outputs decompose as
//
//   pre_succ(x, y) = r_succ(x, y) + r_prec(y, x)
//   pre_prec(x, y) = r_prec(x, y) + r_succ(y, x)
//
// so a plain net that already scores swapped pairs consistently keeps its
// behaviour, doubled, while any asymmetric remainder cancels out.
inline WeightSharedComparator symmetrize_network(const PlainThreeLayerNet& plain) {
  if (plain.dim < 1) throw std::invalid_argument("symmetrize_network: dim must be >= 1");
  if (plain.hidden < 1) throw std::invalid_argument("symmetrize_network: hidden must be >= 1");
  const std::size_t m = static_cast<std::size_t>(plain.hidden);
  const std::size_t d = static_cast<std::size_t>(plain.dim);
  if (plain.w_in.size() != m * 2 * d || plain.b_hidden.size() != m ||
      plain.w_succ.size() != m || plain.w_prec.size() != m)
    throw std::invalid_argument("symmetrize_network: layer sizes are inconsistent");

  WeightSharedComparator net;
  net.dim = plain.dim;
  net.hidden_pairs = plain.hidden;
  net.activation = plain.activation;
  net.v_x.resize(m * d);
  net.v_y.resize(m * d);
  for (std::size_t j = 0; j < m; ++j) {
    const double* w = plain.w_in.data() + j * 2 * d;
    for (std::size_t k = 0; k < d; ++k) {
      net.v_x[j * d + k] = w[k];
      net.v_y[j * d + k] = w[d + k];
    }
  }
  net.b_h = plain.b_hidden;
  net.w_succ = plain.w_succ;
  net.w_prec = plain.w_prec;
  net.b_out = plain.b_succ + plain.b_prec;
  return net;
}

// Random plain net with weights in [-1, 1], for tests and self checks.
inline PlainThreeLayerNet random_plain_net(int dim, int hidden, Activation activation,
                                           std::uint64_t seed) {
  if (dim < 1 || hidden < 1)
    throw std::invalid_argument("random_plain_net: dim and hidden must be >= 1");
  PlainThreeLayerNet net;
  net.dim = dim;
  net.hidden = hidden;
  net.activation = activation;
  std::mt19937_64 rng(seed);
  auto fill = [&](std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (double& w : v) w = detail::uniform(rng, -1.0, 1.0);
  };
  fill(net.w_in, static_cast<std::size_t>(hidden) * 2 * dim);
  fill(net.b_hidden, hidden);
  fill(net.w_succ, hidden);
  fill(net.w_prec, hidden);
  net.b_succ = detail::uniform(rng, -1.0, 1.0);
  net.b_prec = detail::uniform(rng, -1.0, 1.0);
  return net;
}

}  // namespace sortnet
