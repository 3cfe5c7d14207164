#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sortnet {

// Thrown when training produces a non-finite loss or gradient.
struct NumericFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Activation { logistic, tanh };

inline const char* to_string(Activation a) {
  return a == Activation::logistic ? "logistic-sigmoid" : "tanh";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "logistic-sigmoid" || s == "logistic" || s == "sigmoid") return Activation::logistic;
  if (s == "tanh") return Activation::tanh;
  throw std::invalid_argument("unknown activation tag: " + s);
}

inline double activate(Activation act, double a) {
  if (act == Activation::logistic) return 1.0 / (1.0 + std::exp(-a));
  return std::tanh(a);
}

// Derivative written in terms of the activated value h.
inline double activate_deriv(Activation act, double h) {
  if (act == Activation::logistic) return h * (1.0 - h);
  return 1.0 - h * h;
}

// Three layer network that reads a pair of feature vectors <x, y> and emits
// two scores (n_succ, n_prec): how strongly x should precede y in a ranking,
// and the reverse. Hidden units come in pairs i / i' and only the canonical
// half of the weights is stored; the dual unit i' is implied by
//
//   v_x[i'] = v_y[i], v_y[i'] = v_x[i], b_h[i'] = b_h[i],
//   w_succ[i'] = w_prec[i], w_prec[i'] = w_succ[i],
//
// with a single shared output bias. Under this tying the network satisfies
// n_succ(<x, y>) == n_prec(<y, x>) by construction, and forward() keeps the
// identity bit exact (see the accumulation notes below).
struct WeightSharedComparator {
  int dim = 0;           // features per object
  int hidden_pairs = 0;  // the network has 2 * hidden_pairs hidden units
  Activation activation = Activation::logistic;

  std::vector<double> v_x;     // hidden_pairs x dim, row major: x_k -> hidden i
  std::vector<double> v_y;     // hidden_pairs x dim, row major: y_k -> hidden i
  std::vector<double> b_h;     // hidden_pairs
  std::vector<double> w_succ;  // hidden_pairs, hidden i -> succ output
  std::vector<double> w_prec;  // hidden_pairs, hidden i -> prec output
  double b_out = 0.0;
};

namespace detail {

// Uniform double in [lo, hi) built from the top 53 bits of the engine output.
// std::uniform_real_distribution is implementation defined; this keeps weight
// streams identical across standard libraries.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

// Net input of canonical hidden unit i on the ordered pair <first, second>.
// Accumulation order is fixed: every v_x term, then every v_y term, then the
// bias. The dual unit i' is this same function on the swapped pair, so
// forward(x, y) and forward(y, x) execute identical floating point
// operations and the swap symmetry holds bit for bit.
inline double hidden_preact(const WeightSharedComparator& net, int i,
                            std::span<const double> first,
                            std::span<const double> second) {
  const double* vx = net.v_x.data() + static_cast<std::size_t>(i) * net.dim;
  const double* vy = net.v_y.data() + static_cast<std::size_t>(i) * net.dim;
  double a = 0.0;
  for (int k = 0; k < net.dim; ++k) a += vx[k] * first[k];
  for (int k = 0; k < net.dim; ++k) a += vy[k] * second[k];
  return a + net.b_h[i];
}

}  // namespace detail

// Fresh comparator with every parameter drawn uniformly from [-r, r] where
// r = 1/sqrt(2*dim), the reciprocal square root of a hidden unit's fan-in.
// Draw order: v_x row by row, v_y, b_h, w_succ, w_prec, b_out.
inline WeightSharedComparator init_random(int dim, int hidden_pairs,
                                          Activation activation,
                                          std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("init_random: dim must be >= 1");
  if (hidden_pairs < 1) throw std::invalid_argument("init_random: hidden_pairs must be >= 1");
  WeightSharedComparator net;
  net.dim = dim;
  net.hidden_pairs = hidden_pairs;
  net.activation = activation;
  const double r = 1.0 / std::sqrt(2.0 * dim);
  std::mt19937_64 rng(seed);
  auto fill = [&](std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (double& w : v) w = detail::uniform(rng, -r, r);
  };
  fill(net.v_x, static_cast<std::size_t>(hidden_pairs) * dim);
  fill(net.v_y, static_cast<std::size_t>(hidden_pairs) * dim);
  fill(net.b_h, hidden_pairs);
  fill(net.w_succ, hidden_pairs);
  fill(net.w_prec, hidden_pairs);
  net.b_out = detail::uniform(rng, -r, r);
  return net;
}

struct ForwardTrace {
  std::vector<double> hidden;  // 2 * hidden_pairs activations, pair i at slots 2i and 2i+1
  double pre_succ = 0.0;       // output sums before the activation
  double pre_prec = 0.0;
  double n_succ = 0.0;
  double n_prec = 0.0;
};

inline ForwardTrace forward(const WeightSharedComparator& net,
                            std::span<const double> x,
                            std::span<const double> y) {
  if (static_cast<int>(x.size()) != net.dim || static_cast<int>(y.size()) != net.dim)
    throw std::invalid_argument("forward: input length does not match comparator dim");
  ForwardTrace t;
  t.hidden.resize(2 * static_cast<std::size_t>(net.hidden_pairs));
  double s_succ = 0.0;
  double s_prec = 0.0;
  for (int i = 0; i < net.hidden_pairs; ++i) {
    const double ha = activate(net.activation, detail::hidden_preact(net, i, x, y));
    const double hb = activate(net.activation, detail::hidden_preact(net, i, y, x));
    t.hidden[2 * i] = ha;
    t.hidden[2 * i + 1] = hb;
    // Each pair contributes one two-term sum. Swapping x and y swaps ha and
    // hb, which only commutes the inner addition, and IEEE addition is
    // commutative bit for bit. Requires -ffp-contract=off so neither term
    // is fused asymmetrically.
    s_succ += net.w_succ[i] * ha + net.w_prec[i] * hb;
    s_prec += net.w_prec[i] * ha + net.w_succ[i] * hb;
  }
  t.pre_succ = s_succ + net.b_out;
  t.pre_prec = s_prec + net.b_out;
  t.n_succ = activate(net.activation, t.pre_succ);
  t.n_prec = activate(net.activation, t.pre_prec);
  return t;
}

enum class Preference { succ, prec, tie };

inline const char* to_string(Preference p) {
  switch (p) {
    case Preference::succ: return "succ";
    case Preference::prec: return "prec";
    default: return "tie";
  }
}

// Three way verdict: succ when the network scores x ahead of y, prec for the
// reverse, tie on exact equality of the two outputs.
inline Preference compare(const WeightSharedComparator& net,
                          std::span<const double> x,
                          std::span<const double> y) {
  const ForwardTrace t = forward(net, x, y);
  if (t.n_succ > t.n_prec) return Preference::succ;
  if (t.n_prec > t.n_succ) return Preference::prec;
  return Preference::tie;
}

inline bool is_order_target(const std::array<double, 2>& t) {
  return (t[0] == 1.0 && t[1] == 0.0) || (t[0] == 0.0 && t[1] == 1.0);
}

// Squared error of both outputs against the target, which must be [1, 0]
// (x ahead of y) or [0, 1] (y ahead of x).
inline double loss(const ForwardTrace& trace, const std::array<double, 2>& target) {
  if (!is_order_target(target))
    throw std::invalid_argument("loss: target must be [1,0] or [0,1]");
  const double e_succ = target[0] - trace.n_succ;
  const double e_prec = target[1] - trace.n_prec;
  return e_succ * e_succ + e_prec * e_prec;
}

// Partial derivatives of loss() with respect to the stored parameters. Each
// stored weight feeds both a canonical and a dual connection, so every entry
// already sums the two paths.
struct Gradient {
  std::vector<double> v_x;
  std::vector<double> v_y;
  std::vector<double> b_h;
  std::vector<double> w_succ;
  std::vector<double> w_prec;
  double b_out = 0.0;
};

inline Gradient backprop(const WeightSharedComparator& net,
                         std::span<const double> x,
                         std::span<const double> y,
                         const std::array<double, 2>& target,
                         const ForwardTrace& trace) {
  if (!is_order_target(target))
    throw std::invalid_argument("backprop: target must be [1,0] or [0,1]");
  Gradient g;
  g.v_x.resize(net.v_x.size());
  g.v_y.resize(net.v_y.size());
  g.b_h.resize(net.b_h.size());
  g.w_succ.resize(net.w_succ.size());
  g.w_prec.resize(net.w_prec.size());

  const double d_succ = -2.0 * (target[0] - trace.n_succ) *
                        activate_deriv(net.activation, trace.n_succ);
  const double d_prec = -2.0 * (target[1] - trace.n_prec) *
                        activate_deriv(net.activation, trace.n_prec);
  g.b_out = d_succ + d_prec;

  for (int i = 0; i < net.hidden_pairs; ++i) {
    const double ha = trace.hidden[2 * i];
    const double hb = trace.hidden[2 * i + 1];
    g.w_succ[i] = d_succ * ha + d_prec * hb;
    g.w_prec[i] = d_succ * hb + d_prec * ha;
    const double ga = (d_succ * net.w_succ[i] + d_prec * net.w_prec[i]) *
                      activate_deriv(net.activation, ha);
    const double gb = (d_succ * net.w_prec[i] + d_prec * net.w_succ[i]) *
                      activate_deriv(net.activation, hb);
    double* gvx = g.v_x.data() + static_cast<std::size_t>(i) * net.dim;
    double* gvy = g.v_y.data() + static_cast<std::size_t>(i) * net.dim;
    for (int k = 0; k < net.dim; ++k) {
      gvx[k] = ga * x[k] + gb * y[k];
      gvy[k] = ga * y[k] + gb * x[k];
    }
    g.b_h[i] = ga + gb;
  }
  return g;
}

inline Gradient gradient(const WeightSharedComparator& net,
                         std::span<const double> x,
                         std::span<const double> y,
                         const std::array<double, 2>& target) {
  return backprop(net, x, y, target, forward(net, x, y));
}

// Flat views over the stored parameters and over a gradient, in matching
// order: v_x, v_y, b_h, w_succ, w_prec, b_out. Used by the finite-difference
// checks to walk every parameter.
inline std::vector<double*> parameter_pointers(WeightSharedComparator& net) {
  std::vector<double*> ps;
  ps.reserve(net.v_x.size() + net.v_y.size() + net.b_h.size() +
             net.w_succ.size() + net.w_prec.size() + 1);
  for (double& v : net.v_x) ps.push_back(&v);
  for (double& v : net.v_y) ps.push_back(&v);
  for (double& v : net.b_h) ps.push_back(&v);
  for (double& v : net.w_succ) ps.push_back(&v);
  for (double& v : net.w_prec) ps.push_back(&v);
  ps.push_back(&net.b_out);
  return ps;
}

inline std::vector<double> gradient_entries(const Gradient& g) {
  std::vector<double> out;
  out.reserve(g.v_x.size() + g.v_y.size() + g.b_h.size() + g.w_succ.size() +
              g.w_prec.size() + 1);
  out.insert(out.end(), g.v_x.begin(), g.v_x.end());
  out.insert(out.end(), g.v_y.begin(), g.v_y.end());
  out.insert(out.end(), g.b_h.begin(), g.b_h.end());
  out.insert(out.end(), g.w_succ.begin(), g.w_succ.end());
  out.insert(out.end(), g.w_prec.begin(), g.w_prec.end());
  out.push_back(g.b_out);
  return out;
}

// One SGD step: every parameter moves by -learning_rate times its gradient
// entry. The caller must hold exclusive access to the net.
inline void apply_update(WeightSharedComparator& net, const Gradient& g,
                         double learning_rate) {
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("apply_update: learning rate must be positive");
  auto step = [&](std::vector<double>& p, const std::vector<double>& gp,
                  const char* name) {
    if (p.size() != gp.size())
      throw std::invalid_argument(std::string("apply_update: gradient shape mismatch in ") + name);
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!std::isfinite(gp[k]))
        throw NumericFault(std::string("apply_update: non-finite gradient entry in ") + name);
      p[k] -= learning_rate * gp[k];
    }
  };
  step(net.v_x, g.v_x, "v_x");
  step(net.v_y, g.v_y, "v_y");
  step(net.b_h, g.b_h, "b_h");
  step(net.w_succ, g.w_succ, "w_succ");
  step(net.w_prec, g.w_prec, "w_prec");
  if (!std::isfinite(g.b_out)) throw NumericFault("apply_update: non-finite gradient entry in b_out");
  net.b_out -= learning_rate * g.b_out;
}

}  // namespace sortnet
