#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sortnet/comparator.hpp"

namespace sortnet {

// Text model format, one parameter block per line:
//
//   sortnet-model v1
//   d=<dim> H=<hidden_pairs> activation=<tag>
//   v_x <dim*H values> ... b_out <1 value>
//
// Values are written as C99 hexadecimal float literals, which carry the
// exact bit pattern, so load(save(net)) reproduces the net bit for bit and
// re-saving produces an identical byte stream.

namespace detail {

inline std::string hex_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

inline void write_block(std::ostream& out, const char* name,
                        const std::vector<double>& values) {
  out << name;
  for (const double v : values) out << ' ' << hex_double(v);
  out << '\n';
}

inline std::vector<double> read_block(std::istream& in, const char* name,
                                      std::size_t count) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(std::string("model file: missing block ") + name);
  std::istringstream fields(line);
  std::string tok;
  if (!(fields >> tok) || tok != name)
    throw std::runtime_error(std::string("model file: expected block ") + name +
                             ", got '" + tok + "'");
  std::vector<double> values;
  values.reserve(count);
  while (fields >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      throw std::runtime_error(std::string("model file: bad value '") + tok +
                               "' in block " + name);
    values.push_back(v);
  }
  if (values.size() != count)
    throw std::runtime_error(std::string("model file: block ") + name + " has " +
                             std::to_string(values.size()) + " values, expected " +
                             std::to_string(count));
  return values;
}

}  // namespace detail

inline void save_model(std::ostream& out, const WeightSharedComparator& net) {
  out << "sortnet-model v1\n";
  out << "d=" << net.dim << " H=" << net.hidden_pairs
      << " activation=" << to_string(net.activation) << '\n';
  detail::write_block(out, "v_x", net.v_x);
  detail::write_block(out, "v_y", net.v_y);
  detail::write_block(out, "b_h", net.b_h);
  detail::write_block(out, "w_succ", net.w_succ);
  detail::write_block(out, "w_prec", net.w_prec);
  detail::write_block(out, "b_out", {net.b_out});
}

inline void save_model_file(const std::string& path, const WeightSharedComparator& net) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_model(out, net);
}

inline WeightSharedComparator load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "sortnet-model v1")
    throw std::runtime_error("model file: bad magic line (expected 'sortnet-model v1')");
  if (!std::getline(in, line))
    throw std::runtime_error("model file: missing header line");
  int dim = 0;
  int hidden = 0;
  char tag[64] = {0};
  if (std::sscanf(line.c_str(), "d=%d H=%d activation=%63s", &dim, &hidden, tag) != 3)
    throw std::runtime_error("model file: bad header line '" + line + "'");
  if (dim < 1 || hidden < 1)
    throw std::runtime_error("model file: d and H must be >= 1");

  WeightSharedComparator net;
  net.dim = dim;
  net.hidden_pairs = hidden;
  net.activation = activation_from_string(tag);
  const std::size_t hd = static_cast<std::size_t>(hidden) * dim;
  net.v_x = detail::read_block(in, "v_x", hd);
  net.v_y = detail::read_block(in, "v_y", hd);
  net.b_h = detail::read_block(in, "b_h", hidden);
  net.w_succ = detail::read_block(in, "w_succ", hidden);
  net.w_prec = detail::read_block(in, "w_prec", hidden);
  net.b_out = detail::read_block(in, "b_out", 1).front();
  return net;
}

inline WeightSharedComparator load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_model(in);
}

}  // namespace sortnet
