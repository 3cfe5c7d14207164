#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sortnet {

struct ParseError : std::runtime_error {
  int line = 0;
  ParseError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

struct Document {
  std::string query_id;
  std::string doc_id;
  int label = 0;  // 0 = not relevant, >= 1 relevant (possibly graded)
  std::vector<double> features;
};

struct QueryGroup {
  std::string query_id;
  std::vector<Document> docs;
};

namespace detail {

inline bool parse_int(const std::string& s, int& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "0";
  return std::string(buf, ptr);
}

// Pulls the document id out of a trailing line comment such as
// "docid = GX008-86-4444840 inc = 1 prob = 0.086622".
inline std::optional<std::string> docid_from_comment(const std::string& comment) {
  std::istringstream in(comment);
  std::string tok;
  while (in >> tok) {
    if (tok == "docid") {
      std::string next;
      if (!(in >> next)) return std::nullopt;
      if (next == "=") {
        if (!(in >> next)) return std::nullopt;
        return next;
      }
      if (next.rfind("=", 0) == 0 && next.size() > 1) return next.substr(1);
      return next;
    }
    if (tok.rfind("docid=", 0) == 0 && tok.size() > 6) return tok.substr(6);
  }
  return std::nullopt;
}

}  // namespace detail

// Reads the usual learning-to-rank text format, one document per line:
//
//   <label> qid:<query> 1:<v1> 2:<v2> ... k:<vk> #docid = <id> ...
//
// Labels are non-negative integers, feature indices must run 1..k in order,
// and the first document fixes k for the whole file. Documents are grouped
// by query in order of first appearance. When a line carries no docid
// comment an id is synthesized from the query id and the document's ordinal
// within it.
inline std::vector<QueryGroup> parse_letor(std::istream& in) {
  std::vector<QueryGroup> groups;
  std::vector<std::string> group_order;
  auto group_index = [&](const std::string& qid) -> std::size_t {
    for (std::size_t g = 0; g < groups.size(); ++g)
      if (groups[g].query_id == qid) return g;
    groups.push_back(QueryGroup{qid, {}});
    return groups.size() - 1;
  };

  std::string line;
  int line_no = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string comment;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      comment = line.substr(hash + 1);
      line.resize(hash);
    }
    std::istringstream fields(line);
    std::string tok;
    if (!(fields >> tok)) {
      if (!comment.empty()) continue;  // comment-only or blank line
      continue;
    }

    Document doc;
    if (!detail::parse_int(tok, doc.label) || doc.label < 0)
      throw ParseError(line_no, "label must be a non-negative integer, got '" + tok + "'");

    if (!(fields >> tok) || tok.rfind("qid:", 0) != 0 || tok.size() <= 4)
      throw ParseError(line_no, "expected qid:<id> after the label");
    doc.query_id = tok.substr(4);

    int expected = 1;
    while (fields >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError(line_no, "expected <index>:<value>, got '" + tok + "'");
      int index = 0;
      if (!detail::parse_int(tok.substr(0, colon), index))
        throw ParseError(line_no, "feature index is not an integer in '" + tok + "'");
      if (index != expected)
        throw ParseError(line_no, "feature indices must run 1..k in order; expected " +
                                      std::to_string(expected) + ", got " + std::to_string(index));
      double value = 0.0;
      if (!detail::parse_double(tok.substr(colon + 1), value))
        throw ParseError(line_no, "feature value is not a number in '" + tok + "'");
      doc.features.push_back(value);
      ++expected;
    }
    if (doc.features.empty())
      throw ParseError(line_no, "document has no features");
    if (dim < 0) dim = static_cast<int>(doc.features.size());
    if (static_cast<int>(doc.features.size()) != dim)
      throw ParseError(line_no, "document has " + std::to_string(doc.features.size()) +
                                    " features but the file started with " + std::to_string(dim));

    const std::size_t g = group_index(doc.query_id);
    if (auto docid = detail::docid_from_comment(comment))
      doc.doc_id = *docid;
    else
      doc.doc_id = "q" + doc.query_id + "." + std::to_string(groups[g].docs.size() + 1);
    groups[g].docs.push_back(std::move(doc));
  }
  if (groups.empty()) throw ParseError(line_no, "no documents in input");
  return groups;
}

inline std::vector<QueryGroup> parse_letor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_letor(in);
}

// Writes groups back in the same line format parse_letor reads. Feature
// values keep their exact double identity, so parse(serialize(parse(f)))
// equals parse(f).
inline void serialize_letor(std::ostream& out, const std::vector<QueryGroup>& groups) {
  for (const auto& group : groups) {
    for (const auto& doc : group.docs) {
      out << doc.label << " qid:" << group.query_id;
      for (std::size_t k = 0; k < doc.features.size(); ++k)
        out << ' ' << (k + 1) << ':' << detail::format_double(doc.features[k]);
      out << " #docid = " << doc.doc_id << '\n';
    }
  }
}

inline void serialize_letor_file(const std::string& path, const std::vector<QueryGroup>& groups) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  serialize_letor(out, groups);
}

// Per-query feature normalization: each feature is centered on its mean over
// the group and divided by the largest absolute raw value. A feature that is
// identically zero within the group stays zero.
inline QueryGroup normalize_group(const QueryGroup& group) {
  QueryGroup out = group;
  if (group.docs.empty()) return out;
  const std::size_t dim = group.docs.front().features.size();
  for (std::size_t k = 0; k < dim; ++k) {
    double sum = 0.0;
    double max_abs = 0.0;
    for (const auto& doc : group.docs) {
      sum += doc.features[k];
      max_abs = std::max(max_abs, std::fabs(doc.features[k]));
    }
    const double mean = sum / static_cast<double>(group.docs.size());
    for (std::size_t i = 0; i < group.docs.size(); ++i)
      out.docs[i].features[k] =
          max_abs == 0.0 ? 0.0 : (group.docs[i].features[k] - mean) / max_abs;
  }
  return out;
}

inline std::vector<QueryGroup> normalize_groups(const std::vector<QueryGroup>& groups) {
  std::vector<QueryGroup> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(normalize_group(g));
  return out;
}

inline int feature_dim(const std::vector<QueryGroup>& groups) {
  for (const auto& g : groups)
    if (!g.docs.empty()) return static_cast<int>(g.docs.front().features.size());
  throw std::invalid_argument("feature_dim: no documents");
}

// Assigns each query to one of five folds, cycling 0,1,2,3,4 over the groups
// in file order, or over a seeded shuffle of that order when a seed is given.
inline std::vector<int> round_robin_assignment(std::size_t n_groups,
                                               std::optional<std::uint64_t> shuffle_seed) {
  if (n_groups < 5)
    throw std::invalid_argument("round_robin_assignment: need at least 5 queries, got " +
                                std::to_string(n_groups));
  std::vector<std::size_t> order(n_groups);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle_seed) {
    std::mt19937_64 rng(*shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<int> assignment(n_groups, 0);
  for (std::size_t i = 0; i < n_groups; ++i)
    assignment[order[i]] = static_cast<int>(i % 5);
  return assignment;
}

struct FoldSplit {
  std::vector<QueryGroup> train;
  std::vector<QueryGroup> valid;
  std::vector<QueryGroup> test;
};

// Five-fold split with rotating roles: fold f is the test partition, fold
// (f+1) mod 5 validates, the remaining three train. Group order within each
// partition follows the input order.
inline FoldSplit assemble_folds(const std::vector<QueryGroup>& groups,
                                const std::vector<int>& assignment, int test_fold) {
  if (assignment.size() != groups.size())
    throw std::invalid_argument("assemble_folds: assignment size does not match group count");
  if (test_fold < 0 || test_fold > 4)
    throw std::invalid_argument("assemble_folds: fold must be in 0..4");
  for (int a : assignment)
    if (a < 0 || a > 4)
      throw std::invalid_argument("assemble_folds: fold assignments must be in 0..4");
  const int valid_fold = (test_fold + 1) % 5;
  FoldSplit split;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (assignment[i] == test_fold)
      split.test.push_back(groups[i]);
    else if (assignment[i] == valid_fold)
      split.valid.push_back(groups[i]);
    else
      split.train.push_back(groups[i]);
  }
  return split;
}

}  // namespace sortnet
