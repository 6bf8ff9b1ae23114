#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <system_error>

#include "dashapp/compressors.hpp"
#include "dashapp/dataset.hpp"
#include "dashapp/errors.hpp"

namespace dashapp {

double Dataset::density() const {
  if (num_samples() == 0 || d == 0) return 0.0;
  return static_cast<double>(nnz()) /
         (static_cast<double>(num_samples()) * static_cast<double>(d));
}

double Dataset::row_dot(int s, const double* x) const {
  double acc = 0.0;
  for (int k = row_ptr[s]; k < row_ptr[s + 1]; ++k) {
    acc += value[k] * x[col_index[k]];
  }
  return acc;
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_number(const std::string& tok, int line_no, const char* what) {
  double out = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, std::string("malformed ") + what + " '" + tok +
                                  "'");
  }
  return out;
}

int parse_index(const std::string& tok, int line_no) {
  int out = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, "malformed feature index '" + tok + "'");
  }
  return out;
}

// from_chars does not accept a leading '+'; LIBSVM labels commonly carry one.
std::string strip_plus(const std::string& tok) {
  if (tok.size() > 1 && tok[0] == '+') return tok.substr(1);
  return tok;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, int d_hint) {
  Dataset out;
  if (d_hint < 0) throw InvalidArgumentError("parse_libsvm: d_hint < 0");
  int max_index = 0;  // 1-based
  std::string line;
  int line_no = 0;
  std::vector<double> raw_labels;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string tok;
    if (!(fields >> tok)) continue;  // blank line
    raw_labels.push_back(
        parse_number(strip_plus(tok), line_no, "label"));
    int prev_index = 0;
    while (fields >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 ||
          colon + 1 == tok.size()) {
        throw ParseError(line_no, "malformed feature token '" + tok + "'");
      }
      const int idx = parse_index(tok.substr(0, colon), line_no);
      if (idx < 1) {
        throw ParseError(line_no, "feature index must be >= 1, got '" +
                                      tok.substr(0, colon) + "'");
      }
      if (idx <= prev_index) {
        throw ParseError(line_no,
                         "non-monotone feature index " + std::to_string(idx) +
                             " after " + std::to_string(prev_index));
      }
      prev_index = idx;
      max_index = std::max(max_index, idx);
      out.col_index.push_back(idx - 1);
      out.value.push_back(
          parse_number(tok.substr(colon + 1), line_no, "feature value"));
    }
    out.row_ptr.push_back(static_cast<int>(out.col_index.size()));
  }
  if (raw_labels.empty()) {
    throw ParseError(0, "empty input: no samples found");
  }
  out.d = std::max(max_index, d_hint);

  std::set<double> distinct(raw_labels.begin(), raw_labels.end());
  const bool one_two = (distinct == std::set<double>{1.0, 2.0});
  out.labels.reserve(raw_labels.size());
  for (double y : raw_labels) {
    if (one_two) {
      out.labels.push_back(y == 2.0 ? 1.0 : -1.0);
    } else {
      out.labels.push_back(y > 0.0 ? 1.0 : -1.0);
    }
  }
  return out;
}

Dataset parse_libsvm_file(const std::string& path, int d_hint) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgumentError("cannot open dataset file: " + path);
  }
  return parse_libsvm(in, d_hint);
}

std::string serialize_libsvm(const Dataset& dataset) {
  std::string out;
  for (int s = 0; s < dataset.num_samples(); ++s) {
    out += format_double(dataset.labels[s]);
    for (int k = dataset.row_ptr[s]; k < dataset.row_ptr[s + 1]; ++k) {
      out += ' ';
      out += std::to_string(dataset.col_index[k] + 1);
      out += ':';
      out += format_double(dataset.value[k]);
    }
    out += '\n';
  }
  return out;
}

std::string canonicalize_libsvm(const std::string& text, int d_hint) {
  std::istringstream in(text);
  return serialize_libsvm(parse_libsvm(in, d_hint));
}

void write_libsvm_file(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidArgumentError("cannot open output file: " + path);
  }
  out << serialize_libsvm(dataset);
}

std::vector<NodeShard> split_equal(const Dataset& dataset, int n, Rng& rng) {
  if (n < 1) throw InvalidArgumentError("split_equal: n must be >= 1");
  const int total = dataset.num_samples();
  if (total < n) {
    throw InvalidArgumentError(
        "split_equal: dataset has " + std::to_string(total) +
        " samples, fewer than n = " + std::to_string(n));
  }
  const int m = total / n;
  // Uniform permutation prefix of length n*m, then consecutive cuts.
  std::vector<int> perm = sample_permutation_prefix(total, n * m, rng);
  std::vector<NodeShard> shards(n);
  for (int i = 0; i < n; ++i) {
    shards[i].node_id = i;
    shards[i].sample_indices.assign(perm.begin() + i * m,
                                    perm.begin() + (i + 1) * m);
  }
  return shards;
}

}  // namespace dashapp
