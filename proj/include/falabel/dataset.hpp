#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "falabel/rng.hpp"

namespace falabel {

// Binary class label restricted to {-1, +1}.
class Label {
 public:
  constexpr Label() : v_(-1) {}
  static constexpr Label positive() { return Label(+1); }
  static constexpr Label negative() { return Label(-1); }

  static Label from_int(int x) {
    if (x != -1 && x != +1) throw std::invalid_argument("label must be -1 or +1");
    return Label(static_cast<std::int8_t>(x));
  }

  constexpr int value() const { return v_; }
  constexpr Label flipped() const { return Label(static_cast<std::int8_t>(-v_)); }
  constexpr bool operator==(const Label&) const = default;

 private:
  explicit constexpr Label(std::int8_t v) : v_(v) {}
  std::int8_t v_;
};

using FeatureVector = std::vector<double>;

struct Dataset {
  std::string name;
  std::size_t feature_count = 0;
  std::vector<FeatureVector> features;
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }

  std::size_t count(Label c) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), c));
  }

  bool has_both_classes() const {
    return count(Label::positive()) > 0 && count(Label::negative()) > 0;
  }

  void push(FeatureVector x, Label y) {
    features.push_back(std::move(x));
    labels.push_back(y);
  }
};

struct SplitPair {
  Dataset part0;
  Dataset part1;
  std::uint64_t seed = 0;
};

inline Label parse_label_token(const std::string& tok, std::size_t row, std::ostream& warnings) {
  if (tok == "1" || tok == "+1") return Label::positive();
  if (tok == "-1") return Label::negative();
  if (tok == "0") {
    warnings << "warning: row " << row << ": label token \"0\" mapped to -1\n";
    return Label::negative();
  }
  throw std::runtime_error("row " + std::to_string(row) + ": label token \"" + tok +
                           "\" is not one of -1, 1, +1, 0");
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// CSV with a header row; every non-label column is a numeric feature.
inline Dataset load_csv(const std::string& path, const std::string& label_column,
                        std::ostream& warnings = std::cerr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file, header row required");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_csv_line(line);
  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == label_column) label_idx = i;
  if (label_idx == header.size())
    throw std::runtime_error(path + ": no column named \"" + label_column + "\"");

  Dataset d;
  d.name = path;
  d.feature_count = header.size() - 1;

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error(path + ": row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " fields, expected " +
                               std::to_string(header.size()));
    FeatureVector x;
    x.reserve(d.feature_count);
    Label y;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == label_idx) {
        y = parse_label_token(cells[i], row, warnings);
        continue;
      }
      const std::string& cell = cells[i];
      double v = 0;
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      auto [p, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc{} || p != end || !std::isfinite(v))
        throw std::runtime_error(path + ": row " + std::to_string(row) + ", column \"" +
                                 header[i] + "\": cannot parse \"" + cell + "\" as a number");
      x.push_back(v);
    }
    d.push(std::move(x), y);
  }
  if (d.size() == 0) throw std::runtime_error(path + ": no instances");
  return d;
}

// 17 significant digits round-trips doubles exactly.
inline void save_csv(const Dataset& d, const std::string& path,
                     const std::string& label_column = "label") {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (std::size_t i = 0; i < d.feature_count; ++i) out << "f" << i << ",";
  out << label_column << "\n";
  char buf[64];
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (double v : d.features[r]) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
      out.write(buf, p - buf);
      out << ",";
    }
    out << d.labels[r].value() << "\n";
  }
}

// Uniform permutation, then first ceil(k/2) rows to part0.
inline SplitPair random_split(const Dataset& d, std::uint64_t seed) {
  if (d.size() < 2) throw std::invalid_argument("random_split: need at least 2 instances");
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(idx, rng);

  const std::size_t half = (d.size() + 1) / 2;
  SplitPair sp;
  sp.seed = seed;
  sp.part0.name = d.name + "#0";
  sp.part1.name = d.name + "#1";
  sp.part0.feature_count = sp.part1.feature_count = d.feature_count;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    Dataset& dst = (i < half) ? sp.part0 : sp.part1;
    dst.push(d.features[idx[i]], d.labels[idx[i]]);
  }
  return sp;
}

// Upsample the minority class with replacement until the class counts match.
inline Dataset bootstrap_balance(const Dataset& d, std::uint64_t seed) {
  const std::size_t pos = d.count(Label::positive());
  const std::size_t neg = d.count(Label::negative());
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("bootstrap_balance: both classes must be present");
  Dataset out = d;
  if (pos == neg) return out;

  const Label minority = (pos < neg) ? Label::positive() : Label::negative();
  std::vector<std::size_t> minority_rows;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.labels[i] == minority) minority_rows.push_back(i);

  Rng rng(seed);
  std::size_t deficit = (pos < neg) ? neg - pos : pos - neg;
  while (deficit--) {
    const std::size_t i = minority_rows[next_below(rng, minority_rows.size())];
    out.push(d.features[i], d.labels[i]);
  }
  return out;
}

}  // namespace falabel
