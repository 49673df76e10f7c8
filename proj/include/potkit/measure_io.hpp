#pragma once

// Measure files: a header line with the node count, then one record per
// node `x,y,weight,element_length` in input order, 17 significant digits.
// The reader also accepts whitespace as the field separator.

#include "potkit/kv.hpp"
#include "potkit/potential.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace potkit {

inline std::string format_measure(const DiscreteMeasure& mu) {
  std::string out = fmt::format("{}\n", mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", mu.nodes()[i].re(), mu.nodes()[i].im(), mu.weights()[i],
                       mu.element_lengths()[i]);
  }
  return out;
}

inline DiscreteMeasure parse_measure(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n'))
    if (!line.empty()) lines.push_back(line);
  if (lines.empty()) throw Error(ErrorKind::ParseError, "measure file: missing node count");
  const long long count = parse_integer(lines[0], "measure file node count");
  if (count < 1 || static_cast<std::size_t>(count) != lines.size() - 1)
    throw Error(ErrorKind::ParseError,
                fmt::format("measure file: header says {} nodes but {} records follow", count, lines.size() - 1));
  std::vector<ComplexPoint> nodes;
  std::vector<double> weights, lengths;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string record(lines[i]);
    for (char& ch : record)
      if (ch == ',' || ch == '\t') ch = ' ';
    std::vector<std::string_view> fields;
    for (auto f : split(record, ' '))
      if (!f.empty()) fields.push_back(f);
    if (fields.size() != 4)
      throw Error(ErrorKind::ParseError, fmt::format("measure file line {}: expected 4 fields", i + 1));
    nodes.emplace_back(parse_real(fields[0], "x"), parse_real(fields[1], "y"));
    weights.push_back(parse_real(fields[2], "weight"));
    lengths.push_back(parse_real(fields[3], "element_length"));
  }
  return {std::move(nodes), std::move(weights), std::move(lengths)};
}

inline DiscreteMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open measure file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_measure(buffer.str());
}

inline void save_measure(const DiscreteMeasure& mu, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write measure file '" + path + "'");
  out << format_measure(mu);
}

}  // namespace potkit
