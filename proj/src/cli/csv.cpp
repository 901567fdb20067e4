#include "silcert/cli/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "silcert/error.hpp"

namespace silcert::cli {
namespace {

using classifier::Label;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
  throw InvalidArgument("line " + std::to_string(line_no) + ": " + msg);
}

double number(const std::string& cell, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    fail(line_no, "'" + cell + "' is not a number");
  }
  if (used != cell.size()) fail(line_no, "'" + cell + "' is not a number");
  if (!std::isfinite(v)) fail(line_no, "value must be finite");
  return v;
}

Label label(const std::string& cell, std::size_t line_no) {
  const std::string l = lower(cell);
  if (l == "left") return Label::Left;
  if (l == "right") return Label::Right;
  fail(line_no, "label must be 'left' or 'right', got '" + cell + "'");
}

// Calls `row(cells, line_no)` for each data row after checking the header.
template <class Row>
std::size_t for_each_row(std::istream& in, const std::vector<std::string>& header, Row&& row) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    auto cells = split(t);
    if (!seen_header) {
      std::vector<std::string> lowered;
      for (const auto& c : cells) lowered.push_back(lower(c));
      if (lowered != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        fail(line_no, "expected header '" + expected + "'");
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      fail(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(cells.size()));
    }
    row(cells, line_no);
    ++rows;
  }
  if (rows == 0) throw InvalidArgument("no samples");
  return rows;
}

}  // namespace

std::pair<classifier::LabeledSample, classifier::LabeledSample> read_samples_csv(std::istream& in) {
  classifier::LabeledSample left{{}, Label::Left};
  classifier::LabeledSample right{{}, Label::Right};
  for_each_row(in, {"value", "label"}, [&](const std::vector<std::string>& cells, std::size_t no) {
    const double v = number(cells[0], no);
    (label(cells[1], no) == Label::Left ? left : right).values.push_back(v);
  });
  if (left.values.empty()) throw InvalidArgument("no samples labeled 'left'");
  if (right.values.empty()) throw InvalidArgument("no samples labeled 'right'");
  return {std::move(left), std::move(right)};
}

ann::PointSet2D read_points_csv(std::istream& in) {
  ann::PointSet2D out;
  for_each_row(in, {"x1", "x2", "label"}, [&](const std::vector<std::string>& cells, std::size_t no) {
    out.points.push_back({number(cells[0], no), number(cells[1], no)});
    out.labels.push_back(label(cells[2], no));
  });
  return out;
}

}  // namespace silcert::cli
