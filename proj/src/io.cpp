#include "qrs/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qrs {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);  // from_chars rejects '+'
  if (token.empty()) return false;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.emplace_back(line.substr(start));
      break;
    }
    cells.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string Dataset::feature_name(std::size_t j) const {
  if (j < feature_names.size()) return feature_names[j];
  return "x" + std::to_string(j + 1);
}

Dataset load_csv(const std::string& path, const std::string& response_column) {
  const std::vector<std::string> lines = read_lines(path);
  std::size_t first_data = 0;
  std::vector<std::string> header;

  // A header is any first row that does not parse as all-numeric.
  if (!lines.empty()) {
    bool all_numeric = true;
    for (const auto& cell : split_csv(lines[0])) {
      double tmp;
      if (!parse_double(cell, tmp)) {
        all_numeric = false;
        break;
      }
    }
    if (!all_numeric) {
      for (const auto& cell : split_csv(lines[0]))
        header.emplace_back(trim(cell));
      first_data = 1;
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t ncols = header.size();
  for (std::size_t li = first_data; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto cells = split_csv(lines[li]);
    if (ncols == 0) ncols = cells.size();
    if (cells.size() != ncols)
      parse_fail(path, li + 1,
                 "ragged row: expected " + std::to_string(ncols) + " cells, got " +
                     std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], row[c]))
        parse_fail(path, li + 1, "cell " + std::to_string(c + 1) +
                                     " is not numeric: '" + cells[c] + "'");
      if (!std::isfinite(row[c]))
        parse_fail(path, li + 1,
                   "cell " + std::to_string(c + 1) + " is not finite: '" + cells[c] + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  if (ncols < 2)
    throw std::runtime_error(path + ": need at least a response and one feature column");

  // Resolve the response column: header name first, then 1-based index.
  std::size_t resp = ncols;
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == response_column) {
        resp = c;
        break;
      }
  }
  if (resp == ncols) {
    int idx = 0;
    const auto tv = trim(response_column);
    auto [ptr, ec] = std::from_chars(tv.data(), tv.data() + tv.size(), idx);
    if (ec == std::errc() && ptr == tv.data() + tv.size() && idx >= 1 &&
        static_cast<std::size_t>(idx) <= ncols) {
      resp = static_cast<std::size_t>(idx) - 1;
    } else {
      throw std::runtime_error(path + ": response column '" + response_column +
                               "' not found (use a header name or 1-based index)");
    }
  }

  Dataset ds;
  const std::size_t n = rows.size(), p = ncols - 1;
  ds.x = Matrix(n, p);
  ds.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ds.y[i] = rows[i][resp];
    std::size_t jj = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c == resp) continue;
      ds.x(i, jj++) = rows[i][c];
    }
  }
  if (!header.empty()) {
    for (std::size_t c = 0; c < ncols; ++c)
      if (c != resp) ds.feature_names.push_back(header[c]);
  }
  return ds;
}

Dataset load_libsvm(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::vector<double> labels;
  std::vector<std::vector<std::pair<std::size_t, double>>> entries;
  std::size_t max_index = 0;

  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    std::istringstream ss(lines[li]);
    std::string token;
    if (!(ss >> token)) continue;
    double label;
    if (!parse_double(token, label))
      parse_fail(path, li + 1, "label is not numeric: '" + token + "'");
    if (!std::isfinite(label))
      parse_fail(path, li + 1, "label is not finite: '" + token + "'");

    std::vector<std::pair<std::size_t, double>> row;
    std::size_t prev_index = 0;
    while (ss >> token) {
      const std::size_t colon = token.find(':');
      if (colon == std::string::npos)
        parse_fail(path, li + 1, "malformed feature token '" + token + "'");
      long idx = 0;
      const auto iv = token.substr(0, colon);
      auto [p1, e1] = std::from_chars(iv.data(), iv.data() + iv.size(), idx);
      if (e1 != std::errc() || p1 != iv.data() + iv.size())
        parse_fail(path, li + 1, "malformed feature index '" + iv + "'");
      if (idx < 1)
        parse_fail(path, li + 1, "feature indices are 1-based, got " + iv);
      if (static_cast<std::size_t>(idx) <= prev_index)
        parse_fail(path, li + 1, "feature indices must be strictly increasing at '" +
                                     token + "'");
      double value;
      if (!parse_double(token.substr(colon + 1), value) || !std::isfinite(value))
        parse_fail(path, li + 1, "malformed feature value in '" + token + "'");
      prev_index = static_cast<std::size_t>(idx);
      max_index = std::max(max_index, prev_index);
      row.emplace_back(prev_index, value);
    }
    labels.push_back(label);
    entries.push_back(std::move(row));
  }
  if (labels.empty()) throw std::runtime_error(path + ": no data rows");

  Dataset ds;
  ds.x = Matrix(labels.size(), max_index);
  ds.y = std::move(labels);
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (const auto& [idx, value] : entries[i]) ds.x(i, idx - 1) = value;
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "y";
  for (std::size_t j = 0; j < ds.x.cols(); ++j) out << "," << ds.feature_name(j);
  out << "\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t i = 0; i < ds.x.rows(); ++i) {
    put(ds.y[i]);
    for (std::size_t j = 0; j < ds.x.cols(); ++j) {
      out << ",";
      put(ds.x(i, j));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Vector load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Vector w;
  std::string token;
  while (in >> token) {
    double v;
    if (!parse_double(token, v))
      throw std::runtime_error(path + ": weight is not numeric: '" + token + "'");
    w.push_back(v);
  }
  if (w.empty()) throw std::runtime_error(path + ": no weights found");
  return w;
}

}  // namespace qrs
