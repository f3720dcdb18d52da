#include "pcdag/dataset.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "pcdag/errors.hpp"

namespace pcdag {

Dataset Dataset::centered_by(const Vector& means) const {
  if (means.size() != x.cols()) {
    throw ContractViolation("centering vector length does not match column count");
  }
  Dataset out;
  out.x = x.rowwise() - means.transpose();
  out.truth = truth;
  return out;
}

namespace {

void format_value(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

double parse_value(const std::string& field, const std::string& where) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw InputError("unparseable numeric field '" + field + "' at " + where);
  }
  return value;
}

}  // namespace

std::string matrix_to_csv(const Matrix& x) {
  std::string out;
  out.reserve(static_cast<std::size_t>(x.size()) * 20);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (c > 0) out += ',';
      format_value(out, x(r, c));
    }
    out += '\n';
  }
  return out;
}

Matrix matrix_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string field = line.substr(start, comma == std::string::npos ? comma : comma - start);
      row.push_back(parse_value(field, "line " + std::to_string(line_no)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError("ragged CSV: line " + std::to_string(line_no) + " has " +
                       std::to_string(row.size()) + " fields, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("empty CSV input");
  Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return x;
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  Dataset data;
  data.x = matrix_from_csv(buf.str());
  return data;
}

void write_csv(const std::string& path, const Matrix& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << matrix_to_csv(x);
  if (!out) throw InputError("failed writing '" + path + "'");
}

}  // namespace pcdag
