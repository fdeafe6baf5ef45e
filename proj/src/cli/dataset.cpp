#include "unfold/cli/dataset.hpp"

#include "unfold/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace unfold::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

Dataset parse_csv(const std::string& text, const CsvOptions& opts, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  bool skipped_header = !opts.header;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    const auto fields = split_fields(line, opts.delimiter);
    if (rows.empty()) width = fields.size();
    const std::size_t row = rows.size() + 1;
    if (fields.size() != width) {
      throw InvalidArgument(source + ": row " + std::to_string(row) + " (line " + std::to_string(line_no) + ") has " +
                            std::to_string(fields.size()) + " columns, expected " + std::to_string(width));
    }
    std::vector<double> values;
    values.reserve(width);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string cell = trim(fields[c]);
      const std::string where = source + ": row " + std::to_string(row) + ", column " + std::to_string(c + 1);
      char* end = nullptr;
      errno = 0;
      const double v = cell.empty() ? 0.0 : std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw InvalidArgument(where + ": '" + cell + "' is not a number");
      }
      if (!std::isfinite(v)) throw InvalidArgument(where + ": non-finite value '" + cell + "'");
      values.push_back(v);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InvalidArgument(source + ": no data rows");

  Dataset ds;
  ds.name = source;
  ds.Y.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) ds.Y(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return ds;
}

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), opts, path);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const Eigen::MatrixXd& M, const std::vector<std::string>& names, const std::string& prefix) {
  std::string out;
  for (Index c = 0; c < M.cols(); ++c) {
    if (c) out += ',';
    out += static_cast<std::size_t>(c) < names.size() ? names[static_cast<std::size_t>(c)]
                                                      : prefix + std::to_string(c + 1);
  }
  out += '\n';
  for (Index r = 0; r < M.rows(); ++r) {
    for (Index c = 0; c < M.cols(); ++c) {
      if (c) out += ',';
      out += format_double(M(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace unfold::cli
