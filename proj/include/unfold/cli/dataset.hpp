#pragma once

#include "unfold/types.hpp"

#include <string>
#include <vector>

namespace unfold::cli {

struct Dataset {
  std::string name;
  DataMatrix Y;
  Eigen::MatrixXd truth;        // ground-truth latent coordinates; may be empty
  std::vector<double> labels;   // optional per-point color value
};

struct CsvOptions {
  bool header = false;
  char delimiter = ',';
};

/// Reads a numeric table, one point per row. Throws InvalidArgument naming
/// the row and column of a non-numeric or non-finite cell, a ragged row, or
/// an empty file.
Dataset load_csv(const std::string& path, const CsvOptions& opts = {});

/// Parses CSV text; `source` is used in error messages.
Dataset parse_csv(const std::string& text, const CsvOptions& opts = {}, const std::string& source = "<input>");

/// %.17g, so values survive a text round trip.
std::string format_double(double v);

/// Header x1..xq (or the given names) and one row per matrix row.
std::string to_csv(const Eigen::MatrixXd& M, const std::vector<std::string>& names = {},
                   const std::string& prefix = "x");

/// Writes text to path; throws Error on I/O failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace unfold::cli
