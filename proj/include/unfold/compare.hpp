#pragma once

#include "unfold/gplvm.hpp"
#include "unfold/methods.hpp"

#include <optional>
#include <string>
#include <vector>

namespace unfold::eval {

struct ScoreRow {
  std::string method;
  std::optional<double> score;  // empty when the method failed
  std::string error;
  double runtime_seconds = 0.0;  // fit + embed, excluding scoring
  std::vector<std::string> warnings;
};

/// Rows sorted by descending score; failed methods follow in request order.
struct ScoreTable {
  std::vector<ScoreRow> rows;

  /// method,score,error[,runtime_seconds]. Scores use 17 significant digits.
  std::string to_csv(bool with_runtime) const;
  std::string to_text(bool with_runtime) const;
};

/// Runs each method with `base` (method name replaced) and scores its
/// embedding against Y. A failing method produces a row with its error.
ScoreTable compare_methods(const DataMatrix& Y, const std::vector<std::string>& methods, const MethodParams& base,
                           const GplvmScoreConfig& score_cfg = {});

}  // namespace unfold::eval
