#include "unfold/compare.hpp"

#include "unfold/error.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

namespace unfold::eval {

namespace {

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string ScoreTable::to_csv(bool with_runtime) const {
  std::ostringstream os;
  os << "method,score,error" << (with_runtime ? ",runtime_seconds" : "") << "\n";
  for (const auto& r : rows) {
    os << csv_field(r.method) << "," << (r.score ? full_precision(*r.score) : "") << "," << csv_field(r.error);
    if (with_runtime) os << "," << full_precision(r.runtime_seconds);
    os << "\n";
  }
  return os.str();
}

std::string ScoreTable::to_text(bool with_runtime) const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-8s %18s", "rank", "method", "gplvm_score");
  os << line << (with_runtime ? "   runtime_s" : "") << "\n";
  int rank = 0;
  for (const auto& r : rows) {
    ++rank;
    if (r.score) {
      std::snprintf(line, sizeof line, "%-4d %-8s %18.6f", rank, r.method.c_str(), *r.score);
    } else {
      std::snprintf(line, sizeof line, "%-4s %-8s %18s", "-", r.method.c_str(), "failed");
    }
    os << line;
    if (with_runtime) {
      std::snprintf(line, sizeof line, "   %9.3f", r.runtime_seconds);
      os << line;
    }
    if (!r.score) os << "   " << r.error;
    os << "\n";
  }
  return os.str();
}

ScoreTable compare_methods(const DataMatrix& Y, const std::vector<std::string>& methods, const MethodParams& base,
                           const GplvmScoreConfig& score_cfg) {
  ScoreTable table;
  for (const auto& name : methods) {
    ScoreRow row;
    row.method = name;
    MethodParams params = base;
    params.method = name;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Embedding emb = run_method(Y, params);
      row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.warnings = emb.warnings;
      DataMatrix Ysub = Y;
      if (!emb.index_map.empty()) {
        Ysub.resize(static_cast<Index>(emb.index_map.size()), Y.cols());
        for (std::size_t a = 0; a < emb.index_map.size(); ++a) Ysub.row(static_cast<Index>(a)) = Y.row(emb.index_map[a]);
      }
      row.score = gplvm_score(Ysub, emb.X, score_cfg).value;
    } catch (const std::exception& e) {
      if (row.runtime_seconds == 0.0) {
        row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      row.score.reset();
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    if (a.score && b.score) return *a.score > *b.score;
    return a.score.has_value() && !b.score.has_value();
  });
  return table;
}

}  // namespace unfold::eval
