#include "unfold/cli/svg.hpp"

#include "unfold/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace unfold::cli {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Blue to red through violet.
std::string color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(40 + 200 * t)), 50,
                static_cast<int>(std::lround(240 - 200 * t)));
  return buf;
}

}  // namespace

std::string scatter_svg(const Eigen::MatrixXd& X, const std::vector<double>& labels, const ScatterOptions& opts) {
  if (X.cols() < 1) throw InvalidArgument("scatter_svg: need at least one column");
  if (opts.size < 64) throw InvalidArgument("scatter_svg: size too small");
  const Eigen::Index n = X.rows();
  const double size = opts.size;
  const double margin = 24.0;
  const double top = opts.title.empty() ? margin : margin + 16.0;

  Eigen::VectorXd xs = X.col(0);
  Eigen::VectorXd ys = X.cols() > 1 ? Eigen::VectorXd(X.col(1)) : Eigen::VectorXd::Zero(n);
  double lo_x = n ? xs.minCoeff() : 0.0, hi_x = n ? xs.maxCoeff() : 1.0;
  double lo_y = n ? ys.minCoeff() : 0.0, hi_y = n ? ys.maxCoeff() : 1.0;
  // Equal scale on both axes so the embedding is not distorted.
  const double box_w = size - 2.0 * margin;
  const double box_h = size - margin - top;
  const double scale = std::min(box_w / std::max(hi_x - lo_x, 1e-300), box_h / std::max(hi_y - lo_y, 1e-300));
  const double off_x = margin + 0.5 * (box_w - (hi_x - lo_x) * scale);
  const double off_y = top + 0.5 * (box_h - (hi_y - lo_y) * scale);
  auto px = [&](Eigen::Index i) { return off_x + (xs(i) - lo_x) * scale; };
  auto py = [&](Eigen::Index i) { return off_y + (hi_y - ys(i)) * scale; };

  const bool by_label = static_cast<Eigen::Index>(labels.size()) == n && n > 0;
  double lo_l = 0.0, hi_l = 1.0;
  if (by_label) {
    lo_l = *std::min_element(labels.begin(), labels.end());
    hi_l = *std::max_element(labels.begin(), labels.end());
  }

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                opts.size, opts.size, opts.size, opts.size);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opts.title.empty()) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"14\" "
                  "text-anchor=\"middle\">", size / 2.0, margin);
    out += buf + escape(opts.title) + "</text>\n";
  }
  if (opts.trajectory && n > 1) {
    out += "<polyline fill=\"none\" stroke=\"#888888\" stroke-width=\"1\" points=\"";
    for (Eigen::Index i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(i), py(i));
      out += buf;
    }
    out += "\"/>\n";
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = by_label ? (hi_l > lo_l ? (labels[static_cast<std::size_t>(i)] - lo_l) / (hi_l - lo_l) : 0.5)
                              : (n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.5);
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", px(i), py(i),
                  color(t).c_str());
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace unfold::cli
