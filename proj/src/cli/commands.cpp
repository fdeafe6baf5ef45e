#include "unfold/cli/commands.hpp"

#include "unfold/cli/dataset.hpp"
#include "unfold/cli/generate.hpp"
#include "unfold/cli/svg.hpp"
#include "unfold/compare.hpp"
#include "unfold/error.hpp"
#include "unfold/gplvm.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace unfold::cli {

namespace {

class UsageError : public Error {
public:
  using Error::Error;
};

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

void parse_value(const std::string& key, const std::string& text, std::string& out) {
  (void)key;
  out = text;
}

void parse_value(const std::string& key, const std::string& text, double& out) {
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw UsageError("config key '" + key + "': '" + text + "' is not a number");
  }
}

template <class Int>
void parse_integer(const std::string& key, const std::string& text, Int& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("config key '" + key + "': '" + text + "' is not an integer");
  }
}

void parse_value(const std::string& key, const std::string& text, long long& out) { parse_integer(key, text, out); }
void parse_value(const std::string& key, const std::string& text, int& out) { parse_integer(key, text, out); }
void parse_value(const std::string& key, const std::string& text, unsigned long long& out) {
  parse_integer(key, text, out);
}

void parse_value(const std::string& key, const std::string& text, bool& out) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") {
    out = true;
  } else if (text == "false" || text == "0" || text == "no" || text == "off") {
    out = false;
  } else {
    throw UsageError("config key '" + key + "': '" + text + "' is not a boolean");
  }
}

// Registers flags on a subcommand and remembers how to set each one from a
// config-file string, so the file only fills what the command line left unset.
class OptionSet {
public:
  explicit OptionSet(CLI::App* app) : app_(app) {}

  template <class T>
  void add(const std::string& name, T& var, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + name, var, help);
    setters_[name] = {opt, [&var, name](const std::string& v) { parse_value(name, v, var); }};
  }

  void flag(const std::string& name, bool& var, const std::string& help) {
    CLI::Option* opt = app_->add_flag("--" + name, var, help);
    setters_[name] = {opt, [&var, name](const std::string& v) { parse_value(name, v, var); }};
  }

  void apply(const std::map<std::string, std::string>& values) const {
    for (const auto& [key, value] : values) {
      const auto it = setters_.find(key);
      if (it == setters_.end() || key == "config") {
        throw UsageError("unknown config key '" + key + "' for '" + app_->get_name() + "'");
      }
      if (it->second.option->count() == 0) it->second.set(value);
    }
  }

private:
  struct Setter {
    CLI::Option* option;
    std::function<void(const std::string&)> set;
  };
  CLI::App* app_;
  std::map<std::string, Setter> setters_;
};

// Raw text of the options that need validation after merging.
struct RawOptions {
  std::string method;
  std::string methods;
  std::string ordering = "identity";
  std::string delimiter = ",";
  std::string config;
  long long k = 10;
  long long q = 2;
  long long n = 200;
};

void add_method_options(OptionSet& s, RunConfig& c, RawOptions& raw) {
  s.add("k", raw.k, "neighbors per point");
  s.add("q", raw.q, "latent dimensions");
  s.add("gamma", c.params.gamma, "MEU base precision");
  s.add("rho", c.params.rho, "DRILL L1 weight");
  s.add("sigma", c.params.sigma, "le heat-kernel width (0: unit weights); kpca rbf width (0: median distance)");
  s.add("ridge", c.params.ridge, "LLE/ALLE relative ridge");
  s.add("ordering", raw.ordering, "ALLE point ordering: identity or random");
  s.add("eps-last", c.params.eps_last, "ALLE precision of the last point");
  s.add("drill-floor", c.params.drill_floor, "DRILL diagonal floor, relative to the mean second moment");
  s.add("max-iters", c.params.max_iters, "MEU iteration cap");
  s.flag("drill-knn", c.params.drill_knn_pattern, "restrict DRILL to the k-nearest-neighbor pattern");
  s.flag("strict-connectivity", c.params.strict_connectivity, "fail on a disconnected isomap graph");
}

void add_input_options(OptionSet& s, RunConfig& c, RawOptions& raw) {
  s.add("input", c.input, "data CSV, one point per row");
  s.flag("header", c.header, "skip the first row of the input");
  s.add("delimiter", raw.delimiter, "field delimiter (one character or 'tab')");
}

std::map<std::string, std::string> merged_config(const RawOptions& raw) {
  if (raw.config.empty()) return {};
  return read_config(raw.config);
}

void finish(RunConfig& c, const RawOptions& raw) {
  if (raw.k < 1) throw UsageError("--k must be at least 1");
  if (raw.q < 1) throw UsageError("--q must be at least 1");
  c.params.k = static_cast<Index>(raw.k);
  c.params.q = static_cast<Index>(raw.q);
  c.n = static_cast<Index>(raw.n);
  if (raw.ordering == "identity") {
    c.params.ordering = Ordering::kIdentity;
  } else if (raw.ordering == "random") {
    c.params.ordering = Ordering::kRandom;
  } else {
    throw UsageError("--ordering must be 'identity' or 'random', got '" + raw.ordering + "'");
  }
  if (raw.delimiter == "tab" || raw.delimiter == "\\t") {
    c.delimiter = '\t';
  } else if (raw.delimiter.size() == 1 && raw.delimiter != "\"" && raw.delimiter != "\n") {
    c.delimiter = raw.delimiter[0];
  } else {
    throw UsageError("--delimiter must be a single character, got '" + raw.delimiter + "'");
  }
}

void check_method(const std::string& m) {
  if (is_method(m)) return;
  std::string names;
  for (const auto& name : method_names()) names += (names.empty() ? "" : ", ") + name;
  throw UsageError("unknown method '" + m + "' (expected one of " + names + ")");
}

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError(flag + " is required");
}

// path.csv -> path.<tag>.csv; other names get .<tag>.csv appended.
std::string sidecar(const std::string& path, const std::string& tag) {
  const std::string ext = ".csv";
  if (path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
    return path.substr(0, path.size() - ext.size()) + "." + tag + ext;
  }
  return path + "." + tag + ext;
}

std::string number(double v) { return format_double(v); }

Dataset load_input(const RunConfig& c) {
  return load_csv(c.input, CsvOptions{c.header, c.delimiter});
}

// Embeddings written by this tool carry a header row; accept files without.
Eigen::MatrixXd load_embedding(const std::string& path, char delimiter) {
  try {
    return load_csv(path, CsvOptions{false, delimiter}).Y;
  } catch (const InvalidArgument&) {
    return load_csv(path, CsvOptions{true, delimiter}).Y;
  }
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << one_line(w) << "\n";
}

int cmd_embed(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Dataset data = load_input(c);
  const auto start = std::chrono::steady_clock::now();
  const Embedding emb = run_method(data.Y, c.params);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  print_warnings(emb.warnings, err);

  write_file(c.output, to_csv(emb.X));
  std::string eig = "component,eigenvalue\n";
  for (Index i = 0; i < emb.eigenvalues.size(); ++i) {
    eig += std::to_string(i + 1) + "," + number(emb.eigenvalues(i)) + "\n";
  }
  write_file(sidecar(c.output, "eigenvalues"), eig);
  if (!emb.index_map.empty()) {
    std::string idx = "row\n";
    for (Index r : emb.index_map) idx += std::to_string(r) + "\n";
    write_file(sidecar(c.output, "index"), idx);
  }
  if (!c.svg.empty()) {
    write_file(c.svg, scatter_svg(emb.X, {}, ScatterOptions{emb.method, c.trajectory}));
  }
  out << emb.method << ": " << emb.X.rows() << " x " << emb.X.cols() << " embedding written to " << c.output << "\n";
  if (c.timing) out << "runtime_seconds " << number(seconds) << "\n";
  return 0;
}

int cmd_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Dataset data = load_input(c);
  const std::vector<std::string> methods = c.methods.empty() ? method_names() : c.methods;
  eval::GplvmScoreConfig score_cfg;
  score_cfg.seed = c.params.seed;
  const eval::ScoreTable table = eval::compare_methods(data.Y, methods, c.params, score_cfg);
  for (const auto& row : table.rows) {
    for (const auto& w : row.warnings) err << "warning: " << row.method << ": " << one_line(w) << "\n";
  }
  const std::string text = table.to_text(c.timing);
  if (!c.output.empty()) {
    write_file(c.output, table.to_csv(c.timing));
    const std::string ext = ".csv";
    const bool csv = c.output.size() > ext.size() && c.output.ends_with(ext);
    write_file((csv ? c.output.substr(0, c.output.size() - ext.size()) : c.output) + ".txt", text);
  }
  out << text;
  return 0;
}

int cmd_generate(const RunConfig& c, std::ostream& out) {
  const Dataset ds = generate(c.name, c.n, c.noise, c.params.seed);
  write_file(c.output, to_csv(ds.Y, {}, "y"));
  Eigen::MatrixXd truth(ds.truth.rows(), ds.truth.cols() + 1);
  truth << ds.truth, Eigen::Map<const Eigen::VectorXd>(ds.labels.data(), static_cast<Index>(ds.labels.size()));
  std::vector<std::string> names;
  for (Index j = 0; j < ds.truth.cols(); ++j) names.push_back("z" + std::to_string(j + 1));
  names.push_back("label");
  write_file(sidecar(c.output, "truth"), to_csv(truth, names));
  if (!c.svg.empty()) {
    write_file(c.svg, scatter_svg(ds.truth, ds.labels, ScatterOptions{c.name, c.trajectory}));
  }
  out << c.name << ": " << ds.Y.rows() << " x " << ds.Y.cols() << " written to " << c.output << "\n";
  return 0;
}

int cmd_score(const RunConfig& c, std::ostream& out) {
  const Dataset data = load_input(c);
  const Eigen::MatrixXd X = load_embedding(c.embedding, c.delimiter);
  if (X.rows() != data.Y.rows()) {
    throw InvalidArgument("embedding has " + std::to_string(X.rows()) + " rows but the data has " +
                          std::to_string(data.Y.rows()));
  }
  eval::GplvmScoreConfig cfg;
  cfg.seed = c.params.seed;
  const eval::GplvmScore s = eval::gplvm_score(data.Y, X, cfg);
  std::string text = "gplvm_score,variance,lengthscale,bias,noise,degenerate\n";
  text += number(s.value);
  for (int i = 0; i < 4; ++i) text += "," + number(s.hyper(i));
  text += std::string(",") + (s.degenerate ? "true" : "false") + "\n";
  if (c.output.empty()) {
    out << text;
  } else {
    write_file(c.output, text);
    out << "gplvm_score " << number(s.value) << "\n";
  }
  return 0;
}

}  // namespace

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(t.substr(0, eq));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
    values[key] = value;
  }
  return values;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral dimensionality reduction through Gaussian random fields", "unfold"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  RunConfig cfg;
  RawOptions raw;

  CLI::App* embed = app.add_subcommand("embed", "fit one method and write its embedding");
  OptionSet embed_opts(embed);
  embed_opts.add("method", raw.method, "meu, lle, alle, le, isomap, drill, kpca or pca");
  add_method_options(embed_opts, cfg, raw);
  add_input_options(embed_opts, cfg, raw);
  embed_opts.add("seed", cfg.params.seed, "random seed");
  embed_opts.add("output", cfg.output, "embedding CSV (columns x1..xq)");
  embed_opts.add("svg", cfg.svg, "also write an SVG scatter plot");
  embed_opts.flag("trajectory", cfg.trajectory, "join points in row order in the plot");
  embed_opts.flag("timing", cfg.timing, "report the fit time");
  embed->add_option("--config", raw.config, "key=value defaults file");

  CLI::App* compare = app.add_subcommand("compare", "score several methods with the GP-LVM likelihood");
  OptionSet compare_opts(compare);
  compare_opts.add("methods", raw.methods, "comma-separated methods (default: all)");
  add_method_options(compare_opts, cfg, raw);
  add_input_options(compare_opts, cfg, raw);
  compare_opts.add("seed", cfg.params.seed, "random seed");
  compare_opts.add("output", cfg.output, "score table CSV; a .txt table is written beside it");
  compare_opts.flag("timing", cfg.timing, "add a runtime column");
  compare->add_option("--config", raw.config, "key=value defaults file");

  CLI::App* gen = app.add_subcommand("generate", "write a synthetic data set with ground truth");
  OptionSet gen_opts(gen);
  gen_opts.add("name", cfg.name, "swiss_roll, s_curve, ring or circle_images_proxy");
  gen_opts.add("n", raw.n, "number of points");
  gen_opts.add("noise", cfg.noise, "standard deviation of added Gaussian noise");
  gen_opts.add("seed", cfg.params.seed, "random seed");
  gen_opts.add("output", cfg.output, "data CSV; ground truth goes beside it as <name>.truth.csv");
  gen_opts.add("svg", cfg.svg, "also plot the ground truth");
  gen_opts.flag("trajectory", cfg.trajectory, "join points in row order in the plot");
  gen->add_option("--config", raw.config, "key=value defaults file");

  CLI::App* score = app.add_subcommand("score", "GP-LVM likelihood of data given an embedding");
  OptionSet score_opts(score);
  add_input_options(score_opts, cfg, raw);
  score_opts.add("embedding", cfg.embedding, "embedding CSV, one row per data point");
  score_opts.add("seed", cfg.params.seed, "random seed for the optimizer restarts");
  score_opts.add("output", cfg.output, "result CSV (default: standard output)");
  score->add_option("--config", raw.config, "key=value defaults file");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      throw UsageError(e.what());
    }

    const auto file = merged_config(raw);
    if (embed->parsed()) {
      embed_opts.apply(file);
      finish(cfg, raw);
      require(raw.method, "--method");
      check_method(raw.method);
      cfg.params.method = raw.method;
      require(cfg.input, "--input");
      require(cfg.output, "--output");
      return cmd_embed(cfg, out, err);
    }
    if (compare->parsed()) {
      compare_opts.apply(file);
      finish(cfg, raw);
      std::stringstream list(raw.methods);
      std::string m;
      while (std::getline(list, m, ',')) {
        m = trim(m);
        if (m.empty()) continue;
        check_method(m);
        cfg.methods.push_back(m);
      }
      require(cfg.input, "--input");
      return cmd_compare(cfg, out, err);
    }
    if (gen->parsed()) {
      gen_opts.apply(file);
      finish(cfg, raw);
      const auto& names = generator_names();
      if (std::find(names.begin(), names.end(), cfg.name) == names.end()) {
        throw UsageError("unknown data set '" + cfg.name + "'");
      }
      if (cfg.n < 10) throw UsageError("--n must be at least 10");
      if (cfg.noise < 0.0) throw UsageError("--noise must be nonnegative");
      require(cfg.output, "--output");
      return cmd_generate(cfg, out);
    }
    score_opts.apply(file);
    finish(cfg, raw);
    require(cfg.input, "--input");
    require(cfg.embedding, "--embedding");
    return cmd_score(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace unfold::cli
