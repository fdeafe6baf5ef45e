// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. All data come from fixed seeds.
#include "helpers.hpp"
#include "oracle.hpp"

#include "unfold/cli/dataset.hpp"
#include "unfold/cli/generate.hpp"
#include "unfold/drill.hpp"
#include "unfold/error.hpp"
#include "unfold/gplvm.hpp"
#include "unfold/graphs.hpp"
#include "unfold/isomap.hpp"
#include "unfold/laplacian_eigenmaps.hpp"
#include "unfold/lle.hpp"
#include "unfold/methods.hpp"
#include "unfold/meu.hpp"
#include "unfold/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace unfold;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

graphs::NeighborGraph undirected(Index n, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<std::vector<Index>> nb(static_cast<std::size_t>(n));
  for (auto [a, b] : pairs) {
    nb[static_cast<std::size_t>(a)].push_back(b);
    nb[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& v : nb) std::sort(v.begin(), v.end());
  return graphs::NeighborGraph(graphs::GraphKind::kUndirected, nb);
}

// ---------------------------------------------------------------------------

Verdict pca_limit() {
  constexpr double kTol = 1e-4;
  double worst_meu = 0.0, worst_alle = 0.0, best_lle = 1e300, worst_free = 0.0;
  for (unsigned long long seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd Y = testing::gaussian(20, 5, seed);
    const Eigen::MatrixXd Z = oracle::covariance_pca(Y, 5);
    const auto complete = graphs::knn_graph(Y, 19);

    const auto meu = models::meu_fit(Y, complete);
    worst_meu = std::max(worst_meu, oracle::procrustes_residual(Z, models::meu_embed(meu, 5).X));

    models::MeuFitConfig free_cfg;
    free_cfg.constraint = models::ConstraintMode::kFree;
    const auto free = models::meu_fit(Y, complete, free_cfg);
    worst_free = std::max(worst_free, oracle::procrustes_residual(Z, models::meu_embed(free, 5).X));

    models::AlleOptions opts;
    opts.ridge = 1e-9;
    const auto alle = models::alle_fit(Y, graphs::acyclic_graph(Y, 19), opts);
    worst_alle = std::max(worst_alle, oracle::procrustes_residual(Z, models::alle_embed(alle, 5).X));

    const auto lle = models::lle_embed(models::lle_weights(Y, complete), 5);
    best_lle = std::min(best_lle, oracle::procrustes_residual(Z, lle.X));
  }
  Verdict v;
  v.pass = worst_meu < kTol && worst_alle < kTol && best_lle >= 10.0 * kTol;
  v.detail = "MEU lambda>=0 residual " + fmt("%.3g", worst_meu) + ", ALLE " + fmt("%.3g", worst_alle) +
             ", LLE K=n-1 " + fmt("%.3g", best_lle) + " (MEU with free-sign lambda: " + fmt("%.3g", worst_free) + ")";
  return v;
}

Verdict gradient_suite() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = std::uniform_int_distribution<int>(4, 12)(rng);
    const int p = std::uniform_int_distribution<int>(1, 5)(rng);
    const auto g = undirected(n, oracle::random_connected_graph(n, n / 2, rng()));
    const Eigen::MatrixXd Y = testing::gaussian(n, p, rng());
    Eigen::VectorXd lam(g.edge_count());
    for (Index e = 0; e < lam.size(); ++e) lam(e) = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
    const double gamma = 0.05;
    const Eigen::VectorXd analytic = models::meu_gradient(Y, g, lam, gamma);
    Eigen::VectorXd fd(lam.size());
    for (Index e = 0; e < lam.size(); ++e) {
      const double h = 1e-5 * (1.0 + std::abs(lam(e)));
      Eigen::VectorXd up = lam, down = lam;
      up(e) += h;
      down(e) -= h;
      fd(e) = (models::meu_log_likelihood(Y, graphs::laplacian_from_edge_values(g, up), gamma) -
               models::meu_log_likelihood(Y, graphs::laplacian_from_edge_values(g, down), gamma)) /
              (2.0 * h);
    }
    worst = std::max(worst, (analytic - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff());
  }
  return {worst < 1e-5, "worst relative error " + fmt("%.3g", worst) + " over 20 instances"};
}

Verdict kkt_ring() {
  const Eigen::MatrixXd Y = cli::generate("ring", 10, 0.05, 0).Y;
  const auto g = graphs::knn_graph(Y, 2);
  const auto model = models::meu_fit(Y, g);
  const auto D = spectral::squared_distances(Y);
  const auto Dexp = spectral::expected_squared_distances(model.covariance(), static_cast<double>(Y.cols()));
  double mean_d = 0.0;
  for (auto [i, j] : g.edges()) mean_d += D(i, j);
  mean_d /= static_cast<double>(g.edge_count());
  double worst = 0.0;
  int active = 0;
  for (const auto& m : model.laplacian().multipliers()) {
    if (m.value > 0.0) {
      ++active;
      worst = std::max(worst, std::abs(Dexp(m.i, m.j) - D(m.i, m.j)) / mean_d);
    }
  }
  return {model.info.converged && worst <= 1e-3,
          std::to_string(active) + " active edges, worst |<d>-d|/mean(d) " + fmt("%.3g", worst) + " after " +
              std::to_string(model.info.iterations) + " iterations"};
}

Verdict alle_exactness() {
  std::mt19937_64 rng(77);
  double worst_acyclic = 0.0;
  double smallest_cyclic = 1e300;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = std::uniform_int_distribution<int>(8, 20)(rng);
    const int p = std::uniform_int_distribution<int>(2, 10)(rng);
    // k <= p keeps every regression residual nonzero; with k > p the residual
    // floor makes M M^T too ill-conditioned for a dense determinant.
    const int k = std::uniform_int_distribution<int>(1, std::min(4, p))(rng);
    const Eigen::MatrixXd Y = testing::gaussian(n, p, rng());
    const auto fit = models::alle_fit(Y, graphs::acyclic_graph(Y, k, graphs::random_ordering(n, rng())));
    const Eigen::MatrixXd Yr = models::relabel_rows(Y, fit.order);
    const Eigen::MatrixXd M = fit.factor.dense();
    const double exact = oracle::dense_loglik_factor(Yr, M);
    worst_acyclic = std::max(worst_acyclic, std::abs(models::pseudo_log_likelihood(Yr, fit.factor) - exact));

    // Symmetric factor on a cyclic graph, diagonally dominant so M M^T is PD.
    const auto g = undirected(n, oracle::random_connected_graph(n, n, rng()));
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (auto [i, j] : g.edges()) S(i, j) = S(j, i) = -std::uniform_real_distribution<double>(0.2, 1.0)(rng);
    S.diagonal() = S.cwiseAbs().rowwise().sum().array() + 0.5;
    graphs::FactorMatrix F;
    F.n = n;
    F.m = S.sparseView();
    const double cyclic_gap = std::abs(models::pseudo_log_likelihood(Y, F) - oracle::dense_loglik_factor(Y, S));
    smallest_cyclic = std::min(smallest_cyclic, cyclic_gap);
  }
  return {worst_acyclic <= 1e-8 && smallest_cyclic > 1e-3,
          "acyclic |pseudo - exact| max " + fmt("%.3g", worst_acyclic) + ", cyclic min " + fmt("%.3g", smallest_cyclic)};
}

Verdict le_equivalence() {
  std::mt19937_64 rng(5);
  double worst_val = 0.0, worst_vec = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = std::uniform_int_distribution<int>(8, 30)(rng);
    const auto g = undirected(n, oracle::random_connected_graph(n, n, rng()));
    const Eigen::MatrixXd Y = testing::gaussian(n, 3, rng());
    const auto A = graphs::heat_adjacency(Y, g, 1.5);
    const Eigen::VectorXd d = graphs::degree_matrix(A).diagonal();
    const auto gen = spectral::gen_eig(graphs::laplacian_from_adjacency(A).dense(), d);
    const auto nrm = spectral::sym_eig(models::normalized_laplacian(A));
    worst_val = std::max(worst_val, (gen.values - nrm.values).cwiseAbs().maxCoeff());
    for (Index c = 0; c < n; ++c) {
      const Eigen::VectorXd v = d.cwiseSqrt().asDiagonal() * gen.vectors.col(c);
      const double s = v.dot(nrm.vectors.col(c)) >= 0.0 ? 1.0 : -1.0;
      worst_vec = std::max(worst_vec, (v - s * nrm.vectors.col(c)).cwiseAbs().maxCoeff());
    }
  }
  return {worst_val < 1e-8 && worst_vec < 1e-8,
          "eigenvalue gap " + fmt("%.3g", worst_val) + ", eigenvector gap " + fmt("%.3g", worst_vec)};
}

Verdict isomap_oracles() {
  std::mt19937_64 rng(31);
  int exact = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = std::uniform_int_distribution<int>(10, 50)(rng);
    const auto pairs = oracle::random_connected_graph(n, n, rng());
    std::vector<models::WeightedEdge> edges;
    std::vector<oracle::Edge> oedges;
    for (auto [a, b] : pairs) {
      const double len = std::uniform_int_distribution<int>(1, 256)(rng) / 64.0;  // dyadic: sums are exact
      edges.push_back({a, b, len});
      oedges.push_back({a, b, len});
    }
    if (models::shortest_paths(n, edges) == oracle::floyd_warshall(n, oedges)) ++exact;
  }
  const Eigen::MatrixXd Y = testing::gaussian(25, 4, 3);
  const auto E = models::isomap(Y, graphs::knn_graph(Y, 24), 3);
  const Eigen::MatrixXd Z = oracle::covariance_pca(Y, 3);
  double worst = 0.0;
  for (Index c = 0; c < 3; ++c) {
    const double s = E.X.col(c).dot(Z.col(c)) >= 0.0 ? 1.0 : -1.0;
    worst = std::max(worst, (E.X.col(c) - s * Z.col(c)).cwiseAbs().maxCoeff());
  }
  return {exact == 20 && worst < 1e-8,
          std::to_string(exact) + "/20 graphs exact, complete-graph isomap vs PCA " + fmt("%.3g", worst)};
}

Verdict drill_criterion() {
  const Eigen::MatrixXd Y0 = testing::gaussian(10, 40, 8);
  models::DrillOptions raw;
  raw.center = false;
  const auto fit0 = models::drill_fit(Y0, raw);
  const Eigen::MatrixXd analytic = 40.0 * (Y0 * Y0.transpose()).inverse();
  const double rel = (fit0.theta - analytic).cwiseAbs().maxCoeff() / analytic.cwiseAbs().maxCoeff();

  // Chain precision on 15 points, 500 sampled feature columns.
  constexpr int n = 15, p = 500;
  Eigen::MatrixXd theta = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) theta(i, i + 1) = theta(i + 1, i) = -0.4;
  const Eigen::MatrixXd U = Eigen::LLT<Eigen::MatrixXd>(theta).matrixU();
  int recovered_seeds = 0;
  std::string per_seed;
  for (unsigned long long seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd Y = U.triangularView<Eigen::Upper>().solve(testing::gaussian(n, p, 1000 + seed));
    bool ok = false;
    for (int g = 0; g < 20 && !ok; ++g) {
      models::DrillOptions opts;
      opts.center = false;
      opts.rho = static_cast<double>(p) * 0.01 * std::pow(50.0, g / 19.0);
      const auto fit = models::drill_fit(Y, opts);
      int tp = 0, fp = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const bool found = std::abs(fit.theta(i, j)) > 1e-10;
          if (found && j == i + 1) ++tp;
          if (found && j != i + 1) ++fp;
        }
      }
      const double recall = tp / double(n - 1);
      const double false_rate = fp / double(n * (n - 1) / 2 - (n - 1));
      ok = recall >= 0.9 && false_rate <= 0.1;
    }
    if (ok) ++recovered_seeds;
  }
  return {rel < 1e-4 && recovered_seeds >= 9,
          "rho=0 relative error " + fmt("%.3g", rel) + ", support recovered on " + std::to_string(recovered_seeds) +
              "/10 seeds"};
}

Verdict ranking() {
  const std::vector<std::string> methods{"isomap", "meu", "alle", "drill"};
  std::map<std::string, int> wins;
  std::string scores;
  for (unsigned long long seed = 0; seed < 10; ++seed) {
    const auto ds = cli::generate("swiss_roll", 200, 0.0, seed);
    MethodParams params;
    params.method = "le";
    const double le = eval::gplvm_score(ds.Y, run_method(ds.Y, params).X).value;
    for (const auto& m : methods) {
      params.method = m;
      try {
        if (eval::gplvm_score(ds.Y, run_method(ds.Y, params).X).value > le) ++wins[m];
      } catch (const Error&) {
        // a failed fit counts as a loss
      }
    }
  }
  bool pass = true;
  std::string detail = "wins over le in 10 seeds:";
  for (const auto& m : methods) {
    pass = pass && wins[m] >= 8;
    detail += " " + m + " " + std::to_string(wins[m]);
  }
  return {pass, detail};
}

Verdict cmds_round_trip() {
  const Eigen::MatrixXd Y = testing::gaussian(50, 2, 12) * 3.0;
  const auto D = spectral::squared_distances(Y);
  const auto E = spectral::cmds_embed(spectral::distances_to_similarities(D), 2);
  const double rel = (spectral::squared_distances(E.X) - D).cwiseAbs().maxCoeff() / D.cwiseAbs().maxCoeff();
  return {rel < 1e-8, "relative distance error " + fmt("%.3g", rel)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "unfold_acceptance_cli";
  fs::remove_all(root);
  const std::string bin = UNFOLD_BIN;
  std::vector<std::string> commands{
      "generate --name s_curve --n 60 --noise 0.05 --seed 4 --output {d}/data.csv --svg {d}/data.svg",
      "score --header --input {d}/data.csv --embedding {d}/data.truth.csv --seed 1 --output {d}/score.csv",
      "compare --k 8 --header --input {d}/data.csv --output {d}/table.csv",
  };
  for (const auto& m : method_names()) {
    commands.push_back("embed --method " + m + " --k 8 --ordering random --seed 3 --header --input {d}/data.csv"
                       " --output {d}/" + m + ".csv --svg {d}/" + m + ".svg");
  }
  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    fs::create_directories(dir);
    for (std::size_t c = 0; c < commands.size(); ++c) {
      std::string cmd = commands[c];
      for (std::size_t at; (at = cmd.find("{d}")) != std::string::npos;) cmd.replace(at, 3, dir.string());
      const fs::path captured = dir / ("stdout_" + std::to_string(c) + ".txt");
      const std::string line = bin + " " + cmd + " > " + captured.string() + " 2>&1";
      if (std::system(line.c_str()) != 0) return {false, "command failed: " + cmd};
    }
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const fs::path other = root / "b" / entry.path().filename();
    std::string a = slurp(entry.path()), b = slurp(other);
    // stdout lines name the output directory, which differs between runs
    for (auto* s : {&a, &b}) {
      for (const char* run : {"/a/", "/b/"}) {
        for (std::size_t at; (at = s->find(run)) != std::string::npos;) s->replace(at, 3, "/_/");
      }
    }
    if (!fs::exists(other) || a != b) return {false, "outputs differ: " + entry.path().filename().string()};
    ++files;
  }
  return {true, std::to_string(commands.size()) + " commands, " + std::to_string(files) + " files identical"};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number.
  std::vector<int> only;
  for (int a = 1; a < argc; ++a) only.push_back(std::atoi(argv[a]));
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "PCA limits", 5, pca_limit},
      {2, "MEU gradient vs finite differences", 10, gradient_suite},
      {3, "MEU KKT on ring data", 10, kkt_ring},
      {4, "ALLE exact likelihood", 5, alle_exactness},
      {5, "Laplacian eigenmaps equivalence", 5, le_equivalence},
      {6, "isomap oracles", 10, isomap_oracles},
      {7, "DRILL", 60, drill_criterion},
      {8, "swiss-roll ranking", 600, ranking},
      {9, "CMDS round trip", 1, cmds_round_trip},
      {10, "CLI determinism", 60, cli_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s; %.2f s of %.0f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs, c.budget_seconds, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
