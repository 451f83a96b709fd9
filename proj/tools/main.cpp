#include "superadam/baselines.hpp"
#include "superadam/harness.hpp"
#include "superadam/mirror_step.hpp"
#include "superadam/problems.hpp"
#include "superadam/superadam.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace superadam;
using nlohmann::json;

int cmd_run(const std::string& config_path, std::string out_override, int workers_override) {
  json doc;
  {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config '" << config_path << "'\n";
      return 1;
    }
    try {
      in >> doc;
    } catch (const json::exception& e) {
      std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
      return 1;
    }
  }

  std::vector<std::string> errors;
  ExperimentConfig cfg = ExperimentConfig::from_json(doc, errors);

  // Precedence: CLI flag > env var > config file.
  if (const char* env = std::getenv("SUPERADAM_OUT"); env && *env) cfg.out_dir = env;
  if (const char* env = std::getenv("SUPERADAM_WORKERS"); env && *env) cfg.workers = std::atoi(env);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (workers_override > 0) cfg.workers = workers_override;
  if (cfg.workers < 1) errors.push_back("workers: must be >= 1");

  if (errors.empty()) {
    const auto deep = validate_experiment(cfg);
    errors.insert(errors.end(), deep.begin(), deep.end());
  }
  if (!errors.empty()) {
    std::cerr << "config validation failed:\n";
    for (const auto& e : errors) std::cerr << "  - " << e << "\n";
    return 1;
  }

  try {
    const ExperimentResult res = run_experiment(cfg);
    std::cout << "wrote " << res.cells.size() << " csv file(s) and summary.json to '"
              << cfg.out_dir << "'\n";
    if (res.exit_code == 2)
      std::cerr << "warning: at least one run aborted on a non-finite iterate\n";
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_report(const std::string& in_dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> summary_paths;
  if (fs::exists(fs::path(in_dir) / "summary.json"))
    summary_paths.push_back(fs::path(in_dir) / "summary.json");
  if (fs::exists(in_dir))
    for (const auto& entry : fs::directory_iterator(in_dir))
      if (entry.is_directory() && fs::exists(entry.path() / "summary.json"))
        summary_paths.push_back(entry.path() / "summary.json");
  std::sort(summary_paths.begin(), summary_paths.end());
  if (summary_paths.empty()) {
    std::cerr << "error: no summary.json under '" << in_dir << "'\n";
    return 1;
  }
  std::vector<json> summaries;
  for (const auto& p : summary_paths) {
    std::ifstream in(p);
    json s;
    try {
      in >> s;
    } catch (const json::exception& e) {
      std::cerr << "error: '" << p.string() << "' is not valid JSON: " << e.what() << "\n";
      return 1;
    }
    summaries.push_back(std::move(s));
  }
  try {
    const CompareReport rep = compare_report(summaries);
    std::ofstream md(fs::path(in_dir) / "report.md"), csv(fs::path(in_dir) / "report.csv");
    md << rep.markdown;
    csv << rep.csv;
    std::cout << rep.markdown;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// Quick in-process invariant checks; one line per suite.
int cmd_selftest() {
  int failures = 0;
  auto report = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  // Positive-definite floor across all generator cases.
  {
    bool ok = true;
    const double lambda = 5e-4;
    for (const MatrixCase mcase : {MatrixCase::Case1, MatrixCase::Case2, MatrixCase::Case4Diag,
                                   MatrixCase::Case4Scalar}) {
      SeededRng rng(7 + static_cast<int>(mcase));
      for (int stream = 0; stream < 200 && ok; ++stream) {
        MatrixGeneratorState st(mcase, 8, lambda);
        for (int step = 0; step < 8; ++step) {
          Vector g(8);
          for (int i = 0; i < 8; ++i) g[i] = 10.0 * rng.normal();
          ok = ok && generate(st, g).smallest_eigenvalue() >= lambda;
        }
      }
    }
    report("matrix_psd_floor", ok);
  }

  // Projection idempotence.
  {
    SeededRng rng(11);
    bool ok = true;
    const auto box = FeasibleSet::box(Vector::Constant(4, -1.0), Vector::Constant(4, 1.0));
    const auto ball = FeasibleSet::ball(Vector::Zero(4), 0.7);
    for (int i = 0; i < 200; ++i) {
      Vector v(4);
      for (int j = 0; j < 4; ++j) v[j] = 3.0 * rng.normal();
      for (const auto* X : {&box, &ball}) {
        const Vector p = euclidean_project(v, *X);
        ok = ok && (euclidean_project(p, *X) - p).norm() <= 1e-14 && X->contains(p, 1e-12);
      }
    }
    report("projection_idempotent", ok);
  }

  // Mirror step beats a brute-force grid on a small box instance.
  {
    SeededRng rng(13);
    bool ok = true;
    for (int inst = 0; inst < 10 && ok; ++inst) {
      Vector diag(2);
      diag << 0.5 + rng.uniform01(), 0.5 + rng.uniform01();
      const auto H = AdaptiveMatrix::diagonal(diag);
      Vector x_t(2), g(2);
      for (int j = 0; j < 2; ++j) {
        x_t[j] = 0.1 * rng.normal();
        g[j] = rng.normal();
      }
      const auto X = FeasibleSet::box(Vector::Constant(2, -0.2), Vector::Constant(2, 0.2));
      const double gamma = 0.3;
      const auto res = mirror_step(x_t, g, H, gamma, X);
      double best = std::numeric_limits<double>::infinity();
      for (int a = 0; a <= 100; ++a)
        for (int b = 0; b <= 100; ++b) {
          Vector z(2);
          z << -0.2 + 0.004 * a, -0.2 + 0.004 * b;
          best = std::min(best, mirror_objective(z, x_t, g, H, gamma));
        }
      ok = mirror_objective(res.x_tilde, x_t, g, H, gamma) <= best + 1e-12;
    }
    report("mirror_step_grid", ok);
  }

  // Zero-noise exactness of the variance-reduced estimator.
  {
    const auto problem = FiniteSumQuadratic::random(6, 4, 5, 0.5, 2.0, 1.0, 10.0, true);
    SuperAdamConfig cfg;
    cfg.schedule = Schedule(1, 1.0, 27.0, 7.0, 0.05, 1.0);
    cfg.matrix_case = MatrixCase::Case2;
    cfg.T = 200;
    cfg.seed = 3;
    const Trajectory traj = run(problem, cfg);
    double worst = 0.0;
    for (const auto& r : traj.records) worst = std::max(worst, r.est_err);
    report("zero_noise_exactness", worst <= 1e-12);
  }

  // Oracle-call accounting and measure-chain inequality on a noisy problem.
  {
    const auto problem = FiniteSumQuadratic::random(6, 10, 9, 0.5, 3.0, 1.0, 10.0);
    bool ok = true;
    for (const int tau : {0, 1}) {
      CountingOracle counting(problem);
      SuperAdamConfig cfg;
      cfg.schedule = tau == 1 ? Schedule(1, 1.0, 27.0, 7.0, 1e-3, 0.9)
                              : Schedule(0, 1.0, 27.0, 3.0, 1e-3, 0.9);
      cfg.T = 300;
      cfg.seed = 17;
      const Trajectory traj = run(counting, cfg);
      ok = ok && traj.estimator_grad_calls == (tau == 1 ? 2 * cfg.T + 1 : cfg.T + 1);
      ok = ok && counting.stoch_grad_calls == traj.estimator_grad_calls + traj.matrix_grad_calls;
      for (const auto& r : traj.records) ok = ok && r.gradmap_norm <= r.Mt * (1.0 + 1e-9);
    }
    report("call_accounting_and_chain", ok);
  }

  // Bit-identical trajectories from identical seeds.
  {
    const auto problem = FiniteSumQuadratic::random(5, 8, 21, 0.5, 3.0, 1.0, 10.0);
    SuperAdamConfig cfg;
    cfg.schedule = Schedule(1, 1.0, 100.0, 40.0, 1e-3, 0.9);
    cfg.T = 150;
    cfg.seed = 42;
    const Trajectory a = run(problem, cfg);
    const Trajectory b = run(problem, cfg);
    bool ok = a.records.size() == b.records.size();
    for (std::size_t i = 0; ok && i < a.records.size(); ++i)
      ok = csv_row(a.records[i]) == csv_row(b.records[i]);
    ok = ok && a.x_last == b.x_last;
    report("determinism", ok);
  }

  std::cout << (failures == 0 ? "selftest: all suites passed\n"
                              : "selftest: FAILURES detected\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-gradient optimization benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_dir;
  int workers = 0;

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("--config", config_path, "Path to the JSON experiment config")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides config and env)");
  run_cmd->add_option("--workers", workers, "Worker thread count (overrides config and env)");

  auto* report_cmd = app.add_subcommand("report", "Build a comparison table from summaries");
  report_cmd->add_option("--in", in_dir, "Directory containing summary.json (or subdirs)")
      ->required();

  auto* selftest_cmd = app.add_subcommand("selftest", "Run the quick invariant suites");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return cmd_run(config_path, out_dir, workers);
  if (report_cmd->parsed()) return cmd_report(in_dir);
  if (selftest_cmd->parsed()) return cmd_selftest();
  return 1;
}
