#include "superadam/harness.hpp"

#include "superadam/baselines.hpp"
#include "superadam/mirror_step.hpp"
#include "superadam/problems.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

namespace superadam {

using nlohmann::json;

const char* const kCsvHeader =
    "t,f,grad_norm,est_err,step_norm,Mt,gradmap_norm,condH,mu,alpha,b1_slack";

namespace {

constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kMcStream = 3;
constexpr double kChainSlack = 1e-9;  // fp slack for the measure-chain check

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool valid_label(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

Vector json_to_vector(const json& j, Index d, const char* what) {
  if (j.is_number()) return Vector::Constant(d, j.get<double>());
  require(j.is_array(), std::string(what) + ": expected number or array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  if (d >= 0)
    require(v.size() == d, std::string(what) + ": wrong dimension");
  return v;
}

FeasibleSet parse_feasible_set(const json& j, Index d) {
  if (j.is_null()) return FeasibleSet::unconstrained();
  require(j.is_object() && j.contains("kind"), "feasible_set: expected object with 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "unconstrained") return FeasibleSet::unconstrained();
  if (kind == "box")
    return FeasibleSet::box(json_to_vector(j.at("lower"), d, "feasible_set.lower"),
                            json_to_vector(j.at("upper"), d, "feasible_set.upper"));
  if (kind == "ball")
    return FeasibleSet::ball(json_to_vector(j.at("center"), d, "feasible_set.center"),
                             j.at("radius").get<double>());
  throw ContractViolation("feasible_set: unknown kind '" + kind + "'");
}

MatrixCase parse_matrix_case(const std::string& s) {
  if (s == "case1") return MatrixCase::Case1;
  if (s == "case2") return MatrixCase::Case2;
  if (s == "case3") return MatrixCase::Case3;
  if (s == "case4_diag") return MatrixCase::Case4Diag;
  if (s == "case4_scalar") return MatrixCase::Case4Scalar;
  throw ContractViolation("matrix_case: unknown value '" + s + "'");
}

struct OptimizerSpec {
  std::string label;
  json raw;
  bool is_superadam = false;
  SuperAdamConfig sa;  // seed filled per cell
  FeasibleSet X = FeasibleSet::unconstrained();
  Vector x1;  // empty = projected origin

  std::unique_ptr<BaselineOptimizer> make(const FeasibleSet& set) const;
};

std::unique_ptr<BaselineOptimizer> OptimizerSpec::make(const FeasibleSet& set) const {
  const std::string name = raw.at("name").get<std::string>();
  const json& o = raw;
  if (name == "adagrad") {
    AdaGradParams p;
    p.eta = o.value("eta", p.eta);
    p.decreasing_eta = o.value("decreasing_eta", p.decreasing_eta);
    p.arithmetic_average = o.value("arithmetic_average", p.arithmetic_average);
    return std::make_unique<AdaGrad>(p, set);
  }
  if (name == "adam") {
    AdamParams p;
    p.eta = o.value("eta", p.eta);
    p.alpha1 = o.value("alpha1", p.alpha1);
    p.alpha2 = o.value("alpha2", p.alpha2);
    p.eps = o.value("eps", p.eps);
    p.decreasing_eta = o.value("decreasing_eta", p.decreasing_eta);
    return std::make_unique<Adam>(p, set);
  }
  if (name == "amsgrad") {
    AmsGradParams p;
    p.eta = o.value("eta", p.eta);
    p.alpha1 = o.value("alpha1", p.alpha1);
    p.alpha2 = o.value("alpha2", p.alpha2);
    p.decreasing_eta = o.value("decreasing_eta", p.decreasing_eta);
    return std::make_unique<AmsGrad>(p, set);
  }
  if (name == "adamw") {
    AdamWParams p;
    p.eta = o.value("eta", p.eta);
    p.alpha1 = o.value("alpha1", p.alpha1);
    p.alpha2 = o.value("alpha2", p.alpha2);
    p.eps = o.value("eps", p.eps);
    p.alpha_scale = o.value("alpha_scale", p.alpha_scale);
    p.weight_decay = o.value("weight_decay", p.weight_decay);
    p.decreasing_eta = o.value("decreasing_eta", p.decreasing_eta);
    return std::make_unique<AdamW>(p, set);
  }
  if (name == "adabelief") {
    AdaBeliefParams p;
    p.eta = o.value("eta", p.eta);
    p.alpha1 = o.value("alpha1", p.alpha1);
    p.alpha2 = o.value("alpha2", p.alpha2);
    p.eps = o.value("eps", p.eps);
    p.decreasing_eta = o.value("decreasing_eta", p.decreasing_eta);
    return std::make_unique<AdaBelief>(p, set);
  }
  if (name == "adagrad_norm") {
    AdaGradNormParams p;
    p.eta = o.value("eta", p.eta);
    p.b0 = o.value("b0", p.b0);
    return std::make_unique<AdaGradNorm>(p, set);
  }
  if (name == "adaptive_sgd") {
    AdaptiveSgdParams p;
    p.k = o.value("k", p.k);
    p.omega = o.value("omega", p.omega);
    p.power_eps = o.value("power_eps", p.power_eps);
    return std::make_unique<AdaptiveSgd>(p, set);
  }
  if (name == "storm") {
    StormParams p;
    p.k = o.value("k", p.k);
    p.w = o.value("w", p.w);
    p.c = o.value("c", p.c);
    return std::make_unique<Storm>(p, set);
  }
  throw ContractViolation("optimizer: unknown name '" + name + "'");
}

OptimizerSpec build_optimizer_spec(const json& o, std::size_t idx, Index d,
                                   const json& global_set) {
  require(o.is_object() && o.contains("name"),
          "optimizers[" + std::to_string(idx) + "]: expected object with 'name'");
  OptimizerSpec spec;
  spec.raw = o;
  const std::string name = o.at("name").get<std::string>();
  spec.label = o.value("label", name + (idx > 0 ? "_" + std::to_string(idx) : ""));
  require(valid_label(spec.label),
          "optimizers[" + std::to_string(idx) + "]: label must be [A-Za-z0-9_.-]+");
  spec.X = parse_feasible_set(o.contains("feasible_set") ? o.at("feasible_set") : global_set, d);
  if (o.contains("x1")) spec.x1 = json_to_vector(o.at("x1"), d, "x1");

  if (name == "super_adam") {
    spec.is_superadam = true;
    SuperAdamConfig& sa = spec.sa;
    sa.schedule = Schedule(o.value("tau", 1), o.value("k", 1.0), o.value("m", 100.0),
                           o.value("c", 40.0), o.value("gamma", 1e-3),
                           o.value("alpha_cap", 0.9));
    sa.matrix_case = parse_matrix_case(o.value("matrix_case", std::string("case1")));
    sa.lambda = o.value("lambda", 5e-4);
    sa.matrix_beta = o.value("beta", 0.999);
    sa.matrix_beta1 = o.value("beta1", 0.9);
    sa.matrix_beta2 = o.value("beta2", 0.999);
    sa.feasible_set = spec.X;
    sa.x1 = spec.x1;
    const std::string mode = o.value("output_mode", std::string("last_iterate"));
    if (mode == "last_iterate") sa.output_mode = OutputMode::LastIterate;
    else if (mode == "uniform_random") sa.output_mode = OutputMode::UniformRandomIterate;
    else throw ContractViolation("output_mode: unknown value '" + mode + "'");
    sa.reuse_estimator_sample = o.value("reuse_estimator_sample", false);
  } else {
    spec.make(spec.X);  // constructs once to surface parameter errors early
  }
  return spec;
}

std::vector<std::pair<double, double>> decade_checkpoints(long T) {
  std::vector<std::pair<double, double>> out;
  for (double c = 10.0; c < static_cast<double>(T); c *= 10.0) out.emplace_back(c, 0.0);
  out.emplace_back(static_cast<double>(T), 0.0);
  return out;
}

struct CellTask {
  std::size_t opt_idx = 0;
  std::size_t seed_idx = 0;
};

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j, std::vector<std::string>& errors) {
  ExperimentConfig cfg;
  if (!j.is_object()) {
    errors.push_back("config: expected a JSON object");
    return cfg;
  }
  if (!j.contains("problem") || !j.at("problem").is_object())
    errors.push_back("problem: missing or not an object");
  else
    cfg.problem = j.at("problem");

  if (!j.contains("optimizers") || !j.at("optimizers").is_array() || j.at("optimizers").empty())
    errors.push_back("optimizers: empty");
  else
    cfg.optimizers = j.at("optimizers").get<std::vector<json>>();

  cfg.T = j.value("T", 1000L);
  if (cfg.T < 1) errors.push_back("T: must be >= 1");

  if (j.contains("seeds")) {
    if (!j.at("seeds").is_array() || j.at("seeds").empty())
      errors.push_back("seeds: must be a non-empty array");
    else
      for (const auto& s : j.at("seeds")) cfg.seeds.push_back(s.get<std::uint64_t>());
  } else {
    errors.push_back("seeds: missing");
  }

  cfg.record_every = j.value("record_every", 1L);
  if (cfg.record_every < 1 || (cfg.T >= 1 && cfg.record_every > cfg.T))
    errors.push_back("record_every: must be in [1, T]");

  if (j.contains("lemma_checks")) {
    const auto& lc = j.at("lemma_checks");
    if (lc.is_string()) {
      const std::string v = lc.get<std::string>();
      if (v == "off") cfg.lemma_checks = LemmaCheckMode::Off;
      else if (v == "deterministic_only") cfg.lemma_checks = LemmaCheckMode::DeterministicOnly;
      else errors.push_back("lemma_checks: unknown value '" + v + "'");
    } else if (lc.is_object() && lc.contains("monte_carlo")) {
      cfg.lemma_checks = LemmaCheckMode::MonteCarlo;
      cfg.mc_resamples = lc.at("monte_carlo").value("n_resamples", 10000L);
      cfg.mc_max_states = lc.at("monte_carlo").value("max_states", 50L);
      if (cfg.mc_resamples < 2) errors.push_back("lemma_checks.monte_carlo.n_resamples: must be >= 2");
      if (cfg.mc_max_states < 1) errors.push_back("lemma_checks.monte_carlo.max_states: must be >= 1");
    } else {
      errors.push_back("lemma_checks: expected 'off', 'deterministic_only' or {monte_carlo:{...}}");
    }
  }

  if (j.contains("feasible_set")) cfg.feasible_set = j.at("feasible_set");

  cfg.out_dir = j.value("out", std::string("results"));
  if (cfg.out_dir.empty()) errors.push_back("out: must be a non-empty path");
  cfg.workers = j.value("workers", 1);
  if (cfg.workers < 1) errors.push_back("workers: must be >= 1");
  return cfg;
}

std::string csv_row(const RunRecord& r) {
  std::string s = std::to_string(r.t);
  for (const double v : {r.f, r.grad_norm, r.est_err, r.step_norm, r.Mt, r.gradmap_norm,
                         r.condH, r.mu, r.alpha, r.b1_slack}) {
    s += ',';
    s += fmt17(v);
  }
  return s;
}

void write_csv(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  out << kCsvHeader << '\n';
  for (const auto& r : records) out << csv_row(r) << '\n';
  if (!out) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

namespace {

// Per-cell execution. Everything below is deterministic in (spec, seed).
CellResult run_cell(const ExperimentConfig& cfg, const OptimizerSpec& spec,
                    const StochasticOracle& problem, std::uint64_t seed, bool keep_records) {
  CellResult cell;
  cell.label = spec.label;
  cell.seed = seed;
  cell.csv_path =
      (std::filesystem::path(cfg.out_dir) / (spec.label + "__seed" + std::to_string(seed) + ".csv"))
          .string();

  CountingOracle counting(problem);
  const Index d = problem.dim();
  std::vector<RunRecord> rows;
  rows.reserve(static_cast<std::size_t>(cfg.T / cfg.record_every + 2));

  const auto L = problem.smoothness();
  const bool b1_on = cfg.lemma_checks != LemmaCheckMode::Off && L.has_value();

  if (spec.is_superadam) {
    SuperAdamConfig sa = spec.sa;
    sa.T = cfg.T;
    sa.seed = seed;

    // Frozen states for the Monte-Carlo recursion checks, evenly spread.
    struct Frozen {
      long t;
      Vector x, x_tilde, g;
      double mu, alpha;
    };
    std::vector<Frozen> frozen;
    const long mc_stride =
        std::max<long>(1, cfg.T / std::max<long>(1, cfg.mc_max_states));

    RunOptions opts;
    opts.record_every = cfg.record_every;
    opts.with_b1_slack = b1_on;
    opts.store_records = false;
    opts.store_iterates = false;
    opts.record_sink = [&rows](const RunRecord& r) { rows.push_back(r); };
    if (cfg.lemma_checks == LemmaCheckMode::MonteCarlo) {
      opts.state_sink = [&](const StepState& st) {
        if ((st.t - 1) % mc_stride == 0 &&
            frozen.size() < static_cast<std::size_t>(cfg.mc_max_states))
          frozen.push_back(Frozen{st.t, st.x, st.x_tilde, st.g, st.mu, st.alpha_next});
      };
    }

    const Trajectory traj = run(counting, sa, opts);
    cell.status = traj.status;
    cell.grad_calls_estimator = traj.estimator_grad_calls;
    cell.grad_calls_matrix = traj.matrix_grad_calls;
    cell.warnings = traj.warnings;

    if (cfg.lemma_checks == LemmaCheckMode::MonteCarlo && problem.noise_sigma().has_value() &&
        L.has_value()) {
      SeededRng mc_rng = SeededRng(seed).split(kMcStream);
      for (const auto& fs : frozen) {
        const auto check =
            check_estimator_lemma_mc(problem, sa.schedule.tau, fs.x, fs.x_tilde, fs.g, fs.mu,
                                     fs.alpha, cfg.mc_resamples, mc_rng);
        ++cell.mc_checked;
        if (!check.pass) ++cell.mc_failures;
      }
    }
  } else {
    auto opt = spec.make(spec.X);
    SeededRng rng = SeededRng(seed).split(kSampleStream);
    Vector x1 = spec.x1.size() == 0 ? euclidean_project(Vector::Zero(d), spec.X) : spec.x1;
    opt->init(std::move(x1), counting, rng);

    for (long t = 1; t <= cfg.T; ++t) {
      const Vector x_t = opt->x();
      opt->step(counting, rng);
      if (!all_finite(opt->x())) {
        cell.status = RunStatus::AbortedNonFinite;
        break;
      }
      const bool record_now = ((t - 1) % cfg.record_every == 0) || t == cfg.T;
      if (!record_now) continue;
      const BaselineStepView& view = opt->view();
      RunRecord row;
      row.t = t;
      row.f = problem.value(x_t);
      const Vector grad_full = problem.full_grad(x_t);
      row.grad_norm = grad_full.norm();
      row.est_err = (grad_full - view.g_used).norm();
      const MirrorStepResult ms = mirror_step(x_t, view.g_used, view.H, view.gamma, spec.X);
      row.step_norm = ms.step_norm;
      // rho for baselines is the per-step smallest eigenvalue of the
      // equivalent H (no uniform lambda floor exists for these methods).
      row.Mt = measure_Mt(row.est_err, row.step_norm, view.H.smallest_eigenvalue(), view.gamma);
      row.gradmap_norm = gradient_mapping(x_t, grad_full, view.H, view.gamma, spec.X);
      row.condH = view.H.spectral_norm() / view.H.smallest_eigenvalue();
      row.h_norm = view.H.spectral_norm();
      row.mu = 1.0;
      row.alpha = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(row);
    }
    cell.grad_calls_estimator = counting.stoch_grad_calls;
  }

  cell.grad_calls_total = counting.stoch_grad_calls;
  cell.rows = static_cast<long>(rows.size());
  if (!rows.empty()) {
    cell.final_f = rows.back().f;
    cell.final_grad_norm = rows.back().grad_norm;
    double mt_sum = 0.0;
    auto ckpts = decade_checkpoints(cfg.T);
    std::size_t next_ck = 0;
    long counted = 0;
    for (const auto& r : rows) {
      mt_sum += r.Mt;
      ++counted;
      if (r.gradmap_norm > r.Mt * (1.0 + kChainSlack)) ++cell.chain_violations;
      if (b1_on && !std::isnan(r.b1_slack)) {
        ++cell.b1_checked;
        cell.b1_min_slack = std::min(cell.b1_min_slack, r.b1_slack);
        if (r.b1_slack < -1e-9) ++cell.b1_violations;
      }
      while (next_ck < ckpts.size() && static_cast<double>(r.t) >= ckpts[next_ck].first) {
        ckpts[next_ck].second = mt_sum / static_cast<double>(counted);
        ++next_ck;
      }
    }
    cell.avg_Mt = mt_sum / static_cast<double>(counted);
    // Prefix averages are exact only with record_every == 1.
    if (cfg.record_every == 1)
      cell.mt_series.assign(ckpts.begin(), ckpts.begin() + static_cast<long>(next_ck));
  }
  write_csv(rows, cell.csv_path);
  if (keep_records) cell.records = std::move(rows);
  return cell;
}

json theorem_bound_entry(const OptimizerSpec& spec, const ExperimentConfig& cfg,
                         const StochasticOracle& problem, double empirical_avg_mt) {
  if (!spec.is_superadam) return nullptr;
  const auto L = problem.smoothness();
  const auto sigma = problem.noise_sigma();
  const auto f_star = problem.value_lower_bound();
  if (!L || !sigma || !f_star) return nullptr;

  const SuperAdamConfig& sa = spec.sa;
  Vector x1 = sa.x1.size() == 0 ? euclidean_project(Vector::Zero(problem.dim()), sa.feasible_set)
                                : sa.x1;
  TheoremConstants cs;
  cs.f_x1 = problem.value(x1);
  cs.f_star = *f_star;
  cs.rho = sa.lambda;
  cs.gamma = sa.schedule.gamma;
  cs.k = sa.schedule.k;
  cs.m = sa.schedule.m;
  cs.c = sa.schedule.c;
  cs.sigma = *sigma;
  cs.L = *L;

  json out;
  out["tau"] = sa.schedule.tau;
  const auto violations = sa.schedule.tau == 1 ? theorem1_condition_violations(cs)
                                               : theorem2_condition_violations(cs);
  if (!violations.empty()) {
    out["applicable"] = false;
    out["violations"] = violations;
    return out;
  }
  const double bound = sa.schedule.tau == 1 ? theorem1_bound(cs, static_cast<double>(cfg.T))
                                            : theorem2_bound(cs, static_cast<double>(cfg.T));
  out["applicable"] = true;
  out["value_at_T"] = bound;
  out["empirical_avg_Mt"] = empirical_avg_mt;
  out["satisfied"] = empirical_avg_mt <= bound;
  return out;
}

}  // namespace

std::vector<std::string> validate_experiment(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  Index d = -1;
  try {
    const auto problem = make_problem(cfg.problem);
    d = problem->dim();
  } catch (const std::exception& e) {
    errors.emplace_back(e.what());
  }
  std::set<std::string> labels;
  for (std::size_t i = 0; i < cfg.optimizers.size(); ++i) {
    try {
      const auto spec = build_optimizer_spec(cfg.optimizers[i], i, d, cfg.feasible_set);
      if (!labels.insert(spec.label).second)
        errors.push_back("optimizers: duplicate label '" + spec.label + "'");
      if (spec.is_superadam && d >= 0) {
        SuperAdamConfig sa = spec.sa;
        sa.T = cfg.T;
        for (const auto& e : sa.validate(d))
          errors.push_back("optimizers[" + std::to_string(i) + "]: " + e);
      }
    } catch (const std::exception& e) {
      errors.push_back("optimizers[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return errors;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool keep_records) {
  const auto problem = make_problem(cfg.problem);
  const Index d = problem->dim();

  std::vector<OptimizerSpec> specs;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < cfg.optimizers.size(); ++i) {
    specs.push_back(build_optimizer_spec(cfg.optimizers[i], i, d, cfg.feasible_set));
    require(labels.insert(specs.back().label).second,
            "optimizers: duplicate label '" + specs.back().label + "'");
  }

  std::filesystem::create_directories(cfg.out_dir);

  std::vector<CellTask> tasks;
  for (std::size_t oi = 0; oi < specs.size(); ++oi)
    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) tasks.push_back({oi, si});

  std::vector<CellResult> cells(tasks.size());
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        cells[i] = run_cell(cfg, specs[tasks[i].opt_idx], *problem, cfg.seeds[tasks[i].seed_idx],
                            keep_records);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(tasks.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ExperimentResult result;
  json summary;
  summary["config"]["problem"] = cfg.problem;
  summary["config"]["T"] = cfg.T;
  summary["config"]["seeds"] = cfg.seeds;
  summary["config"]["record_every"] = cfg.record_every;
  summary["config"]["lemma_checks"] =
      cfg.lemma_checks == LemmaCheckMode::Off
          ? "off"
          : (cfg.lemma_checks == LemmaCheckMode::DeterministicOnly ? "deterministic_only"
                                                                   : "monte_carlo");

  json opt_summaries = json::array();
  for (std::size_t oi = 0; oi < specs.size(); ++oi) {
    json entry;
    entry["label"] = specs[oi].label;
    entry["spec"] = specs[oi].raw;

    double final_f = 0.0, final_g = 0.0, avg_mt = 0.0;
    long chain_violations = 0, b1_checked = 0, b1_violations = 0;
    long mc_checked = 0, mc_failures = 0;
    double b1_min = std::numeric_limits<double>::infinity();
    long calls_total = 0, calls_est = 0, calls_mat = 0;
    bool aborted = false;
    std::vector<std::vector<std::pair<double, double>>> series;
    json per_seed = json::array();

    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
      const CellResult& c = cells[oi * cfg.seeds.size() + si];
      json ps;
      ps["seed"] = c.seed;
      ps["csv"] = c.csv_path;
      ps["status"] = c.status == RunStatus::Completed ? "completed" : "aborted_non_finite";
      ps["final_f"] = c.final_f;
      ps["final_grad_norm"] = c.final_grad_norm;
      ps["avg_Mt"] = c.avg_Mt;
      per_seed.push_back(ps);

      final_f += c.final_f;
      final_g += c.final_grad_norm;
      avg_mt += c.avg_Mt;
      chain_violations += c.chain_violations;
      b1_checked += c.b1_checked;
      b1_violations += c.b1_violations;
      b1_min = std::min(b1_min, c.b1_min_slack);
      mc_checked += c.mc_checked;
      mc_failures += c.mc_failures;
      calls_total += c.grad_calls_total;
      calls_est += c.grad_calls_estimator;
      calls_mat += c.grad_calls_matrix;
      aborted = aborted || c.status != RunStatus::Completed;
      if (!c.mt_series.empty()) series.push_back(c.mt_series);
      if (!c.warnings.empty() && si == 0) entry["warnings"] = c.warnings;
      if (c.status != RunStatus::Completed) result.exit_code = 2;
    }
    const double ns = static_cast<double>(cfg.seeds.size());
    entry["per_seed"] = per_seed;
    entry["final_f_mean"] = final_f / ns;
    entry["final_grad_norm_mean"] = final_g / ns;
    entry["avg_Mt_mean"] = avg_mt / ns;
    entry["chain_violations"] = chain_violations;
    entry["grad_calls"] = {{"total", calls_total},
                           {"estimator", calls_est},
                           {"matrix", calls_mat}};
    entry["aborted"] = aborted;
    if (b1_checked > 0)
      entry["b1"] = {{"checked", b1_checked},
                     {"violations", b1_violations},
                     {"min_slack", b1_min}};
    if (mc_checked > 0) entry["mc"] = {{"checked", mc_checked}, {"failures", mc_failures}};

    // Seed-averaged prefix-average series and its log-log slope.
    entry["slope"] = nullptr;
    if (series.size() == cfg.seeds.size() && !series.empty()) {
      std::vector<std::pair<double, double>> avg_series;
      for (std::size_t p = 0; p < series.front().size(); ++p) {
        double acc = 0.0;
        bool complete = true;
        for (const auto& s : series) {
          if (p >= s.size()) { complete = false; break; }
          acc += s[p].second;
        }
        if (complete) avg_series.emplace_back(series.front()[p].first, acc / ns);
      }
      json js = json::array();
      for (const auto& [Tc, v] : avg_series) js.push_back({Tc, v});
      entry["mt_series_seed_avg"] = js;
      try {
        entry["slope"] = slope_estimate(avg_series);
      } catch (const ContractViolation&) {
        // insufficient span; slope stays null
      }
    }

    entry["theorem_bound"] = theorem_bound_entry(specs[oi], cfg, *problem, avg_mt / ns);
    opt_summaries.push_back(entry);
  }
  summary["optimizers"] = opt_summaries;

  const auto summary_path = std::filesystem::path(cfg.out_dir) / "summary.json";
  std::ofstream out(summary_path, std::ios::binary);
  if (!out) throw std::runtime_error("run_experiment: cannot open '" + summary_path.string() + "'");
  out << summary.dump(2) << '\n';
  require(bool(out), "run_experiment: write failed for summary.json");

  result.summary = std::move(summary);
  result.cells = std::move(cells);
  return result;
}

CompareReport compare_report(const std::vector<json>& summaries) {
  require(!summaries.empty(), "compare_report: need at least one summary");
  const json& problem = summaries.front().at("config").at("problem");
  for (const auto& s : summaries)
    require(s.at("config").at("problem") == problem,
            "compare_report: summaries describe different problems");

  struct Row {
    std::string label;
    double final_f, avg_mt;
    json slope;
    long calls;
  };
  std::vector<Row> rows;
  for (const auto& s : summaries)
    for (const auto& o : s.at("optimizers"))
      rows.push_back(Row{o.at("label").get<std::string>(), o.at("final_f_mean").get<double>(),
                         o.at("avg_Mt_mean").get<double>(), o.at("slope"),
                         o.at("grad_calls").at("total").get<long>()});

  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8g", v);
    return std::string(buf);
  };
  auto slope_str = [&](const json& s) { return s.is_null() ? std::string("-") : fmt(s.get<double>()); };

  CompareReport rep;
  rep.markdown = "| optimizer | final_f | avg_Mt | slope | grad_calls |\n"
                 "|---|---|---|---|---|\n";
  rep.csv = "optimizer,final_f,avg_Mt,slope,grad_calls\n";
  for (const auto& r : rows) {
    rep.markdown += "| " + r.label + " | " + fmt(r.final_f) + " | " + fmt(r.avg_mt) + " | " +
                    slope_str(r.slope) + " | " + std::to_string(r.calls) + " |\n";
    rep.csv += r.label + "," + fmt(r.final_f) + "," + fmt(r.avg_mt) + "," + slope_str(r.slope) +
               "," + std::to_string(r.calls) + "\n";
  }
  return rep;
}

}  // namespace superadam
