#include "omplab/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "omplab/suites.hpp"
#include "omplab/svg.hpp"
#include "omplab/text.hpp"

namespace omplab {

namespace {

// Every verb funnels its fully resolved options through here so a run
// can be reproduced from its stderr line alone.
void echo_config(const std::string& verb,
                 const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ostringstream out;
  out << "config: verb=" << verb;
  for (const auto& [k, v] : kv) out << ' ' << k << '=' << v;
  std::cerr << out.str() << "\n";
}

std::uint64_t default_seed(std::uint64_t fallback) {
  if (const char* env = std::getenv("OMPLAB_SEED")) {
    try {
      return parse_uint(env, "OMPLAB_SEED");
    } catch (const Error&) {
      throw UsageError("OMPLAB_SEED is set but not an unsigned integer");
    }
  }
  return fallback;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  for (const std::string& token : split(text, ',')) {
    if (token.empty()) throw UsageError(what + ": empty element in list '" + text + "'");
    out.push_back(parse_uint(token, what));
  }
  return out;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

// Signal file: first line N, then one "index value" pair per line.
SparseVector read_signal_file(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::optional<std::size_t> n;
  std::vector<std::pair<std::size_t, double>> pairs;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (!n) {
      if (tokens.size() != 1) throw IoError(path + ": first line must be the dimension N");
      n = parse_uint(tokens[0], path);
      continue;
    }
    if (tokens.size() != 2) throw IoError(path + ": expected 'index value', got '" + line + "'");
    pairs.emplace_back(parse_uint(tokens[0], path), parse_double(tokens[1], path));
  }
  if (!n) throw IoError(path + ": empty signal file");
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::size_t> support;
  std::vector<double> values;
  for (const auto& [idx, val] : pairs) {
    support.push_back(idx);
    values.push_back(val);
  }
  try {
    return make_sparse_vector(*n, std::move(support), std::move(values));
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void emit_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

struct CheckOptions {
  std::string claim;
  std::size_t m = 0;
  std::size_t n = 0;
  std::string k_list;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t l_max = 3;
  std::size_t p_max = 2;
  std::size_t order_cap = 8;
  std::uint64_t cap = 1000000;
  double tol = 1e-8;
  double const_big_c = 2.0e5;
  double const_small_c = 1.0e-6;
  std::string matrix_path;
  std::string out_path;
};

int run_check(const CheckOptions& opt) {
  std::optional<SensingMatrix> fixed;
  if (!opt.matrix_path.empty()) fixed = read_matrix_file(opt.matrix_path);

  TheoremConstants constants;
  constants.big_c = opt.const_big_c;
  constants.small_c = opt.const_small_c;

  const std::uint64_t seed = opt.seed_given ? opt.seed : default_seed(opt.seed);

  std::vector<std::pair<std::string, std::string>> kv{
      {"claim", opt.claim},
      {"m", std::to_string(fixed ? fixed->m() : opt.m)},
      {"n", std::to_string(fixed ? fixed->n() : opt.n)},
      {"k-values", opt.k_list},
      {"trials", std::to_string(opt.trials)},
      {"seed", std::to_string(seed)},
      {"l-max", std::to_string(opt.l_max)},
      {"p-max", std::to_string(opt.p_max)},
      {"order-cap", std::to_string(opt.order_cap)},
      {"cap", std::to_string(opt.cap)},
      {"tol", g17(opt.tol)},
      {"constant-C", g17(constants.big_c)},
      {"constant-c", g17(constants.small_c)},
      {"matrix", opt.matrix_path.empty() ? "<generated>" : opt.matrix_path},
  };
  echo_config("check", kv);

  const std::size_t m = fixed ? fixed->m() : opt.m;
  const std::size_t n = fixed ? fixed->n() : opt.n;
  if (m == 0 || n == 0) throw UsageError("check: --m and --n (or --matrix) are required");
  const std::vector<std::size_t> ks = parse_size_list(opt.k_list, "check --k");
  if (ks.empty()) throw UsageError("check: --k must list at least one sparsity");

  if (opt.claim == "theorem-a") {
    suites::TheoremASuiteConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.k_values = ks;
    cfg.instances = opt.trials;
    cfg.seed = seed;
    cfg.fixed_matrix = fixed;
    const auto result = suites::run_theorem_a_suite(cfg);
    emit_output(result.text(), opt.out_path);
    return result.passed() ? 0 : 1;
  }
  if (opt.claim == "theorem-b") {
    suites::TheoremBSuiteConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.k_values = ks;
    cfg.instances = opt.trials;
    cfg.l_max = opt.l_max;
    cfg.cap = opt.cap;
    cfg.seed = seed;
    cfg.fixed_matrix = fixed;
    const auto result = suites::run_theorem_b_suite(cfg);
    emit_output(result.text(), opt.out_path);
    return result.passed() ? 0 : 1;
  }
  if (opt.claim == "lemma-1" || opt.claim == "lemma-2" || opt.claim == "lemma-3" ||
      opt.claim == "lemmas") {
    suites::LemmaSuiteConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.k_values = ks;
    cfg.instances = opt.trials;
    cfg.p_max = opt.p_max;
    cfg.order_cap = opt.order_cap;
    cfg.cap = opt.cap;
    cfg.seed = seed;
    cfg.constants = constants;
    cfg.fixed_matrix = fixed;
    const auto result = suites::run_lemma_suite(cfg);
    emit_output(result.text(), opt.out_path);
    if (opt.claim == "lemma-1") return result.lemma1a.passed() && result.lemma1b.passed() ? 0 : 1;
    if (opt.claim == "lemma-2") return result.lemma2.passed() ? 0 : 1;
    if (opt.claim == "lemma-3") return result.lemma3.passed() ? 0 : 1;
    return result.passed() ? 0 : 1;
  }
  if (opt.claim == "coherence-recovery") {
    suites::CoherenceRecoverySuiteConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.k_values = ks;
    cfg.trials = opt.trials;
    cfg.tol = opt.tol;
    cfg.seed = seed;
    const auto result = suites::run_coherence_recovery_suite(cfg);
    emit_output(result.text(), opt.out_path);
    return result.passed() ? 0 : 1;
  }
  if (opt.claim == "oracle-equivalence") {
    suites::OracleEquivalenceSuiteConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.k = ks.front();
    cfg.instances = opt.trials;
    cfg.match_tol = opt.tol;
    cfg.seed = seed;
    const auto result = suites::run_oracle_equivalence_suite(cfg);
    emit_output(result.text(), opt.out_path);
    return result.passed() ? 0 : 1;
  }
  throw UsageError("check: unknown claim '" + opt.claim + "'");
}

int dispatch(const std::vector<std::string>& argv) {
  CLI::App app{"omplab: sparse recovery via orthogonal matching pursuit"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate a sensing matrix file");
  std::string gen_ensemble = "bernoulli";
  std::size_t gen_m = 0, gen_n = 0;
  std::uint64_t gen_seed = 0;
  bool gen_seed_given = false;
  std::string gen_out;
  gen->add_option("--ensemble", gen_ensemble, "bernoulli | gaussian")->capture_default_str();
  gen->add_option("--m", gen_m, "measurement count")->required();
  gen->add_option("--n", gen_n, "ambient dimension")->required();
  gen->add_option("--seed", gen_seed, "generator seed")->each([&](const std::string&) {
    gen_seed_given = true;
  });
  gen->add_option("--out", gen_out, "output path")->required();

  // ---- analyze ----
  auto* analyze = app.add_subcommand("analyze", "coherence / RIP analyzers");
  std::string an_matrix;
  bool an_coherence = false;
  std::size_t an_rip_order = 0, an_mc_order = 0;
  std::uint64_t an_trials = 100, an_cap = 1000000, an_seed = 0;
  bool an_seed_given = false;
  std::size_t an_theorem1_k = 0;
  std::string an_out;
  analyze->add_option("--matrix", an_matrix, "omplab-matrix v1 file")->required();
  analyze->add_flag("--coherence", an_coherence, "report mutual coherence");
  analyze->add_option("--rip-order", an_rip_order, "exhaustive RIP constant of this order");
  analyze->add_option("--rip-mc-order", an_mc_order, "Monte Carlo RIP lower bound of this order");
  analyze->add_option("--trials", an_trials, "Monte Carlo trials")->capture_default_str();
  analyze->add_option("--cap", an_cap, "exhaustive subset cap")->capture_default_str();
  analyze->add_option("--seed", an_seed, "Monte Carlo seed")->each([&](const std::string&) {
    an_seed_given = true;
  });
  analyze->add_option("--theorem1-k", an_theorem1_k, "measure recovery-theorem hypotheses at K");
  analyze->add_option("--out", an_out, "write report here instead of stdout");

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "run the pursuit on y = phi x");
  std::string so_matrix, so_signal, so_trace;
  double so_tol = 1e-10;
  std::size_t so_max_iters = 0;
  solve->add_option("--matrix", so_matrix, "omplab-matrix v1 file")->required();
  solve->add_option("--signal", so_signal, "sparse signal file (first line N, then 'index value')")
      ->required();
  solve->add_option("--tol", so_tol, "relative residual tolerance")->capture_default_str();
  solve->add_option("--max-iters", so_max_iters, "iteration cap (default M)");
  solve->add_option("--trace", so_trace, "write the step trace here");

  // ---- check ----
  auto* check = app.add_subcommand("check", "run a multi-instance checker suite");
  CheckOptions co;
  check->add_option("--claim", co.claim,
                    "theorem-a | theorem-b | lemma-1 | lemma-2 | lemma-3 | lemmas | "
                    "coherence-recovery | oracle-equivalence")
      ->required();
  check->add_option("--m", co.m, "measurement count (ignored with --matrix)");
  check->add_option("--n", co.n, "ambient dimension (ignored with --matrix)");
  check->add_option("--k", co.k_list, "comma-separated sparsities")->required();
  check->add_option("--trials", co.trials, "instance count")->required();
  check->add_option("--seed", co.seed, "suite seed")->each([&](const std::string&) {
    co.seed_given = true;
  });
  check->add_option("--l-max", co.l_max, "theorem-b l cap")->capture_default_str();
  check->add_option("--p-max", co.p_max, "lemma sweep p cap")->capture_default_str();
  check->add_option("--order-cap", co.order_cap, "lemma sweep RIP order cap")
      ->capture_default_str();
  check->add_option("--cap", co.cap, "exhaustive subset cap")->capture_default_str();
  check->add_option("--tol", co.tol, "recovery tolerance")->capture_default_str();
  check->add_option("--constant-C", co.const_big_c, "override the RIP-order constant")
      ->capture_default_str();
  check->add_option("--constant-c", co.const_small_c, "override the isometry constant")
      ->capture_default_str();
  check->add_option("--matrix", co.matrix_path, "fixed matrix for every instance");
  check->add_option("--out", co.out_path, "write report here instead of stdout");

  // ---- grid ----
  auto* grid = app.add_subcommand("grid", "Monte Carlo recovery grid over (M, K)");
  std::size_t gr_n = 0;
  std::string gr_m_values, gr_k_values;
  std::size_t gr_trials = 100;
  std::uint64_t gr_seed = 0;
  bool gr_seed_given = false;
  std::string gr_ensemble = "bernoulli", gr_model = "gaussian-values";
  double gr_tol = 1e-8;
  std::size_t gr_workers = 0;
  std::string gr_out;
  grid->add_option("--n", gr_n, "ambient dimension")->required();
  grid->add_option("--m-values", gr_m_values, "comma-separated M list")->required();
  grid->add_option("--k-values", gr_k_values, "comma-separated K list")->required();
  grid->add_option("--trials", gr_trials, "trials per cell")->capture_default_str();
  grid->add_option("--seed", gr_seed, "master seed")->each([&](const std::string&) {
    gr_seed_given = true;
  });
  grid->add_option("--ensemble", gr_ensemble, "bernoulli | gaussian")->capture_default_str();
  grid->add_option("--signal-model", gr_model, "unit-values | gaussian-values | decaying-values")
      ->capture_default_str();
  grid->add_option("--success-tol", gr_tol, "relative recovery tolerance")->capture_default_str();
  grid->add_option("--workers", gr_workers, "worker threads (0 = hardware)");
  grid->add_option("--out", gr_out, "CSV output path")->required();

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "measurement-scaling fit from a grid CSV");
  std::string fi_grid, fi_out;
  double fi_threshold = 0.9;
  fit->add_option("--grid", fi_grid, "grid CSV produced by the grid verb")->required();
  fit->add_option("--threshold", fi_threshold, "success-rate threshold for M*")
      ->capture_default_str();
  fit->add_option("--out", fi_out, "write fit here instead of stdout");

  // ---- plot ----
  auto* plot = app.add_subcommand("plot", "success-rate curves as SVG");
  std::string pl_grid, pl_out;
  plot->add_option("--grid", pl_grid, "grid CSV produced by the grid verb")->required();
  plot->add_option("--out", pl_out, "SVG output path")->required();

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (gen->parsed()) {
    const auto ens = ensemble_from_name(gen_ensemble);
    if (!ens || *ens == Ensemble::kExplicit) {
      throw UsageError("gen: ensemble must be bernoulli or gaussian");
    }
    const std::uint64_t seed = gen_seed_given ? gen_seed : default_seed(0);
    echo_config("gen", {{"ensemble", ensemble_name(*ens)},
                        {"m", std::to_string(gen_m)},
                        {"n", std::to_string(gen_n)},
                        {"seed", std::to_string(seed)},
                        {"out", gen_out}});
    const SensingMatrix phi = *ens == Ensemble::kBernoulli
                                  ? gen_bernoulli(gen_m, gen_n, seed)
                                  : gen_gaussian_normalized(gen_m, gen_n, seed);
    write_matrix_file(gen_out, phi);
    return 0;
  }

  if (analyze->parsed()) {
    const std::uint64_t seed = an_seed_given ? an_seed : default_seed(0);
    echo_config("analyze", {{"matrix", an_matrix},
                            {"coherence", an_coherence ? "true" : "false"},
                            {"rip-order", std::to_string(an_rip_order)},
                            {"rip-mc-order", std::to_string(an_mc_order)},
                            {"trials", std::to_string(an_trials)},
                            {"cap", std::to_string(an_cap)},
                            {"seed", std::to_string(seed)},
                            {"theorem1-k", std::to_string(an_theorem1_k)}});
    const SensingMatrix phi = read_matrix_file(an_matrix);
    std::ostringstream out;
    bool did_something = false;
    if (an_coherence) {
      out << to_text(coherence(phi));
      did_something = true;
    }
    if (an_rip_order > 0) {
      out << to_text(rip_delta_exhaustive(phi, an_rip_order, an_cap));
      did_something = true;
    }
    if (an_mc_order > 0) {
      out << to_text(rip_delta_monte_carlo(phi, an_mc_order, an_trials, seed));
      did_something = true;
    }
    if (an_theorem1_k > 0) {
      out << to_text(theorem1_hypotheses(phi, an_theorem1_k, TheoremConstants{}, an_cap,
                                         an_trials, seed));
      did_something = true;
    }
    if (!did_something) {
      throw UsageError("analyze: pick at least one of --coherence, --rip-order, --rip-mc-order, "
                       "--theorem1-k");
    }
    emit_output(out.str(), an_out);
    return 0;
  }

  if (solve->parsed()) {
    echo_config("solve", {{"matrix", so_matrix},
                          {"signal", so_signal},
                          {"tol", g17(so_tol)},
                          {"max-iters", std::to_string(so_max_iters)},
                          {"trace", so_trace}});
    const SensingMatrix phi = read_matrix_file(so_matrix);
    const SparseVector x = read_signal_file(so_signal);
    if (x.ambient_dim != phi.n()) {
      throw UsageError("solve: signal dimension " + std::to_string(x.ambient_dim) +
                       " does not match matrix N = " + std::to_string(phi.n()));
    }
    const Vector y = multiply(phi.data, x.dense());
    StopRule stop{so_tol * y.norm(), so_max_iters == 0 ? phi.m() : so_max_iters};
    if (stop.max_iterations > phi.m()) {
      throw UsageError("solve: --max-iters cannot exceed M = " + std::to_string(phi.m()));
    }
    const OmpTrace trace = omp_solve(phi, y, stop);
    std::cout << trace_to_text(trace);
    std::cout << to_text(verify_recovery(trace, x, 1e-8));
    if (!so_trace.empty()) write_file(so_trace, trace_to_text(trace));
    return 0;
  }

  if (check->parsed()) return run_check(co);

  if (grid->parsed()) {
    const std::uint64_t seed = gr_seed_given ? gr_seed : default_seed(0);
    const auto ens = ensemble_from_name(gr_ensemble);
    if (!ens || *ens == Ensemble::kExplicit) {
      throw UsageError("grid: ensemble must be bernoulli or gaussian");
    }
    const auto model = signal_model_from_name(gr_model);
    if (!model) throw UsageError("grid: unknown signal model '" + gr_model + "'");

    GridConfig config;
    config.n = gr_n;
    config.m_values = parse_size_list(gr_m_values, "grid --m-values");
    config.k_values = parse_size_list(gr_k_values, "grid --k-values");
    config.trials_per_cell = gr_trials;
    config.ensemble = *ens;
    config.master_seed = seed;
    config.signal_model = *model;
    config.success_tol = gr_tol;

    echo_config("grid", {{"n", std::to_string(config.n)},
                         {"m-values", join_sizes(config.m_values)},
                         {"k-values", join_sizes(config.k_values)},
                         {"trials", std::to_string(config.trials_per_cell)},
                         {"ensemble", ensemble_name(config.ensemble)},
                         {"signal-model", signal_model_name(config.signal_model)},
                         {"success-tol", g17(config.success_tol)},
                         {"seed", std::to_string(seed)},
                         {"workers", std::to_string(gr_workers)},
                         {"out", gr_out}});
    try {
      const GridResult result = run_recovery_grid(config, gr_workers);
      export_grid_csv(gr_out, result);
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return 0;
  }

  if (fit->parsed()) {
    echo_config("fit", {{"grid", fi_grid}, {"threshold", g17(fi_threshold)}});
    const GridResult result = import_grid_csv(fi_grid);
    const ScalingFit scaling = fit_measurement_scaling(result, fi_threshold);
    emit_output(to_text(scaling), fi_out);
    return 0;
  }

  if (plot->parsed()) {
    echo_config("plot", {{"grid", pl_grid}, {"out", pl_out}});
    const GridResult result = import_grid_csv(pl_grid);
    emit_svg_curves(result, pl_out);
    return 0;
  }

  throw UsageError("no verb given");
}

}  // namespace

int run_command(const std::vector<std::string>& argv) {
  try {
    return dispatch(argv);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace omplab
