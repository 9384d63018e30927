#include "omplab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "omplab/rng.hpp"
#include "omplab/text.hpp"

namespace omplab {

const char* signal_model_name(SignalModel m) {
  switch (m) {
    case SignalModel::kUnitValues: return "unit-values";
    case SignalModel::kGaussianValues: return "gaussian-values";
    case SignalModel::kDecayingValues: return "decaying-values";
  }
  return "?";
}

std::optional<SignalModel> signal_model_from_name(const std::string& name) {
  if (name == "unit-values" || name == "unit") return SignalModel::kUnitValues;
  if (name == "gaussian-values" || name == "gaussian") return SignalModel::kGaussianValues;
  if (name == "decaying-values" || name == "decaying") return SignalModel::kDecayingValues;
  return std::nullopt;
}

SparseVector plant_signal(std::size_t n, std::size_t k, SignalModel model, std::uint64_t seed) {
  if (k > n) throw DimensionError("plant_signal: K larger than N");
  rng::Xoshiro256 support_gen(rng::derive_seed(seed, {rng::purpose_tag("support")}));
  rng::Xoshiro256 value_gen(rng::derive_seed(seed, {rng::purpose_tag("values")}));

  std::vector<std::size_t> support = support_gen.sample_combination(n, k);
  std::vector<double> values(k);
  switch (model) {
    case SignalModel::kUnitValues:
      for (double& v : values) v = value_gen.sign();
      break;
    case SignalModel::kGaussianValues:
      for (double& v : values) {
        do {
          v = value_gen.normal();
        } while (v == 0.0);
      }
      break;
    case SignalModel::kDecayingValues:
      for (std::size_t j = 0; j < k; ++j) {
        values[j] = value_gen.sign() * std::pow(2.0, -static_cast<double>(j));
      }
      break;
  }
  return make_sparse_vector(n, std::move(support), std::move(values));
}

bool operator==(const GridConfig& a, const GridConfig& b) {
  return a.n == b.n && a.m_values == b.m_values && a.k_values == b.k_values &&
         a.trials_per_cell == b.trials_per_cell && a.ensemble == b.ensemble &&
         a.master_seed == b.master_seed && a.signal_model == b.signal_model &&
         a.success_tol == b.success_tol;
}

bool operator==(const GridCell& a, const GridCell& b) {
  return a.m == b.m && a.k == b.k && a.trials == b.trials && a.successes == b.successes &&
         a.mean_iterations == b.mean_iterations &&
         a.mean_relative_error == b.mean_relative_error && a.cell_seed == b.cell_seed &&
         a.trial_seeds == b.trial_seeds;
}

bool operator==(const GridResult& a, const GridResult& b) {
  return a.config == b.config && a.cells == b.cells;
}

namespace {

void validate_config(const GridConfig& c) {
  if (c.n == 0) throw Error("grid config: N must be positive");
  if (c.m_values.empty() || c.k_values.empty()) throw Error("grid config: empty M or K list");
  if (c.trials_per_cell == 0) throw Error("grid config: trials per cell must be at least 1");
  if (c.ensemble == Ensemble::kExplicit) {
    throw Error("grid config: trials need a generated ensemble (bernoulli or gaussian)");
  }
  std::size_t min_m = c.m_values.front();
  for (std::size_t m : c.m_values) {
    if (m == 0 || m > c.n) throw Error("grid config: every M must be in [1, N]");
    min_m = std::min(min_m, m);
  }
  for (std::size_t k : c.k_values) {
    if (k > min_m) throw Error("grid config: every K must be at most min(M values)");
  }
  if (!(c.success_tol >= 0.0)) throw Error("grid config: negative success tolerance");
}

struct TrialOutcome {
  bool success = false;
  std::optional<std::size_t> iterations;
  double relative_error = 0.0;
};

TrialOutcome run_trial(const GridConfig& config, std::size_t m, std::size_t k,
                       std::uint64_t trial_seed) {
  const SensingMatrix phi = config.ensemble == Ensemble::kBernoulli
                                ? gen_bernoulli(m, config.n, trial_seed)
                                : gen_gaussian_normalized(m, config.n, trial_seed);
  const SparseVector x = plant_signal(config.n, k, config.signal_model, trial_seed);
  const Vector y = multiply(phi.data, x.dense());
  const OmpTrace trace = omp_solve(phi, y, StopRule::defaults(y, m));

  TrialOutcome out;
  const RecoveryReport rec = verify_recovery(trace, x, config.success_tol);
  out.relative_error = rec.relative_error;
  out.success = rec.success;
  if (out.success) out.iterations = iterations_to_recovery(trace, x, config.success_tol);
  return out;
}

}  // namespace

GridResult run_recovery_grid(const GridConfig& config, std::size_t workers) {
  validate_config(config);
  if (workers == 0) workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());

  struct Job {
    std::size_t cell = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
  };

  GridResult result;
  result.config = config;
  std::vector<Job> jobs;
  for (std::size_t m : config.m_values) {
    for (std::size_t k : config.k_values) {
      GridCell cell;
      cell.m = m;
      cell.k = k;
      cell.trials = config.trials_per_cell;
      cell.cell_seed = rng::derive_seed(config.master_seed,
                                        {rng::purpose_tag("grid-cell"), m, k});
      for (std::size_t t = 0; t < config.trials_per_cell; ++t) {
        const std::uint64_t trial_seed =
            rng::derive_seed(cell.cell_seed, {rng::purpose_tag("trial"), t});
        cell.trial_seeds.push_back(trial_seed);
        jobs.push_back(Job{result.cells.size(), t, trial_seed});
      }
      result.cells.push_back(std::move(cell));
    }
  }

  // Every job lands in its preassigned slot; aggregation below is
  // sequential, so the result does not depend on scheduling.
  std::vector<TrialOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker_loop = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        const Job& job = jobs[i];
        outcomes[i] =
            run_trial(config, result.cells[job.cell].m, result.cells[job.cell].k, job.seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    worker_loop();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker_loop);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> iter_sum(result.cells.size(), 0.0);
  std::vector<std::size_t> iter_count(result.cells.size(), 0);
  std::vector<double> err_sum(result.cells.size(), 0.0);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    GridCell& cell = result.cells[jobs[i].cell];
    const TrialOutcome& out = outcomes[i];
    if (out.success) ++cell.successes;
    if (out.success && out.iterations) {
      iter_sum[jobs[i].cell] += static_cast<double>(*out.iterations);
      ++iter_count[jobs[i].cell];
    }
    err_sum[jobs[i].cell] += out.relative_error;
  }
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    GridCell& cell = result.cells[c];
    cell.mean_iterations =
        iter_count[c] == 0 ? 0.0 : iter_sum[c] / static_cast<double>(iter_count[c]);
    cell.mean_relative_error =
        cell.trials == 0 ? 0.0 : err_sum[c] / static_cast<double>(cell.trials);
  }
  return result;
}

std::optional<std::size_t> iterations_to_recovery(const OmpTrace& trace, const SparseVector& x,
                                                  double tol) {
  const Vector xd = x.dense();
  const double xnorm = std::max(x.norm(), 1e-30);
  for (std::size_t l = 0; l <= trace.steps.size(); ++l) {
    const auto lambda = support_at(trace, l);
    bool contained = true;
    for (std::size_t idx : x.support) {
      if (std::find(lambda->begin(), lambda->end(), idx) == lambda->end()) {
        contained = false;
        break;
      }
    }
    if (!contained) continue;
    const Vector xl = reconstruct(trace, l);
    double diff = 0.0;
    for (std::size_t i = 0; i < xd.size(); ++i) {
      const double d = xl[i] - xd[i];
      diff += d * d;
    }
    if (std::sqrt(diff) / xnorm <= tol) return l;
  }
  return std::nullopt;
}

ScalingFit fit_measurement_scaling(const GridResult& result, double threshold) {
  const GridConfig& config = result.config;
  if (config.n < 3) throw Error("fit_measurement_scaling: N too small for log log N");

  std::vector<std::size_t> ms = config.m_values;
  std::sort(ms.begin(), ms.end());

  ScalingFit fit;
  fit.threshold = threshold;
  fit.n = config.n;

  std::vector<std::size_t> ks = config.k_values;
  std::sort(ks.begin(), ks.end());
  for (std::size_t k : ks) {
    if (k == 0) continue;  // log K undefined; zero signals always succeed
    std::optional<std::size_t> m_star;
    bool some_below = false;
    for (std::size_t m : ms) {
      double rate = 0.0;
      for (const GridCell& cell : result.cells) {
        if (cell.m == m && cell.k == k) rate = cell.success_rate();
      }
      if (rate >= threshold) {
        m_star = m;
        break;
      }
      some_below = true;
    }
    if (!m_star || !some_below) {
      fit.excluded_k.push_back(k);
      continue;
    }
    fit.entries.push_back(KCritical{k, *m_star, false});
  }

  // Isotonic pass: M* cannot drop as K grows.
  for (std::size_t i = 1; i < fit.entries.size(); ++i) {
    if (fit.entries[i].m_star < fit.entries[i - 1].m_star) {
      fit.entries[i].m_star = fit.entries[i - 1].m_star;
      fit.entries[i].isotonic_adjusted = true;
      fit.isotonic_applied = true;
    }
  }

  if (fit.entries.size() < 3) {
    throw Error("fit_measurement_scaling: need at least 3 usable K, have " +
                std::to_string(fit.entries.size()));
  }

  const double loglogn = std::log(std::log(static_cast<double>(config.n)));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(fit.entries.size());
  for (const KCritical& e : fit.entries) {
    const double xv = std::log(static_cast<double>(e.k));
    const double yv = std::log(static_cast<double>(e.m_star)) - loglogn;
    sx += xv;
    sy += yv;
    sxx += xv * xv;
    sxy += xv * yv;
  }
  const double denom = count * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) throw Error("fit_measurement_scaling: degenerate K values");
  fit.alpha = (count * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.alpha * sx) / count;
  fit.a = std::exp(intercept);

  double ss = 0.0;
  for (const KCritical& e : fit.entries) {
    const double xv = std::log(static_cast<double>(e.k));
    const double yv = std::log(static_cast<double>(e.m_star)) - loglogn;
    const double r = yv - (intercept + fit.alpha * xv);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / count);
  return fit;
}

ConcentrationReport coherence_concentration_study(std::size_t m, std::size_t n,
                                                  std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error("coherence_concentration_study: need at least one sample");
  ConcentrationReport rep;
  rep.m = m;
  rep.n = n;
  rep.samples = samples;
  rep.seed = seed;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::uint64_t sample_seed =
        rng::derive_seed(seed, {rng::purpose_tag("concentration"), s});
    rep.mu_values.push_back(coherence(gen_bernoulli(m, n, sample_seed)).mu);
  }

  std::vector<double> sorted = rep.mu_values;
  std::sort(sorted.begin(), sorted.end());
  // Nearest-rank quantile: smallest value with at least p*n samples at
  // or below it.
  auto quantile = [&](double p) {
    const double rank = std::ceil(p * static_cast<double>(sorted.size()));
    const std::size_t idx = rank <= 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
    return sorted[std::min(idx, sorted.size() - 1)];
  };
  for (double p : rep.quantile_probs) rep.quantile_values.push_back(quantile(p));
  rep.implied_c_mu = quantile(0.95) * std::sqrt(static_cast<double>(m)) /
                     std::sqrt(std::log(static_cast<double>(n)));
  return rep;
}

std::string grid_to_csv(const GridResult& result) {
  std::ostringstream out;
  const GridConfig& c = result.config;
  out << "# omplab-grid v1\n";
  out << "# n " << c.n << "\n";
  out << "# m-values";
  for (std::size_t m : c.m_values) out << ' ' << m;
  out << "\n# k-values";
  for (std::size_t k : c.k_values) out << ' ' << k;
  out << "\n# trials-per-cell " << c.trials_per_cell << "\n";
  out << "# ensemble " << ensemble_name(c.ensemble) << "\n";
  out << "# master-seed " << c.master_seed << "\n";
  out << "# signal-model " << signal_model_name(c.signal_model) << "\n";
  out << "# success-tol " << g17(c.success_tol) << "\n";
  out << "m,k,trials,successes,success_rate,mean_iters,mean_rel_err,seed\n";
  for (const GridCell& cell : result.cells) {
    out << cell.m << ',' << cell.k << ',' << cell.trials << ',' << cell.successes << ','
        << g17(cell.success_rate()) << ',' << g17(cell.mean_iterations) << ','
        << g17(cell.mean_relative_error) << ',' << cell.cell_seed << "\n";
  }
  return out.str();
}

GridResult grid_from_csv(const std::string& text, const std::string& context) {
  std::istringstream in(text);
  std::string line;
  GridConfig config;
  std::vector<GridCell> cells;
  bool saw_header = false;
  bool saw_columns = false;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto tokens = split_ws(line.substr(1));
      if (tokens.empty()) continue;
      if (tokens[0] == "omplab-grid") {
        saw_header = true;
      } else if (tokens[0] == "n" && tokens.size() == 2) {
        config.n = parse_uint(tokens[1], context);
      } else if (tokens[0] == "m-values") {
        config.m_values.clear();
        for (std::size_t i = 1; i < tokens.size(); ++i) {
          config.m_values.push_back(parse_uint(tokens[i], context));
        }
      } else if (tokens[0] == "k-values") {
        config.k_values.clear();
        for (std::size_t i = 1; i < tokens.size(); ++i) {
          config.k_values.push_back(parse_uint(tokens[i], context));
        }
      } else if (tokens[0] == "trials-per-cell" && tokens.size() == 2) {
        config.trials_per_cell = parse_uint(tokens[1], context);
      } else if (tokens[0] == "ensemble" && tokens.size() == 2) {
        const auto ens = ensemble_from_name(tokens[1]);
        if (!ens) throw IoError(context + ": unknown ensemble '" + tokens[1] + "'");
        config.ensemble = *ens;
      } else if (tokens[0] == "master-seed" && tokens.size() == 2) {
        config.master_seed = parse_uint(tokens[1], context);
      } else if (tokens[0] == "signal-model" && tokens.size() == 2) {
        const auto model = signal_model_from_name(tokens[1]);
        if (!model) throw IoError(context + ": unknown signal model '" + tokens[1] + "'");
        config.signal_model = *model;
      } else if (tokens[0] == "success-tol" && tokens.size() == 2) {
        config.success_tol = parse_double(tokens[1], context);
      }
      continue;
    }
    if (!saw_columns) {
      if (line != "m,k,trials,successes,success_rate,mean_iters,mean_rel_err,seed") {
        throw IoError(context + ": unexpected column header '" + line + "'");
      }
      saw_columns = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 8) throw IoError(context + ": expected 8 fields, got '" + line + "'");
    GridCell cell;
    cell.m = parse_uint(fields[0], context);
    cell.k = parse_uint(fields[1], context);
    cell.trials = parse_uint(fields[2], context);
    cell.successes = parse_uint(fields[3], context);
    cell.mean_iterations = parse_double(fields[5], context);
    cell.mean_relative_error = parse_double(fields[6], context);
    cell.cell_seed = parse_uint(fields[7], context);
    for (std::size_t t = 0; t < cell.trials; ++t) {
      cell.trial_seeds.push_back(rng::derive_seed(cell.cell_seed, {rng::purpose_tag("trial"), t}));
    }
    cells.push_back(std::move(cell));
  }
  if (!saw_header || !saw_columns) throw IoError(context + ": not an omplab-grid v1 CSV");

  GridResult result;
  result.config = std::move(config);
  result.cells = std::move(cells);
  return result;
}

std::string to_text(const ScalingFit& fit) {
  std::ostringstream out;
  out << "omplab-scaling-fit v1\n";
  out << "threshold " << g17(fit.threshold) << "\n";
  out << "n " << fit.n << "\n";
  for (const KCritical& e : fit.entries) {
    out << "k " << e.k << " m-star " << e.m_star << " isotonic-adjusted "
        << (e.isotonic_adjusted ? "true" : "false") << "\n";
  }
  for (std::size_t k : fit.excluded_k) out << "excluded-k " << k << "\n";
  out << "isotonic-applied " << (fit.isotonic_applied ? "true" : "false") << "\n";
  out << "alpha " << g17(fit.alpha) << "\n";
  out << "a " << g17(fit.a) << "\n";
  out << "residual " << g17(fit.residual) << "\n";
  return out.str();
}

std::string to_text(const ConcentrationReport& rep) {
  std::ostringstream out;
  out << "omplab-concentration v1\n";
  out << "m " << rep.m << "\n";
  out << "n " << rep.n << "\n";
  out << "samples " << rep.samples << "\n";
  out << "seed " << rep.seed << "\n";
  for (std::size_t i = 0; i < rep.quantile_probs.size(); ++i) {
    out << "quantile " << g17(rep.quantile_probs[i]) << " " << g17(rep.quantile_values[i])
        << "\n";
  }
  out << "implied-c-mu " << g17(rep.implied_c_mu) << "\n";
  for (double mu : rep.mu_values) out << "mu " << g17(mu) << "\n";
  return out.str();
}

void export_grid_csv(const std::string& path, const GridResult& result) {
  write_file(path, grid_to_csv(result));
}

GridResult import_grid_csv(const std::string& path) {
  return grid_from_csv(read_file(path), path);
}

void export_text_file(const std::string& path, const std::string& text) {
  write_file(path, text);
}

}  // namespace omplab
