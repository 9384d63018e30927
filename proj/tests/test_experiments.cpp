#include <doctest.h>

#include <cmath>
#include <set>

#include "omplab/experiments.hpp"
#include "omplab/suites.hpp"
#include "omplab/text.hpp"
#include "test_helpers.hpp"

using namespace omplab;

TEST_CASE("planted signals honor their model") {
  const SparseVector unit = plant_signal(16, 4, SignalModel::kUnitValues, 1);
  REQUIRE(unit.sparsity() == 4);
  for (double v : unit.values) CHECK(std::abs(v) == 1.0);
  std::set<std::size_t> dedup(unit.support.begin(), unit.support.end());
  CHECK(dedup.size() == 4);

  const SparseVector gauss = plant_signal(16, 4, SignalModel::kGaussianValues, 2);
  for (double v : gauss.values) CHECK(v != 0.0);

  const SparseVector decay = plant_signal(16, 4, SignalModel::kDecayingValues, 3);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(std::abs(decay.values[j]) == std::pow(2.0, -static_cast<double>(j)));
  }

  const SparseVector again = plant_signal(16, 4, SignalModel::kUnitValues, 1);
  CHECK(again.support == unit.support);
  CHECK(again.values == unit.values);
}

TEST_CASE("zero-sparsity cells always succeed with zero iterations") {
  GridConfig config;
  config.n = 16;
  config.m_values = {4, 8};
  config.k_values = {0};
  config.trials_per_cell = 10;
  config.master_seed = 7;
  const GridResult result = run_recovery_grid(config, 1);
  for (const GridCell& cell : result.cells) {
    CHECK(cell.successes == cell.trials);
    CHECK(cell.mean_iterations == 0.0);
    CHECK(cell.mean_relative_error == 0.0);
  }
}

TEST_CASE("square near-orthonormal grid at K=1 recovers in one iteration") {
  // Gaussian columns are distinct almost surely, so mu < 1 and the
  // single coefficient always wins the first selection.
  GridConfig config;
  config.n = 8;
  config.m_values = {8};
  config.k_values = {1};
  config.trials_per_cell = 50;
  config.ensemble = Ensemble::kGaussianNormalized;
  config.master_seed = 11;
  const GridResult result = run_recovery_grid(config, 1);
  REQUIRE(result.cells.size() == 1);
  CHECK(result.cells[0].success_rate() == 1.0);
  CHECK(result.cells[0].mean_iterations == 1.0);
}

TEST_CASE("grid results are identical across worker counts") {
  GridConfig config;
  config.n = 24;
  config.m_values = {6, 12};
  config.k_values = {1, 2};
  config.trials_per_cell = 25;
  config.master_seed = 2024;
  const GridResult serial = run_recovery_grid(config, 1);
  const GridResult parallel = run_recovery_grid(config, 4);
  CHECK(serial == parallel);
  CHECK(grid_to_csv(serial) == grid_to_csv(parallel));
}

TEST_CASE("cell counts recount exactly from the exposed trial seeds") {
  GridConfig config;
  config.n = 20;
  config.m_values = {6, 10};
  config.k_values = {1, 2};
  config.trials_per_cell = 15;
  config.master_seed = 404;
  const GridResult result = run_recovery_grid(config, 2);
  for (const GridCell& cell : result.cells) {
    REQUIRE(cell.trial_seeds.size() == cell.trials);
    std::size_t successes = 0;
    for (std::uint64_t trial_seed : cell.trial_seeds) {
      const SensingMatrix phi = gen_bernoulli(cell.m, config.n, trial_seed);
      const SparseVector x = plant_signal(config.n, cell.k, config.signal_model, trial_seed);
      const Vector y = multiply(phi.data, x.dense());
      const OmpTrace trace = omp_solve(phi, y, StopRule::defaults(y, cell.m));
      if (verify_recovery(trace, x, config.success_tol).success) ++successes;
    }
    CHECK(successes == cell.successes);
  }
}

TEST_CASE("grid config validation") {
  GridConfig config;
  config.n = 8;
  config.m_values = {4};
  config.k_values = {5};  // K above min(M)
  config.trials_per_cell = 1;
  CHECK_THROWS_AS(run_recovery_grid(config, 1), Error);
  config.k_values = {1};
  config.trials_per_cell = 0;
  CHECK_THROWS_AS(run_recovery_grid(config, 1), Error);
  config.trials_per_cell = 1;
  config.m_values = {9};  // M above N
  CHECK_THROWS_AS(run_recovery_grid(config, 1), Error);
}

TEST_CASE("iterations to recovery") {
  const SensingMatrix eye = test::identity_sensing(4);
  const SparseVector x = make_sparse_vector(4, {2}, {2.0});
  const OmpTrace trace = omp_solve(eye, multiply(eye.data, x.dense()));
  CHECK(*iterations_to_recovery(trace, x, 1e-8) == 1);

  const SparseVector zero{4, {}, {}};
  const OmpTrace ztrace = omp_solve(eye, Vector{0, 0, 0, 0});
  CHECK(*iterations_to_recovery(ztrace, zero, 1e-8) == 0);

  // Independent recheck by truncation: the reported step is the first
  // whose support contains supp(x) with a small reconstruction error.
  const SensingMatrix phi = gen_bernoulli(16, 32, 3);
  const SparseVector planted = plant_signal(32, 3, SignalModel::kGaussianValues, 3);
  const Vector y = multiply(phi.data, planted.dense());
  const OmpTrace t = omp_solve(phi, y);
  const auto reported = iterations_to_recovery(t, planted, 1e-8);
  REQUIRE(reported.has_value());
  for (std::size_t l = 0; l <= t.steps.size(); ++l) {
    const auto lambda = support_at(t, l);
    bool contained = true;
    for (std::size_t idx : planted.support) {
      bool in = false;
      for (std::size_t s : *lambda) in = in || s == idx;
      contained = contained && in;
    }
    const Vector xl = reconstruct(t, l);
    double diff = 0.0;
    for (std::size_t i = 0; i < xl.size(); ++i) {
      const double d = xl[i] - planted.dense()[i];
      diff += d * d;
    }
    const bool ok = contained && std::sqrt(diff) / planted.norm() <= 1e-8;
    if (l < *reported) {
      CHECK(!ok);
    } else if (l == *reported) {
      CHECK(ok);
    }
  }
}

TEST_CASE("scaling fit recovers constructed exponents") {
  auto synthetic = [](const std::vector<std::size_t>& ks,
                      const std::vector<std::size_t>& ms,
                      const std::function<std::size_t(std::size_t)>& m_star) {
    GridResult result;
    result.config.n = 64;
    result.config.m_values = ms;
    result.config.k_values = ks;
    result.config.trials_per_cell = 100;
    for (std::size_t m : ms) {
      for (std::size_t k : ks) {
        GridCell cell;
        cell.m = m;
        cell.k = k;
        cell.trials = 100;
        cell.successes = m >= m_star(k) ? 100 : 0;
        result.cells.push_back(cell);
      }
    }
    return result;
  };

  // M* = 4K exactly.
  {
    const GridResult r = synthetic({1, 2, 3, 4}, {2, 4, 6, 8, 10, 12, 14, 16},
                                   [](std::size_t k) { return 4 * k; });
    const ScalingFit fit = fit_measurement_scaling(r, 0.9);
    CHECK(fit.alpha == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit.residual <= 1e-9);
  }
  // M* = 2K^2.
  {
    const GridResult r = synthetic({2, 3, 4, 5}, {4, 8, 18, 32, 50, 72},
                                   [](std::size_t k) { return 2 * k * k; });
    const ScalingFit fit = fit_measurement_scaling(r, 0.9);
    CHECK(fit.alpha == doctest::Approx(2.0).epsilon(1e-6));
  }
  // Too few usable K.
  {
    const GridResult r = synthetic({1, 2}, {2, 4, 8}, [](std::size_t k) { return 2 * k; });
    CHECK_THROWS_AS(fit_measurement_scaling(r, 0.9), Error);
  }
  // Unbracketed cells are excluded and listed.
  {
    const GridResult r = synthetic({1, 2, 3, 4}, {4, 8, 12, 16},
                                   [](std::size_t k) { return 4 * k; });
    const ScalingFit fit = fit_measurement_scaling(r, 0.9);
    // K = 1 succeeds already at the smallest M, so its M* is not bracketed.
    CHECK(fit.excluded_k == std::vector<std::size_t>{1});
    CHECK(fit.entries.size() == 3);
  }
}

TEST_CASE("coherence concentration study") {
  const ConcentrationReport rep = coherence_concentration_study(16, 64, 30, 7);
  REQUIRE(rep.mu_values.size() == 30);
  for (double mu : rep.mu_values) {
    CHECK(mu > 0.0);
    CHECK(mu <= 1.0);
  }
  for (std::size_t i = 1; i < rep.quantile_values.size(); ++i) {
    CHECK(rep.quantile_values[i] >= rep.quantile_values[i - 1]);
  }
  CHECK(rep.implied_c_mu > 0.0);

  const ConcentrationReport again = coherence_concentration_study(16, 64, 30, 7);
  CHECK(again.mu_values == rep.mu_values);
  CHECK(again.implied_c_mu == rep.implied_c_mu);

  // Quadrupling M at fixed N concentrates the coherence lower.
  const ConcentrationReport wide = coherence_concentration_study(64, 64, 30, 7);
  CHECK(wide.quantile_values.back() < rep.quantile_values.back());
}

TEST_CASE("grid CSV round trip is exact") {
  GridConfig config;
  config.n = 16;
  config.m_values = {4, 8};
  config.k_values = {1, 2};
  config.trials_per_cell = 8;
  config.master_seed = 99;
  config.signal_model = SignalModel::kDecayingValues;
  const GridResult result = run_recovery_grid(config, 1);
  const std::string csv = grid_to_csv(result);
  const GridResult back = grid_from_csv(csv, "test");
  CHECK(back == result);
  CHECK(grid_to_csv(back) == csv);
}

TEST_CASE("empty and single-cell CSV exports") {
  GridResult empty;
  empty.config.n = 8;
  const std::string csv = grid_to_csv(empty);
  CHECK(csv.find("m,k,trials,successes") != std::string::npos);
  CHECK(split(csv, '\n').back().empty());  // ends with newline, no data rows

  GridResult one;
  one.config.n = 8;
  one.config.m_values = {4};
  one.config.k_values = {1};
  one.config.trials_per_cell = 2;
  GridCell cell;
  cell.m = 4;
  cell.k = 1;
  cell.trials = 2;
  cell.successes = 1;
  cell.mean_iterations = 1.0;
  cell.mean_relative_error = 0.5;
  cell.cell_seed = 42;
  one.cells.push_back(cell);
  const auto lines = split(grid_to_csv(one), '\n');
  // header comments + column header + exactly one data row + trailing empty
  CHECK(lines[lines.size() - 2] == "4,1,2,1,0.5,1,0.5,42");
}

TEST_CASE("wilson intervals and monotonicity scan") {
  const auto iv = suites::wilson_interval(90, 100, 2.5758293035489004);
  CHECK(iv.lo > 0.75);
  CHECK(iv.hi < 1.0);
  CHECK(iv.lo < 0.9);
  CHECK(iv.hi > 0.9);

  GridResult r;
  r.config.n = 32;
  r.config.m_values = {8};
  r.config.k_values = {1, 2, 3};
  r.config.trials_per_cell = 200;
  auto add = [&](std::size_t k, std::size_t successes) {
    GridCell cell;
    cell.m = 8;
    cell.k = k;
    cell.trials = 200;
    cell.successes = successes;
    r.cells.push_back(cell);
  };
  add(1, 200);
  add(2, 120);
  add(3, 190);  // jumps well beyond binomial noise
  const auto violations = suites::grid_monotonicity_violations(r);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].m == 8);
  CHECK(violations[0].k_low == 2);
  CHECK(violations[0].k_high == 3);

  // A small wiggle within the confidence overlap is tolerated.
  r.cells[2].successes = 125;
  CHECK(suites::grid_monotonicity_violations(r).empty());
}
