#pragma once

// Seeded Monte Carlo harness: recovery-probability grids over (M, K),
// measurement-scaling fits, and coherence concentration studies.
//
// Reproducibility contract: the per-cell stream is
//   cell_seed  = derive(master_seed, "grid-cell", M, K)
// and trial t inside a cell draws everything (matrix, support, values)
// from derive(cell_seed, "trial", t). Trials are embarrassingly
// parallel and land in preassigned slots, so results are bit-identical
// for any worker count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "omplab/analysis.hpp"

namespace omplab {

enum class SignalModel { kUnitValues, kGaussianValues, kDecayingValues };

const char* signal_model_name(SignalModel m);
std::optional<SignalModel> signal_model_from_name(const std::string& name);

// Plants a K-sparse signal: support uniform among size-k subsets, values
// per model (unit: +-1 signs; gaussian: i.i.d. standard normal with
// exact zeros resampled; decaying: magnitude 2^-j on the j-th support
// element in ascending index order, random sign).
SparseVector plant_signal(std::size_t n, std::size_t k, SignalModel model, std::uint64_t seed);

struct GridConfig {
  std::size_t n = 0;
  std::vector<std::size_t> m_values;
  std::vector<std::size_t> k_values;
  std::size_t trials_per_cell = 1;
  Ensemble ensemble = Ensemble::kBernoulli;
  std::uint64_t master_seed = 0;
  SignalModel signal_model = SignalModel::kGaussianValues;
  double success_tol = 1e-8;
};

bool operator==(const GridConfig& a, const GridConfig& b);

struct GridCell {
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double mean_iterations = 0.0;      // over successful trials; 0 if none
  double mean_relative_error = 0.0;  // over all trials
  std::uint64_t cell_seed = 0;
  std::vector<std::uint64_t> trial_seeds;

  double success_rate() const {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
  }
};

bool operator==(const GridCell& a, const GridCell& b);

struct GridResult {
  GridConfig config;
  std::vector<GridCell> cells;  // M-major, K-minor, matching config order
};

bool operator==(const GridResult& a, const GridResult& b);

// Runs the full grid with the given worker count (0 = hardware
// concurrency). Deterministic per config regardless of workers.
GridResult run_recovery_grid(const GridConfig& config, std::size_t workers = 0);

// Smallest l with supp(x) captured by Lambda^l and relative error at l
// within tol; nullopt when never achieved.
std::optional<std::size_t> iterations_to_recovery(const OmpTrace& trace, const SparseVector& x,
                                                  double tol);

struct KCritical {
  std::size_t k = 0;
  std::size_t m_star = 0;  // smallest grid M with success rate >= threshold
  bool isotonic_adjusted = false;
};

struct ScalingFit {
  double threshold = 0.0;
  std::size_t n = 0;
  std::vector<KCritical> entries;
  std::vector<std::size_t> excluded_k;  // unbracketed cells, left out of the fit
  bool isotonic_applied = false;
  double alpha = 0.0;     // exponent in M* ~ a K^alpha log N
  double a = 0.0;
  double residual = 0.0;  // RMS residual of the log-space fit
};

// Least squares fit of log M* = log a + alpha log K + log log N over
// the usable K (at least 3 required; Error otherwise). M* counts as
// bracketed only when some smaller grid M fell below the threshold.
ScalingFit fit_measurement_scaling(const GridResult& result, double threshold);

struct ConcentrationReport {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> mu_values;  // sample order
  std::vector<double> quantile_probs{0.05, 0.25, 0.5, 0.75, 0.95};
  std::vector<double> quantile_values;
  double implied_c_mu = 0.0;  // q95(mu) * sqrt(M) / sqrt(log N)
};

// Samples Bernoulli matrices (stream derived from (seed, "concentration",
// sample index)), measures mu for each, reports nearest-rank quantiles.
ConcentrationReport coherence_concentration_study(std::size_t m, std::size_t n,
                                                  std::size_t samples, std::uint64_t seed);

// Grid CSV: config echoed in '#' header lines, then
// m,k,trials,successes,success_rate,mean_iters,mean_rel_err,seed rows
// with 17-significant-digit reals. parse(export(r)) == r exactly.
std::string grid_to_csv(const GridResult& result);
GridResult grid_from_csv(const std::string& text, const std::string& context);

std::string to_text(const ScalingFit& fit);
std::string to_text(const ConcentrationReport& report);

void export_grid_csv(const std::string& path, const GridResult& result);
GridResult import_grid_csv(const std::string& path);
void export_text_file(const std::string& path, const std::string& text);

}  // namespace omplab
