#pragma once

// Multi-instance check suites shared by the CLI `check` verb and the
// acceptance runner. Each suite generates seeded instances, runs the
// solver, feeds the relevant checker, and merges reports. Instance i of
// a suite draws from derive(seed, "<suite tag>", i).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "omplab/analysis.hpp"
#include "omplab/experiments.hpp"

namespace omplab::suites {

struct TheoremASuiteConfig {
  std::size_t m = 16;
  std::size_t n = 32;
  std::vector<std::size_t> k_values{1, 2, 3, 4, 5, 6};
  std::vector<SignalModel> models{SignalModel::kUnitValues, SignalModel::kGaussianValues,
                                  SignalModel::kDecayingValues};
  std::size_t instances = 1000;
  std::uint64_t seed = 1;
  // When set, every instance reuses this matrix instead of generating one.
  std::optional<SensingMatrix> fixed_matrix;
};

struct TheoremASuiteResult {
  CheckReport report;
  std::size_t instances = 0;
  std::string text() const;
  bool passed() const { return report.passed(); }
};

TheoremASuiteResult run_theorem_a_suite(const TheoremASuiteConfig& cfg);

struct TheoremBSuiteConfig {
  std::size_t m = 8;
  std::size_t n = 16;
  std::vector<std::size_t> k_values{2, 3};
  std::size_t instances = 100;
  std::size_t l_max = 3;
  std::uint64_t cap = 1000000;
  std::uint64_t seed = 2;
  Ensemble ensemble = Ensemble::kBernoulli;
  std::optional<SensingMatrix> fixed_matrix;
};

struct TheoremBSuiteResult {
  CheckReport report;
  std::size_t instances = 0;
  std::size_t vacuous = 0;  // instances whose l range was empty
  std::string text() const;
  bool passed() const { return report.passed(); }
};

TheoremBSuiteResult run_theorem_b_suite(const TheoremBSuiteConfig& cfg);

struct LemmaSuiteConfig {
  std::size_t m = 10;
  std::size_t n = 20;
  std::vector<std::size_t> k_values{2, 3};
  std::size_t instances = 50;
  std::size_t p_max = 2;
  std::size_t order_cap = 8;  // highest RIP order the exhaustive scan may use
  std::uint64_t cap = 1000000;
  std::uint64_t seed = 3;
  TheoremConstants constants;
  std::optional<SensingMatrix> fixed_matrix;
};

struct LemmaSuiteResult {
  CheckReport lemma1a;
  CheckReport lemma1b;
  CheckReport lemma2;
  CheckReport lemma3;
  std::size_t instances = 0;
  // Instances where not even the order-K constant was a usable restricted
  // isometry bound (delta > 1/2), so nothing could be checked.
  std::size_t instances_without_valid_delta = 0;
  std::string text() const;
  bool passed() const {
    return lemma1a.passed() && lemma1b.passed() && lemma2.passed() && lemma3.passed();
  }
};

// Per instance: plants a signal, solves, picks the largest order
// ord <= min(order_cap, K + horizon) whose exhaustive delta stays at or
// below 1/2 (scanning upward from K and stopping at the first failure,
// since delta is monotone in the order), then sweeps
//   lemma 1: l in [0, ord - K]
//   lemma 2: l_k in [0, ord - K], p in [1, p_max]
//   lemma 3: l_k, p as above with order >= K + l_k + 2p, all W in V_k
// applying each check's hypothesis gates.
LemmaSuiteResult run_lemma_suite(const LemmaSuiteConfig& cfg);

struct CoherenceRecoverySuiteConfig {
  std::size_t m = 64;
  std::size_t n = 256;
  std::vector<std::size_t> k_values{1, 2, 3};
  std::size_t trials = 200;
  double tol = 1e-8;
  std::uint64_t seed = 4;
};

struct CoherenceRecoveryKStats {
  std::size_t k = 0;
  std::size_t trials = 0;
  std::size_t eligible = 0;   // measured mu < 1/(2K-1)
  std::size_t recovered = 0;  // eligible trials recovered in exactly K iterations
};

struct CoherenceRecoverySuiteResult {
  std::vector<CoherenceRecoveryKStats> per_k;
  std::vector<std::string> failures;
  std::string text() const;
  bool passed() const { return failures.empty(); }
};

// Classical guarantee: on every trial whose measured coherence satisfies
// mu < 1/(2K-1), the solver must recover the planted support in exactly
// K iterations with relative error <= tol.
CoherenceRecoverySuiteResult run_coherence_recovery_suite(const CoherenceRecoverySuiteConfig& cfg);

struct OracleEquivalenceSuiteConfig {
  std::size_t m = 6;
  std::size_t n = 12;
  std::size_t k = 2;
  std::size_t instances = 50;
  double match_tol = 1e-8;
  std::uint64_t seed = 5;
};

struct OracleEquivalenceSuiteResult {
  std::size_t instances = 0;
  std::size_t unique_solution = 0;  // exhaustive decoder found exactly one support
  std::size_t omp_succeeded = 0;    // among unique-solution instances
  std::size_t matched = 0;          // OMP output equal to the decoder's solution
  std::vector<std::string> failures;
  std::string text() const;
  bool passed() const { return failures.empty(); }
};

// Wherever the exhaustive decoder has a unique answer and OMP reports
// success, the two must agree; the OMP success rate is recorded, not
// asserted (greedy may fail where exhaustive search succeeds).
OracleEquivalenceSuiteResult run_oracle_equivalence_suite(const OracleEquivalenceSuiteConfig& cfg);

// Two-sided Wilson score interval for a binomial proportion.
struct BinomialInterval {
  double lo = 0.0;
  double hi = 1.0;
};
BinomialInterval wilson_interval(std::size_t successes, std::size_t trials, double z);

struct MonotonicityViolation {
  std::size_t m = 0;
  std::size_t k_low = 0;
  std::size_t k_high = 0;
  double rate_low = 0.0;
  double rate_high = 0.0;
};

// Success rate must be non-increasing in K at fixed M; an increase only
// counts when the 99% intervals (z = 2.5758293035489004) do not overlap.
std::vector<MonotonicityViolation> grid_monotonicity_violations(const GridResult& result);

}  // namespace omplab::suites
