#pragma once

// Sensing-matrix ensembles and the two dictionary quality measures used
// throughout: mutual coherence mu(Phi) = max_{i != j} |<phi_i, phi_j>|
// and the restricted isometry constant delta of a given order (the
// largest eigenvalue deviation from 1 over all Gram submatrices of that
// many columns).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "omplab/linalg.hpp"

namespace omplab {

enum class Ensemble { kBernoulli, kGaussianNormalized, kExplicit };

const char* ensemble_name(Ensemble e);
std::optional<Ensemble> ensemble_from_name(const std::string& name);

// M x N measurement operator with unit-norm columns (within 1e-12).
// Generated ensembles always have M <= N; explicit matrices may not.
struct SensingMatrix {
  DenseMatrix data;
  Ensemble ensemble = Ensemble::kExplicit;
  std::optional<std::uint64_t> seed;

  std::size_t m() const { return data.rows(); }
  std::size_t n() const { return data.cols(); }
};

// Wraps caller-provided columns; validates finiteness and unit norms.
SensingMatrix explicit_sensing_matrix(DenseMatrix data);

// Entries +-M^{-1/2} with equal probability, filled row major from the
// stream derived from (seed, "bernoulli"). Columns have unit norm by
// construction.
SensingMatrix gen_bernoulli(std::size_t m, std::size_t n, std::uint64_t seed);

// I.i.d. standard normal entries, then each column rescaled to unit
// norm. Columns are drawn one at a time from the stream derived from
// (seed, "gaussian").
SensingMatrix gen_gaussian_normalized(std::size_t m, std::size_t n, std::uint64_t seed);

struct CoherenceReport {
  double mu = 0.0;
  std::size_t argmax_i = 0;  // first pair attaining mu, scanned in
  std::size_t argmax_j = 0;  // lexicographic order, i < j
};

// Exact maximum over all N(N-1)/2 column pairs. Requires N >= 2.
CoherenceReport coherence(const SensingMatrix& phi);

enum class RipMethod { kExhaustive, kMonteCarlo };

struct RipEstimate {
  std::size_t order = 0;
  double delta = 0.0;
  RipMethod method = RipMethod::kExhaustive;
  std::uint64_t subsets_examined = 0;
  std::optional<std::uint64_t> seed;
};

// Exact delta of the given order: enumerates all C(N, order) column
// subsets in lexicographic order and takes the worst eigenvalue
// deviation. Refuses with CapExceededError when C(N, order) > cap.
RipEstimate rip_delta_exhaustive(const SensingMatrix& phi, std::size_t order,
                                 std::uint64_t cap = 1000000);

// Lower bound on delta from `trials` uniformly sampled subsets
// (distinct indices within a trial; repeats across trials allowed).
// When trials >= C(N, order) the full enumeration is used instead, so
// the bound is tight. Deterministic per seed; trial t draws from the
// stream derived from (seed, "rip-mc", t).
RipEstimate rip_delta_monte_carlo(const SensingMatrix& phi, std::size_t order,
                                  std::uint64_t trials, std::uint64_t seed);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations
// (off-diagonal Frobenius norm reduced below 1e-12 relative). Ascending.
std::vector<double> symmetric_eigenvalues(const DenseMatrix& a);

// The absolute constants of the recovery theorem: RIP order
// floor(C K^1.2) with isometry constant c K^-0.2 and coherence at most
// 1/(20 K^0.8), with C = 2e5 and c = 1e-6 unless overridden (overrides
// are echoed in every output that used them).
struct TheoremConstants {
  double big_c = 2.0e5;
  double small_c = 1.0e-6;

  double delta_of_k(std::size_t k) const;
  std::uint64_t rip_order_of_k(std::size_t k) const;
  double coherence_bound_of_k(std::size_t k) const;
};

enum class HypothesisVerdict { kHolds, kFails, kInfeasible, kPartial };

const char* hypothesis_verdict_name(HypothesisVerdict v);

struct Theorem1Hypotheses {
  std::size_t k = 0;
  TheoremConstants constants;
  std::uint64_t rip_order_required = 0;
  double delta_required = 0.0;
  double mu_required = 0.0;
  double mu_measured = 0.0;
  bool mu_holds = false;
  // Missing when the required order exceeds min(M, N), where no
  // isometry constant below 1 can exist.
  std::optional<RipEstimate> delta_measured;
  // kHolds / kFails when delta was measured exactly; kPartial when only
  // a Monte Carlo lower bound fit under the cap (bound > required still
  // proves kFails); kInfeasible when the order is out of reach.
  HypothesisVerdict delta_verdict = HypothesisVerdict::kInfeasible;
  bool feasible_exact() const { return delta_verdict == HypothesisVerdict::kHolds || delta_verdict == HypothesisVerdict::kFails; }
};

// Measures both hypotheses of the recovery theorem on a concrete matrix
// at sparsity k. Never throws on infeasibility; the verdict says what
// could be measured at this scale. Monte Carlo fallback (when the
// exhaustive count exceeds cap but the order is in range) uses
// mc_trials draws seeded from mc_seed.
Theorem1Hypotheses theorem1_hypotheses(const SensingMatrix& phi, std::size_t k,
                                       const TheoremConstants& constants = {},
                                       std::uint64_t cap = 1000000,
                                       std::uint64_t mc_trials = 1000,
                                       std::uint64_t mc_seed = 0);

std::string to_text(const CoherenceReport& r);
std::string to_text(const RipEstimate& r);
std::string to_text(const Theorem1Hypotheses& r);

// "omplab-matrix v1" file format: five header lines
//   omplab-matrix v1
//   m <rows>
//   n <cols>
//   ensemble <bernoulli|gaussian-normalized|explicit>
//   seed <integer or none>
// followed by m lines of n space-separated scalars at full round-trip
// precision (17 significant digits).
void write_matrix(std::ostream& out, const SensingMatrix& phi);
void write_matrix_file(const std::string& path, const SensingMatrix& phi);
SensingMatrix read_matrix(std::istream& in, const std::string& context);
SensingMatrix read_matrix_file(const std::string& path);

// min(C(n, k), cap + 1): saturates just above cap so callers can test
// "would exceed" without overflow.
std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap);

}  // namespace omplab
