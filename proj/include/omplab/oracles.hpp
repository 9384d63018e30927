#pragma once

// Brute-force ground truth at desk scale. Both routines enumerate
// column subsets lexicographically and evaluate each one with a local
// orthogonalization-based projector, deliberately sharing no code with
// the solver's least squares path so the two sides stay independent.

#include <cstdint>
#include <functional>
#include <vector>

#include "omplab/omp.hpp"

namespace omplab {

// Best approximation of y by at most l columns of phi:
// sigma = min over supports |S| <= l of the projection residual norm.
struct BestTermApproximation {
  std::size_t l = 0;
  double sigma = 0.0;
  std::vector<std::size_t> best_support;  // first support attaining sigma
  std::uint64_t supports_examined = 0;
};

// Exact sigma_l(y, phi) by enumerating every size-l support (plus the
// empty one). Rank-deficient subsets are fine: projection onto the
// column span is always defined. Refuses with CapExceededError when
// C(N, l) > cap.
BestTermApproximation best_l_term_error(const SensingMatrix& phi, const Vector& y,
                                        std::size_t l, std::uint64_t cap = 1000000);

// All K-sparse z (one representative per support, lexicographic order)
// with ||y - phi z|| <= tol. Empty when no support fits.
std::vector<SparseVector> l0_decode_exhaustive(const SensingMatrix& phi, const Vector& y,
                                               std::size_t k, double tol,
                                               std::uint64_t cap = 1000000);

// Visits every k-subset of [0, n) in lexicographic order; returns the
// number visited. Exposed for tests and for the sensing module's
// exhaustive RIP scan.
std::uint64_t for_each_combination(std::size_t n, std::size_t k,
                                   const std::function<void(const std::vector<std::size_t>&)>& visit);

}  // namespace omplab
