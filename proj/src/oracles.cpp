#include "omplab/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace omplab {

namespace {

// Projection of y onto the span of the chosen columns by classical
// Gram-Schmidt with a second orthogonalization pass on every column.
// Columns that lose all but 1e-13 of their norm are dependent on the
// ones before them and contribute nothing to the span; they are skipped
// (flagged in `kept`), which leaves the projection itself exact.
//
// This is the ground-truth path for the solver's least squares, so it
// intentionally shares no code with SupportFactorization.
struct SpanProjection {
  std::vector<std::vector<double>> basis;  // orthonormal spanning vectors
  std::vector<double> coeffs_q;            // <q_j, y>
  std::vector<std::vector<double>> r_cols; // expansion of kept columns in the basis
  std::vector<bool> kept;                  // per input column
  std::vector<double> residual;
  double residual_norm = 0.0;
};

SpanProjection project_onto_columns(const SensingMatrix& phi, const Vector& y,
                                    const std::vector<std::size_t>& support) {
  const std::size_t m = phi.m();
  SpanProjection proj;
  proj.kept.resize(support.size(), false);

  for (std::size_t c = 0; c < support.size(); ++c) {
    std::vector<double> v(m);
    for (std::size_t r = 0; r < m; ++r) v[r] = phi.data(r, support[c]);
    double orig = 0.0;
    for (double x : v) orig += x * x;
    orig = std::sqrt(orig);

    std::vector<double> expansion(proj.basis.size(), 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t b = 0; b < proj.basis.size(); ++b) {
        double dot = 0.0;
        for (std::size_t r = 0; r < m; ++r) dot += proj.basis[b][r] * v[r];
        for (std::size_t r = 0; r < m; ++r) v[r] -= dot * proj.basis[b][r];
        expansion[b] += dot;
      }
    }
    double left = 0.0;
    for (double x : v) left += x * x;
    left = std::sqrt(left);
    if (left <= 1e-13 * orig) continue;  // dependent; span unchanged

    for (double& x : v) x /= left;
    proj.kept[c] = true;
    expansion.push_back(left);
    proj.r_cols.push_back(std::move(expansion));
    proj.basis.push_back(std::move(v));
  }

  proj.residual.assign(y.e.begin(), y.e.end());
  proj.coeffs_q.resize(proj.basis.size());
  for (std::size_t b = 0; b < proj.basis.size(); ++b) {
    double dot = 0.0;
    for (std::size_t r = 0; r < m; ++r) dot += proj.basis[b][r] * y[r];
    proj.coeffs_q[b] = dot;
    for (std::size_t r = 0; r < m; ++r) proj.residual[r] -= dot * proj.basis[b][r];
  }
  double s = 0.0;
  for (double x : proj.residual) s += x * x;
  proj.residual_norm = std::sqrt(s);
  return proj;
}

// Coefficients on the kept columns via back substitution; zeros on the
// skipped ones (a valid representative of the projection).
std::vector<double> coefficients_from_projection(const SpanProjection& proj) {
  const std::size_t k = proj.basis.size();
  std::vector<double> z(proj.coeffs_q);
  for (std::size_t jj = k; jj-- > 0;) {
    z[jj] /= proj.r_cols[jj][jj];
    for (std::size_t i = 0; i < jj; ++i) z[i] -= proj.r_cols[jj][i] * z[jj];
  }
  std::vector<double> full(proj.kept.size(), 0.0);
  std::size_t b = 0;
  for (std::size_t c = 0; c < proj.kept.size(); ++c) {
    if (proj.kept[c]) full[c] = z[b++];
  }
  return full;
}

}  // namespace

std::uint64_t for_each_combination(std::size_t n, std::size_t k,
                                   const std::function<void(const std::vector<std::size_t>&)>& visit) {
  if (k > n) return 0;
  std::vector<std::size_t> subset(k);
  for (std::size_t i = 0; i < k; ++i) subset[i] = i;
  std::uint64_t count = 0;
  for (;;) {
    visit(subset);
    ++count;
    if (k == 0) break;
    // Advance the lexicographic odometer.
    std::size_t i = k;
    while (i-- > 0) {
      if (subset[i] != i + n - k) {
        ++subset[i];
        for (std::size_t j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
        break;
      }
      if (i == 0) return count;
    }
  }
  return count;
}

BestTermApproximation best_l_term_error(const SensingMatrix& phi, const Vector& y,
                                        std::size_t l, std::uint64_t cap) {
  if (y.size() != phi.m()) throw DimensionError("best_l_term_error: y length mismatch");
  if (l > std::min(phi.m(), phi.n())) {
    throw DimensionError("best_l_term_error: l must be at most min(M, N)");
  }
  const std::uint64_t count = binomial_capped(phi.n(), l, cap);
  if (count > cap) {
    throw CapExceededError("best_l_term_error: C(" + std::to_string(phi.n()) + ", " +
                               std::to_string(l) + ") exceeds cap " + std::to_string(cap),
                           count, cap);
  }

  BestTermApproximation best;
  best.l = l;
  best.sigma = y.norm();  // the empty support
  best.supports_examined = 1;
  if (l == 0) return best;

  best.supports_examined = for_each_combination(
      phi.n(), l, [&](const std::vector<std::size_t>& subset) {
        const SpanProjection proj = project_onto_columns(phi, y, subset);
        if (proj.residual_norm < best.sigma) {
          best.sigma = proj.residual_norm;
          best.best_support = subset;
        }
      });
  ++best.supports_examined;  // count the empty support too
  return best;
}

std::vector<SparseVector> l0_decode_exhaustive(const SensingMatrix& phi, const Vector& y,
                                               std::size_t k, double tol, std::uint64_t cap) {
  if (y.size() != phi.m()) throw DimensionError("l0_decode_exhaustive: y length mismatch");
  if (k > phi.n()) throw DimensionError("l0_decode_exhaustive: K larger than N");
  const std::uint64_t count = binomial_capped(phi.n(), k, cap);
  if (count > cap) {
    throw CapExceededError("l0_decode_exhaustive: C(" + std::to_string(phi.n()) + ", " +
                               std::to_string(k) + ") exceeds cap " + std::to_string(cap),
                           count, cap);
  }

  std::vector<SparseVector> solutions;
  for_each_combination(phi.n(), k, [&](const std::vector<std::size_t>& subset) {
    const SpanProjection proj = project_onto_columns(phi, y, subset);
    if (proj.residual_norm > tol) return;
    const std::vector<double> coeffs = coefficients_from_projection(proj);
    std::vector<std::size_t> support;
    std::vector<double> values;
    for (std::size_t c = 0; c < subset.size(); ++c) {
      if (coeffs[c] != 0.0) {
        support.push_back(subset[c]);
        values.push_back(coeffs[c]);
      }
    }
    solutions.push_back(make_sparse_vector(phi.n(), std::move(support), std::move(values)));
  });
  return solutions;
}

}  // namespace omplab
