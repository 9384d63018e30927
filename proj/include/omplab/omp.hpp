#pragma once

// Orthogonal Matching Pursuit with a complete per-iteration trace.
//
// The loop: select the column most correlated with the current residual,
// grow the support by that column, replace the estimate with the least
// squares fit on the support, recompute the residual, stop when the
// residual norm reaches the tolerance. Every step keeps the full
// correlation vector it selected from, so downstream checkers can replay
// any quantity of the run.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "omplab/sensing.hpp"

namespace omplab {

// Length-N signal stored as (support, values); values are all nonzero
// and support indices are distinct, ascending, inside [0, N).
struct SparseVector {
  std::size_t ambient_dim = 0;
  std::vector<std::size_t> support;
  std::vector<double> values;

  std::size_t sparsity() const { return support.size(); }
  Vector dense() const;
  double norm() const;
  double l1_norm() const;
};

// Validates the invariants above; throws Error on violation.
SparseVector make_sparse_vector(std::size_t ambient_dim, std::vector<std::size_t> support,
                                std::vector<double> values);

struct StopRule {
  double residual_tol = 0.0;        // absolute threshold on ||r||
  std::size_t max_iterations = 0;   // must be <= M

  // The default rule: stop at ||r|| <= 1e-10 ||y|| (the algorithm's
  // exact-zero stop, made representable), at most m iterations.
  static StopRule defaults(const Vector& y, std::size_t m);
};

enum class Termination { kResidualZero, kMaxIterations, kIllConditioned };

const char* termination_name(Termination t);

struct OmpTraceStep {
  std::size_t l = 0;                 // 1-based iteration index
  std::size_t selected_index = 0;
  std::vector<double> correlations;  // |<r^{l-1}, phi_i>| for all i
  std::vector<std::size_t> support;  // Lambda^l in selection order
  std::vector<double> coefficients;  // x^l on Lambda^l, same order
  double residual_norm = 0.0;        // ||r^l||
};

struct OmpTrace {
  SensingMatrix matrix;
  Vector y;
  std::vector<OmpTraceStep> steps;
  Termination termination = Termination::kResidualZero;

  std::size_t iterations() const { return steps.size(); }
};

struct SelectionResult {
  std::size_t index = 0;
  std::vector<double> magnitudes;
};

// argmax_i |<r, phi_i>| over all columns; ties break to the smallest
// index. Requires ||r|| > 0 (the caller must stop on a zero residual
// first). Columns already in the support carry zero correlation after a
// least squares projection, so a fresh index comes back whenever r != 0.
SelectionResult select_next_index(const SensingMatrix& phi, const Vector& r);

OmpTrace omp_solve(const SensingMatrix& phi, const Vector& y, const StopRule& stop);
OmpTrace omp_solve(const SensingMatrix& phi, const Vector& y);

// Dense length-N estimate x^{at_step}; step 0 is the zero vector.
Vector reconstruct(const OmpTrace& trace, std::size_t at_step);

// Recomputed residual y - phi x^{at_step} (not the stored norm).
Vector residual_at(const OmpTrace& trace, std::size_t at_step);

// z^l = x - x^{at_step}, dense.
Vector error_vector(const OmpTrace& trace, const SparseVector& x, std::size_t at_step);

// R(V) = sum of x_i^2 over i in V (intersected with the support of x).
double support_energy(const SparseVector& x, const std::vector<std::size_t>& v);

// Trace export, one record per step: l, selected index, residual norm,
// support as a sorted list. Stable format for golden-file comparisons.
std::string trace_to_text(const OmpTrace& trace);

}  // namespace omplab
