#pragma once

// Dense vector/matrix primitives and least squares on a column subset.
//
// The least-squares path is an incrementally extended thin QR: each new
// column is orthogonalized against the current factor (once, or twice
// when the first pass removes more than half of its norm), which is much
// better behaved on coherent dictionaries than normal equations. A column
// whose residual after orthogonalization drops below 1e-12 of its
// original norm is rejected as numerically dependent.

#include <cstddef>
#include <vector>

#include "omplab/errors.hpp"

namespace omplab {

struct Vector {
  std::vector<double> e;

  Vector() = default;
  explicit Vector(std::size_t n) : e(n, 0.0) {}
  Vector(std::initializer_list<double> init) : e(init) {}
  explicit Vector(std::vector<double> entries) : e(std::move(entries)) {}

  std::size_t size() const { return e.size(); }
  double& operator[](std::size_t i) { return e[i]; }
  double operator[](std::size_t i) const { return e[i]; }

  double norm() const;
  double squared_norm() const;
  double l1_norm() const;
};

bool operator==(const Vector& a, const Vector& b);

// Throws Error if any entry is NaN or infinite. Call at trust boundaries
// (file loads, user-supplied data); internal arithmetic results are not
// re-validated.
void validate_finite(const Vector& v, const char* what);

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  const std::vector<double>& entries() const { return a_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

double inner_product(const Vector& u, const Vector& v);

// i-th column of phi as a dense vector.
Vector column(const DenseMatrix& phi, std::size_t i);

// phi * x for a dense x of length cols.
Vector multiply(const DenseMatrix& phi, const Vector& x);

// Incrementally extendable thin QR of a growing column subset, together
// with the transformed right-hand side Q^T y, enough to solve the least
// squares problem restricted to the current support.
class SupportFactorization {
 public:
  explicit SupportFactorization(const DenseMatrix& phi) : phi_(&phi) {}

  const std::vector<std::size_t>& support() const { return support_; }
  std::size_t size() const { return support_.size(); }
  const DenseMatrix& matrix() const { return *phi_; }

  // Brings column new_index into the factorization; y must be the same
  // right-hand side on every call. Throws IllConditionedError when the
  // new column is numerically dependent on the current support.
  void extend(std::size_t new_index, const Vector& y);

  // Coefficients aligned with support() order.
  std::vector<double> solve() const;

  // max_i |<q_i, v>| over the orthonormal factor columns; 0 when empty.
  double max_factor_correlation(const Vector& v) const;

 private:
  const DenseMatrix* phi_ = nullptr;
  std::vector<std::size_t> support_;
  std::vector<double> q_;    // rows x k, column major
  std::vector<double> r_;    // upper triangular, packed by column
  std::vector<double> qty_;  // Q^T y
};

// Functional form: returns a copy of f extended by new_index.
SupportFactorization extend_factorization(const SupportFactorization& f,
                                          std::size_t new_index, const Vector& y);

struct LeastSquaresSolution {
  std::vector<std::size_t> support;   // as passed by the caller
  std::vector<double> coefficients;   // aligned with support
  Vector residual;                    // y - phi * (embedded coefficients)
};

// Least squares of y restricted to the columns in lambda. Throws
// IllConditionedError (carrying lambda) if the subset is numerically
// rank deficient.
LeastSquaresSolution least_squares_on_support(const DenseMatrix& phi, const Vector& y,
                                              const std::vector<std::size_t>& lambda);

}  // namespace omplab
