#include "omplab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace omplab {

namespace {

// A column counts as numerically dependent when orthogonalization
// removes all but this fraction of its norm.
constexpr double kDependentColumnRatio = 1e-12;

std::string index_list(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

double Vector::norm() const { return std::sqrt(squared_norm()); }

double Vector::squared_norm() const {
  double s = 0.0;
  for (double x : e) s += x * x;
  return s;
}

double Vector::l1_norm() const {
  double s = 0.0;
  for (double x : e) s += std::abs(x);
  return s;
}

bool operator==(const Vector& a, const Vector& b) { return a.e == b.e; }

void validate_finite(const Vector& v, const char* what) {
  for (double x : v.e) {
    if (!std::isfinite(x)) throw Error(std::string(what) + ": non-finite entry");
  }
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("DenseMatrix: zero dimension");
  if (a_.size() != rows_ * cols_) {
    throw DimensionError("DenseMatrix: entry count does not match rows x cols");
  }
  for (double x : a_) {
    if (!std::isfinite(x)) throw Error("DenseMatrix: non-finite entry");
  }
}

double inner_product(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    throw DimensionError("inner_product: length mismatch (" + std::to_string(u.size()) +
                         " vs " + std::to_string(v.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

Vector column(const DenseMatrix& phi, std::size_t i) {
  if (i >= phi.cols()) {
    throw DimensionError("column: index " + std::to_string(i) + " out of range for " +
                         std::to_string(phi.cols()) + " columns");
  }
  Vector out(phi.rows());
  for (std::size_t r = 0; r < phi.rows(); ++r) out[r] = phi(r, i);
  return out;
}

Vector multiply(const DenseMatrix& phi, const Vector& x) {
  if (x.size() != phi.cols()) throw DimensionError("multiply: dimension mismatch");
  Vector out(phi.rows());
  for (std::size_t r = 0; r < phi.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < phi.cols(); ++c) s += phi(r, c) * x[c];
    out[r] = s;
  }
  return out;
}

void SupportFactorization::extend(std::size_t new_index, const Vector& y) {
  const DenseMatrix& phi = *phi_;
  const std::size_t m = phi.rows();
  if (new_index >= phi.cols()) throw DimensionError("extend: column index out of range");
  if (std::find(support_.begin(), support_.end(), new_index) != support_.end()) {
    throw Error("extend: column " + std::to_string(new_index) + " already in support");
  }
  if (y.size() != m) throw DimensionError("extend: right-hand side length mismatch");
  if (support_.size() >= m) {
    std::vector<std::size_t> bad = support_;
    bad.push_back(new_index);
    throw IllConditionedError("extend: support larger than row count {" + index_list(bad) + "}",
                              std::move(bad));
  }

  const std::size_t k = support_.size();
  std::vector<double> v(m);
  for (std::size_t r = 0; r < m; ++r) v[r] = phi(r, new_index);
  double orig_norm = 0.0;
  for (double x : v) orig_norm += x * x;
  orig_norm = std::sqrt(orig_norm);

  std::vector<double> h(k, 0.0);
  auto orthogonalize_pass = [&] {
    for (std::size_t j = 0; j < k; ++j) {
      const double* qj = q_.data() + j * m;
      double dot = 0.0;
      for (std::size_t r = 0; r < m; ++r) dot += qj[r] * v[r];
      for (std::size_t r = 0; r < m; ++r) v[r] -= dot * qj[r];
      h[j] += dot;
    }
  };
  orthogonalize_pass();
  double norm1 = 0.0;
  for (double x : v) norm1 += x * x;
  norm1 = std::sqrt(norm1);
  if (norm1 < 0.5 * orig_norm) {
    orthogonalize_pass();
    norm1 = 0.0;
    for (double x : v) norm1 += x * x;
    norm1 = std::sqrt(norm1);
  }

  if (!(norm1 > kDependentColumnRatio * orig_norm)) {
    std::vector<std::size_t> bad = support_;
    bad.push_back(new_index);
    throw IllConditionedError(
        "extend: column " + std::to_string(new_index) + " numerically dependent on {" +
            index_list(support_) + "}",
        std::move(bad));
  }

  for (std::size_t r = 0; r < m; ++r) q_.push_back(v[r] / norm1);
  for (std::size_t j = 0; j < k; ++j) r_.push_back(h[j]);
  r_.push_back(norm1);

  const double* qk = q_.data() + k * m;
  double qty = 0.0;
  for (std::size_t r = 0; r < m; ++r) qty += qk[r] * y[r];
  qty_.push_back(qty);
  support_.push_back(new_index);
}

std::vector<double> SupportFactorization::solve() const {
  const std::size_t k = support_.size();
  std::vector<double> z(qty_);
  // Back substitution on the packed upper-triangular factor: column j
  // starts at j(j+1)/2.
  for (std::size_t jj = k; jj-- > 0;) {
    const std::size_t base = jj * (jj + 1) / 2;
    z[jj] /= r_[base + jj];
    for (std::size_t i = 0; i < jj; ++i) z[i] -= r_[base + i] * z[jj];
  }
  return z;
}

double SupportFactorization::max_factor_correlation(const Vector& v) const {
  const std::size_t m = phi_->rows();
  double best = 0.0;
  for (std::size_t j = 0; j < support_.size(); ++j) {
    const double* qj = q_.data() + j * m;
    double dot = 0.0;
    for (std::size_t r = 0; r < m; ++r) dot += qj[r] * v[r];
    best = std::max(best, std::abs(dot));
  }
  return best;
}

SupportFactorization extend_factorization(const SupportFactorization& f,
                                          std::size_t new_index, const Vector& y) {
  SupportFactorization out = f;
  out.extend(new_index, y);
  return out;
}

LeastSquaresSolution least_squares_on_support(const DenseMatrix& phi, const Vector& y,
                                              const std::vector<std::size_t>& lambda) {
  if (lambda.empty()) throw Error("least_squares_on_support: empty support");
  if (y.size() != phi.rows()) throw DimensionError("least_squares_on_support: y length mismatch");

  SupportFactorization f(phi);
  try {
    for (std::size_t idx : lambda) f.extend(idx, y);
  } catch (const IllConditionedError&) {
    throw IllConditionedError("least_squares_on_support: rank-deficient support {" +
                                  index_list(lambda) + "}",
                              lambda);
  }

  LeastSquaresSolution sol;
  sol.support = lambda;
  sol.coefficients = f.solve();
  sol.residual = y;
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    const double c = sol.coefficients[j];
    for (std::size_t r = 0; r < phi.rows(); ++r) sol.residual[r] -= c * phi(r, lambda[j]);
  }
  return sol;
}

}  // namespace omplab
