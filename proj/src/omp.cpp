#include "omplab/omp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "omplab/text.hpp"

namespace omplab {

Vector SparseVector::dense() const {
  Vector out(ambient_dim);
  for (std::size_t j = 0; j < support.size(); ++j) out[support[j]] = values[j];
  return out;
}

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double SparseVector::l1_norm() const {
  double s = 0.0;
  for (double v : values) s += std::abs(v);
  return s;
}

SparseVector make_sparse_vector(std::size_t ambient_dim, std::vector<std::size_t> support,
                                std::vector<double> values) {
  if (support.size() != values.size()) {
    throw Error("make_sparse_vector: support/value length mismatch");
  }
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] >= ambient_dim) throw DimensionError("make_sparse_vector: index out of range");
    if (i > 0 && support[i] <= support[i - 1]) {
      throw Error("make_sparse_vector: support must be strictly ascending");
    }
    if (values[i] == 0.0) throw Error("make_sparse_vector: zero value in support");
    if (!std::isfinite(values[i])) throw Error("make_sparse_vector: non-finite value");
  }
  return SparseVector{ambient_dim, std::move(support), std::move(values)};
}

StopRule StopRule::defaults(const Vector& y, std::size_t m) {
  return StopRule{1e-10 * y.norm(), m};
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::kResidualZero: return "residual-zero";
    case Termination::kMaxIterations: return "max-iterations";
    case Termination::kIllConditioned: return "ill-conditioned";
  }
  return "?";
}

SelectionResult select_next_index(const SensingMatrix& phi, const Vector& r) {
  if (r.size() != phi.m()) throw DimensionError("select_next_index: residual length mismatch");
  if (r.norm() == 0.0) throw Error("select_next_index: zero residual; stop instead");

  SelectionResult sel;
  sel.magnitudes.resize(phi.n());
  double best = -1.0;
  for (std::size_t i = 0; i < phi.n(); ++i) {
    double dot = 0.0;
    for (std::size_t row = 0; row < phi.m(); ++row) dot += r[row] * phi.data(row, i);
    const double mag = std::abs(dot);
    sel.magnitudes[i] = mag;
    if (mag > best) {
      best = mag;
      sel.index = i;
    }
  }
  return sel;
}

OmpTrace omp_solve(const SensingMatrix& phi, const Vector& y, const StopRule& stop) {
  if (y.size() != phi.m()) throw DimensionError("omp_solve: y length does not match M");
  if (stop.max_iterations == 0 || stop.max_iterations > phi.m()) {
    throw Error("omp_solve: max iterations must be in [1, M]");
  }
  if (!(stop.residual_tol >= 0.0)) throw Error("omp_solve: negative residual tolerance");

  OmpTrace trace;
  trace.matrix = phi;
  trace.y = y;

  SupportFactorization factorization(trace.matrix.data);
  Vector residual = y;
  double residual_norm = residual.norm();

  for (;;) {
    if (residual_norm <= stop.residual_tol) {
      trace.termination = Termination::kResidualZero;
      break;
    }
    if (trace.steps.size() >= stop.max_iterations) {
      trace.termination = Termination::kMaxIterations;
      break;
    }

    SelectionResult sel = select_next_index(trace.matrix, residual);
    // A residual orthogonal to every column selects an already-projected
    // index (correlation 0 ties break to it); no column can make
    // progress, which is the same dead end as a dependent extension.
    if (std::find(factorization.support().begin(), factorization.support().end(), sel.index) !=
        factorization.support().end()) {
      trace.termination = Termination::kIllConditioned;
      break;
    }
    try {
      factorization.extend(sel.index, y);
    } catch (const IllConditionedError&) {
      trace.termination = Termination::kIllConditioned;
      break;
    }

    OmpTraceStep step;
    step.l = trace.steps.size() + 1;
    step.selected_index = sel.index;
    step.correlations = std::move(sel.magnitudes);
    step.support = factorization.support();
    step.coefficients = factorization.solve();

    residual = y;
    for (std::size_t j = 0; j < step.support.size(); ++j) {
      const double c = step.coefficients[j];
      const std::size_t col = step.support[j];
      for (std::size_t row = 0; row < phi.m(); ++row) {
        residual[row] -= c * trace.matrix.data(row, col);
      }
    }
    residual_norm = residual.norm();
    step.residual_norm = residual_norm;
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

OmpTrace omp_solve(const SensingMatrix& phi, const Vector& y) {
  return omp_solve(phi, y, StopRule::defaults(y, phi.m()));
}

Vector reconstruct(const OmpTrace& trace, std::size_t at_step) {
  if (at_step > trace.steps.size()) {
    throw Error("reconstruct: step " + std::to_string(at_step) + " beyond trace length " +
                std::to_string(trace.steps.size()));
  }
  Vector x(trace.matrix.n());
  if (at_step == 0) return x;
  const OmpTraceStep& step = trace.steps[at_step - 1];
  for (std::size_t j = 0; j < step.support.size(); ++j) x[step.support[j]] = step.coefficients[j];
  return x;
}

Vector residual_at(const OmpTrace& trace, std::size_t at_step) {
  const Vector x = reconstruct(trace, at_step);
  Vector r = trace.y;
  const Vector phix = multiply(trace.matrix.data, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= phix[i];
  return r;
}

Vector error_vector(const OmpTrace& trace, const SparseVector& x, std::size_t at_step) {
  if (x.ambient_dim != trace.matrix.n()) {
    throw DimensionError("error_vector: signal dimension does not match N");
  }
  Vector z = x.dense();
  const Vector xl = reconstruct(trace, at_step);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] -= xl[i];
  return z;
}

double support_energy(const SparseVector& x, const std::vector<std::size_t>& v) {
  for (std::size_t idx : v) {
    if (idx >= x.ambient_dim) throw DimensionError("support_energy: index out of range");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < x.support.size(); ++j) {
    if (std::find(v.begin(), v.end(), x.support[j]) != v.end()) s += x.values[j] * x.values[j];
  }
  return s;
}

std::string trace_to_text(const OmpTrace& trace) {
  std::ostringstream out;
  out << "omplab-trace v1\n";
  out << "m " << trace.matrix.m() << "\n";
  out << "n " << trace.matrix.n() << "\n";
  out << "termination " << termination_name(trace.termination) << "\n";
  out << "steps " << trace.steps.size() << "\n";
  for (const OmpTraceStep& step : trace.steps) {
    std::vector<std::size_t> sorted = step.support;
    std::sort(sorted.begin(), sorted.end());
    out << "step " << step.l << " selected " << step.selected_index << " rnorm "
        << g17(step.residual_norm) << " support";
    for (std::size_t idx : sorted) out << ' ' << idx;
    out << '\n';
  }
  return out.str();
}

}  // namespace omplab
