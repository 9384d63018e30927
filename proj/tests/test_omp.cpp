#include <doctest.h>

#include <cmath>
#include <fstream>

#include "omplab/analysis.hpp"
#include "omplab/experiments.hpp"
#include "omplab/omp.hpp"
#include "omplab/oracles.hpp"
#include "omplab/text.hpp"
#include "test_helpers.hpp"

using namespace omplab;

namespace {

OmpTrace i4_trace() {
  const SensingMatrix eye = test::identity_sensing(4);
  const Vector y{0, 0, 2, 0};
  return omp_solve(eye, y);
}

}  // namespace

TEST_CASE("sparse vector validation") {
  CHECK_THROWS_AS(make_sparse_vector(4, {0, 0}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(make_sparse_vector(4, {5}, {1.0}), DimensionError);
  CHECK_THROWS_AS(make_sparse_vector(4, {1}, {0.0}), Error);
  const SparseVector x = make_sparse_vector(4, {1, 3}, {2.0, -1.0});
  CHECK(x.dense() == Vector{0, 2, 0, -1});
  CHECK(x.l1_norm() == 3.0);
}

TEST_CASE("selection rule: argmax, ties, zero residual") {
  const SensingMatrix eye = test::identity_sensing(3);
  CHECK(select_next_index(eye, Vector{0, 5, 1}).index == 1);
  CHECK(select_next_index(eye, Vector{2, 2, 0}).index == 0);
  CHECK_THROWS_AS(select_next_index(eye, Vector{0, 0, 0}), Error);
}

TEST_CASE("selection never revisits a projected column") {
  const SensingMatrix phi = gen_bernoulli(8, 16, 31);
  const Vector y = test::random_vector(8, 4);
  const OmpTrace trace = omp_solve(phi, y, StopRule{0.0, 2});
  REQUIRE(trace.steps.size() >= 2);
  const std::size_t first = trace.steps[0].selected_index;
  // Correlation magnitudes for step 2 were measured on r^1, which is
  // orthogonal to the already-selected column.
  CHECK(trace.steps[1].correlations[first] <= 1e-9 * (y.norm() + 1.0));
  CHECK(trace.steps[1].selected_index != first);
}

TEST_CASE("orthonormal dictionary solves in one step") {
  const OmpTrace trace = i4_trace();
  REQUIRE(trace.steps.size() == 1);
  CHECK(trace.steps[0].selected_index == 2);
  CHECK(trace.steps[0].support == std::vector<std::size_t>{2});
  CHECK(trace.steps[0].coefficients[0] == doctest::Approx(2.0));
  CHECK(trace.steps[0].residual_norm == doctest::Approx(0.0));
  CHECK(trace.termination == Termination::kResidualZero);
}

TEST_CASE("low-coherence dictionary recovers in exactly K iterations") {
  const SensingMatrix eye = test::identity_sensing(6);
  const SparseVector x = make_sparse_vector(6, {1, 4}, {1.5, -0.5});
  const Vector y = multiply(eye.data, x.dense());
  const OmpTrace trace = omp_solve(eye, y);
  CHECK(trace.steps.size() == 2);
  const RecoveryReport rec = verify_recovery(trace, x, 1e-10);
  CHECK(rec.success);
}

TEST_CASE("planted bernoulli signal is recovered and matches the exhaustive decoder") {
  const SensingMatrix phi = gen_bernoulli(16, 32, 11);
  const SparseVector x = plant_signal(32, 3, SignalModel::kGaussianValues, 11);
  const Vector y = multiply(phi.data, x.dense());
  const OmpTrace trace = omp_solve(phi, y);

  const RecoveryReport rec = verify_recovery(trace, x, 1e-8);
  CHECK(rec.success);

  const auto solutions = l0_decode_exhaustive(phi, y, 3, 1e-9 * (1.0 + y.norm()));
  REQUIRE(solutions.size() == 1);
  CHECK(solutions[0].support == x.support);
}

TEST_CASE("reconstruct and residual recomputation") {
  const OmpTrace trace = i4_trace();
  CHECK(reconstruct(trace, 0) == Vector{0, 0, 0, 0});
  CHECK(reconstruct(trace, 1) == Vector{0, 0, 2, 0});
  CHECK_THROWS_AS(reconstruct(trace, 2), Error);

  CHECK(residual_at(trace, 0) == trace.y);
  CHECK(residual_at(trace, 1).norm() == doctest::Approx(0.0));

  const SensingMatrix phi = gen_bernoulli(8, 16, 5);
  const Vector y = test::random_vector(8, 6);
  const OmpTrace t = omp_solve(phi, y, StopRule{0.0, 6});
  for (std::size_t l = 1; l <= t.steps.size(); ++l) {
    CHECK(residual_at(t, l).norm() ==
          doctest::Approx(t.steps[l - 1].residual_norm).epsilon(1e-10));
  }
  // Final estimate reproduces the final residual.
  const Vector xf = reconstruct(t, t.steps.size());
  const Vector rf = residual_at(t, t.steps.size());
  Vector check = multiply(phi.data, xf);
  double diff = 0.0;
  for (std::size_t i = 0; i < check.size(); ++i) {
    const double d = t.y[i] - check[i] - rf[i];
    diff += d * d;
  }
  CHECK(std::sqrt(diff) <= 1e-9 * t.y.norm());
}

TEST_CASE("error vector satisfies phi z = r") {
  const SensingMatrix phi = gen_bernoulli(10, 20, 9);
  const SparseVector x = plant_signal(20, 4, SignalModel::kGaussianValues, 9);
  const Vector y = multiply(phi.data, x.dense());
  const OmpTrace trace = omp_solve(phi, y, StopRule{0.0, 3});

  CHECK(error_vector(trace, x, 0) == x.dense());

  for (std::size_t l = 0; l <= trace.steps.size(); ++l) {
    const Vector z = error_vector(trace, x, l);
    const Vector phiz = multiply(phi.data, z);
    const Vector r = residual_at(trace, l);
    double diff = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double d = phiz[i] - r[i];
      diff += d * d;
    }
    CHECK(std::sqrt(diff) <= 1e-9 * (y.norm() + 1.0));
  }
}

TEST_CASE("error vector vanishes after exact recovery") {
  const OmpTrace trace = i4_trace();
  const SparseVector x = make_sparse_vector(4, {2}, {2.0});
  CHECK(error_vector(trace, x, 1).norm() == doctest::Approx(0.0));
}

TEST_CASE("support energy") {
  const SparseVector x = make_sparse_vector(8, {0, 5}, {3.0, 4.0});
  CHECK(support_energy(x, {0, 5}) == 25.0);
  CHECK(support_energy(x, {}) == 0.0);
  CHECK(support_energy(x, {1, 2}) == 0.0);
  CHECK(support_energy(x, x.support) == doctest::Approx(x.dense().squared_norm()));
  CHECK_THROWS_AS(support_energy(x, {9}), DimensionError);
}

TEST_CASE("trace invariants on seeded instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SensingMatrix phi = gen_bernoulli(12, 24, seed);
    const SparseVector x = plant_signal(24, 3, SignalModel::kGaussianValues, seed);
    const Vector y = multiply(phi.data, x.dense());
    const OmpTrace trace = omp_solve(phi, y);

    double prev_norm = y.norm();
    std::size_t prev_size = 0;
    for (const OmpTraceStep& step : trace.steps) {
      CHECK(step.support.size() == prev_size + 1);
      prev_size = step.support.size();
      CHECK(step.residual_norm <= prev_norm * (1.0 + 1e-12) + 1e-15);
      prev_norm = step.residual_norm;

      // The recorded winner attains the maximum, smallest index first.
      for (std::size_t i = 0; i < step.correlations.size(); ++i) {
        CHECK(step.correlations[i] <= step.correlations[step.selected_index]);
        if (i < step.selected_index) {
          CHECK(step.correlations[i] < step.correlations[step.selected_index]);
        }
      }

      const Vector r = residual_at(trace, step.l);
      for (std::size_t idx : step.support) {
        CHECK(std::abs(inner_product(r, column(phi.data, idx))) <= 1e-9 * (y.norm() + 1.0));
      }
    }
  }
}

TEST_CASE("identical inputs give bitwise-identical traces") {
  const SensingMatrix phi = gen_bernoulli(10, 20, 77);
  const Vector y = test::random_vector(10, 78);
  const OmpTrace a = omp_solve(phi, y);
  const OmpTrace b = omp_solve(phi, y);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].selected_index == b.steps[i].selected_index);
    CHECK(a.steps[i].residual_norm == b.steps[i].residual_norm);
    CHECK(a.steps[i].coefficients == b.steps[i].coefficients);
    CHECK(a.steps[i].correlations == b.steps[i].correlations);
  }
  CHECK(trace_to_text(a) == trace_to_text(b));
}

TEST_CASE("solver stops when every column is orthogonal to the residual") {
  // Two copies of e1: once the first is projected out, no column can
  // reduce the residual any further.
  DenseMatrix dup(2, 2);
  dup(0, 0) = 1.0;
  dup(0, 1) = 1.0;
  const SensingMatrix phi = explicit_sensing_matrix(std::move(dup));
  const Vector y{1, 1};
  const OmpTrace trace = omp_solve(phi, y, StopRule{0.0, 2});
  CHECK(trace.termination == Termination::kIllConditioned);
  CHECK(trace.steps.size() == 1);
  CHECK(trace.steps[0].residual_norm == doctest::Approx(1.0));
}

TEST_CASE("stop rule validation") {
  const SensingMatrix eye = test::identity_sensing(3);
  const Vector y{1, 0, 0};
  CHECK_THROWS_AS(omp_solve(eye, y, StopRule{0.0, 4}), Error);
  CHECK_THROWS_AS(omp_solve(eye, y, StopRule{0.0, 0}), Error);
  CHECK_THROWS_AS(omp_solve(eye, Vector{1, 0}, StopRule{0.0, 2}), DimensionError);
}

TEST_CASE("trace text matches the golden file") {
  const std::string text = trace_to_text(i4_trace());
  std::ifstream golden(std::string(OMPLAB_TEST_DATA_DIR) + "/trace_i4.txt", std::ios::binary);
  REQUIRE(golden.good());
  std::string expected((std::istreambuf_iterator<char>(golden)),
                       std::istreambuf_iterator<char>());
  CHECK(text == expected);
}
