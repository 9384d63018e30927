#include <doctest.h>

#include <cmath>

#include "omplab/linalg.hpp"
#include "omplab/sensing.hpp"
#include "test_helpers.hpp"

using namespace omplab;

TEST_CASE("inner_product basics") {
  CHECK(inner_product(Vector{1, 0}, Vector{0, 1}) == 0.0);
  CHECK(inner_product(Vector{1, 2}, Vector{1, 2}) == 5.0);
  CHECK(inner_product(Vector{0.5, -0.5, 0.5, -0.5}, Vector{0.5, 0.5, 0.5, 0.5}) == 0.0);
  CHECK_THROWS_AS(inner_product(Vector{1, 2}, Vector{1, 2, 3}), DimensionError);
}

TEST_CASE("inner_product is exactly symmetric") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Vector u = test::random_vector(9, seed);
    const Vector v = test::random_vector(9, seed + 1000);
    CHECK(inner_product(u, v) == inner_product(v, u));
  }
}

TEST_CASE("column extraction") {
  const SensingMatrix eye = test::identity_sensing(2);
  CHECK(column(eye.data, 0) == Vector{1, 0});
  CHECK(column(eye.data, 1) == Vector{0, 1});

  const SensingMatrix three = test::three_column_sensing();
  const Vector c2 = column(three.data, 2);
  CHECK(c2[0] == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(c2[1] == doctest::Approx(0.70710678).epsilon(1e-8));

  CHECK_THROWS_AS(column(eye.data, 2), DimensionError);
}

TEST_CASE("least squares on identity support") {
  const SensingMatrix eye = test::identity_sensing(2);
  const Vector y{3, 4};

  const auto one = least_squares_on_support(eye.data, y, {0});
  CHECK(one.coefficients[0] == doctest::Approx(3.0));
  CHECK(one.residual[0] == doctest::Approx(0.0));
  CHECK(one.residual[1] == doctest::Approx(4.0));

  const auto both = least_squares_on_support(eye.data, y, {0, 1});
  CHECK(both.coefficients[0] == doctest::Approx(3.0));
  CHECK(both.coefficients[1] == doctest::Approx(4.0));
  CHECK(both.residual.norm() == doctest::Approx(0.0));

  CHECK_THROWS_AS(least_squares_on_support(eye.data, y, {}), Error);
}

TEST_CASE("least squares residual is orthogonal to the support columns") {
  const SensingMatrix phi = gen_bernoulli(4, 6, 21);
  const Vector y = test::random_vector(4, 33);
  const std::vector<std::size_t> lambda{1, 3};
  const auto sol = least_squares_on_support(phi.data, y, lambda);

  for (std::size_t idx : lambda) {
    CHECK(std::abs(inner_product(sol.residual, column(phi.data, idx))) <= 1e-9 * (y.norm() + 1.0));
  }

  // Independent route: Eigen solves the same normal equations.
  const Eigen::VectorXd z = test::eigen_least_squares(phi, y, lambda);
  CHECK(sol.coefficients[0] == doctest::Approx(z(0)).epsilon(1e-9));
  CHECK(sol.coefficients[1] == doctest::Approx(z(1)).epsilon(1e-9));
}

TEST_CASE("rank-deficient support is rejected with the support attached") {
  DenseMatrix dup(2, 2);
  dup(0, 0) = 1.0;
  dup(0, 1) = 1.0;  // duplicate of column 0
  const Vector y{1, 1};
  try {
    least_squares_on_support(dup, y, {0, 1});
    FAIL("expected IllConditionedError");
  } catch (const IllConditionedError& e) {
    CHECK(e.support == std::vector<std::size_t>{0, 1});
  }
}

TEST_CASE("factorization extends one column at a time") {
  const SensingMatrix eye = test::identity_sensing(2);
  const Vector y{3, 4};

  SupportFactorization f(eye.data);
  const auto f0 = extend_factorization(f, 0, y);
  CHECK(f0.solve() == std::vector<double>{3.0});

  const auto f01 = extend_factorization(f0, 1, y);
  const auto coeffs = f01.solve();
  CHECK(coeffs[0] == doctest::Approx(3.0));
  CHECK(coeffs[1] == doctest::Approx(4.0));

  CHECK_THROWS_AS(extend_factorization(f01, 1, y), Error);
}

TEST_CASE("incremental factorization matches from-scratch solves while growing") {
  const SensingMatrix phi = gen_gaussian_normalized(8, 16, 17);
  const Vector y = test::random_vector(8, 71);
  const std::vector<std::size_t> order{3, 11, 7, 0, 14};

  SupportFactorization f(phi.data);
  std::vector<std::size_t> so_far;
  for (std::size_t idx : order) {
    f.extend(idx, y);
    so_far.push_back(idx);

    const Eigen::VectorXd z = test::eigen_least_squares(phi, y, so_far);
    const auto mine = f.solve();
    REQUIRE(mine.size() == so_far.size());
    double scale = 0.0;
    for (double c : mine) scale = std::max(scale, std::abs(c));
    for (std::size_t j = 0; j < mine.size(); ++j) {
      CHECK(std::abs(mine[j] - z(static_cast<Eigen::Index>(j))) <= 1e-9 * (scale + 1.0));
    }
  }
}

TEST_CASE("projection never increases the norm") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SensingMatrix phi = gen_bernoulli(6, 10, seed);
    const Vector y = test::random_vector(6, seed + 500);
    const auto sol = least_squares_on_support(phi.data, y, {0, 2, 5});
    CHECK(sol.residual.norm() <= y.norm() * (1.0 + 1e-12));
  }
}
