#include <doctest.h>

#include <cmath>

#include "omplab/analysis.hpp"
#include "omplab/experiments.hpp"
#include "omplab/suites.hpp"
#include "test_helpers.hpp"

using namespace omplab;

namespace {

struct Instance {
  SensingMatrix phi;
  SparseVector x;
  Vector y;
  OmpTrace trace;
};

Instance make_instance(const SensingMatrix& phi, std::size_t k, std::uint64_t seed) {
  Instance inst{phi, plant_signal(phi.n(), k, SignalModel::kGaussianValues, seed), {}, {}};
  inst.y = multiply(phi.data, inst.x.dense());
  inst.trace = omp_solve(inst.phi, inst.y, StopRule::defaults(inst.y, phi.m()));
  return inst;
}

}  // namespace

TEST_CASE("theorem A on the orthonormal example") {
  const SensingMatrix eye = test::identity_sensing(4);
  const SparseVector x = make_sparse_vector(4, {2}, {2.0});
  const Vector y = multiply(eye.data, x.dense());
  const OmpTrace trace = omp_solve(eye, y);

  const CheckReport rep = check_theorem_A(trace, x);
  CHECK(rep.passed());
  CHECK(rep.instances_checked == 1);
  CHECK(rep.worst_slack == doctest::Approx(2.0));  // rhs 2, lhs 0
}

TEST_CASE("theorem A is vacuous for the zero signal") {
  const SensingMatrix eye = test::identity_sensing(4);
  const SparseVector x{4, {}, {}};
  const OmpTrace trace = omp_solve(eye, Vector{0, 0, 0, 0});
  const CheckReport rep = check_theorem_A(trace, x);
  CHECK(rep.passed());
  CHECK(rep.instances_checked == 0);
}

TEST_CASE("theorem A rejects a mismatched right-hand side") {
  const SensingMatrix eye = test::identity_sensing(4);
  const SparseVector x = make_sparse_vector(4, {0}, {1.0});
  const OmpTrace trace = omp_solve(eye, Vector{0, 1, 0, 0});
  CHECK_THROWS_AS(check_theorem_A(trace, x), Error);
}

TEST_CASE("theorem A over seeded bernoulli instances") {
  CheckReport merged;
  merged.claim = Claim::kTheoremA;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = make_instance(gen_bernoulli(16, 32, seed), 4, seed);
    merge_report(merged, check_theorem_A(inst.trace, inst.x));
  }
  CHECK(merged.passed());
  CHECK(merged.instances_checked > 100);
  CHECK(merged.worst_slack >= -1e-9);
  CHECK(std::isfinite(merged.worst_slack));
}

TEST_CASE("theorem B on orthonormal dictionaries, non-vacuously") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SensingMatrix q = test::random_orthonormal(12, seed);
    const Instance inst = make_instance(q, 5, seed + 7);
    const double mu = coherence(q).mu;
    CHECK(mu <= 1e-12);
    const CheckReport rep = check_theorem_B(inst.trace, inst.phi, mu, 3, 1000000);
    CHECK(rep.passed());
    checked += rep.instances_checked;
    if (seed != 0) continue;

    // For an orthonormal dictionary the best l-term error is the energy
    // outside the l largest coefficients; spot-check l = 1.
    Eigen::VectorXd coeffs = test::to_eigen(inst.phi.data).transpose() * test::to_eigen(inst.y);
    std::vector<double> mags(coeffs.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) mags[i] = std::abs(coeffs(i));
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double tail = 0.0;
    for (std::size_t i = 1; i < mags.size(); ++i) tail += mags[i] * mags[i];
    const double sigma1 = best_l_term_error(inst.phi, inst.y, 1).sigma;
    CHECK(sigma1 == doctest::Approx(std::sqrt(tail)).epsilon(1e-9));
  }
  CHECK(checked >= 100 * 3);
}

TEST_CASE("theorem B is vacuous when the coherence is large") {
  const SensingMatrix phi = gen_bernoulli(8, 16, 2);
  const Instance inst = make_instance(phi, 2, 3);
  const double mu = coherence(phi).mu;
  REQUIRE(mu >= 0.05);  // 1/(20 mu) < 1 at these dimensions
  const CheckReport rep = check_theorem_B(inst.trace, inst.phi, mu, 3, 1000000);
  CHECK(rep.passed());
  CHECK(rep.instances_checked == 0);
}

TEST_CASE("theorem B across seeded 8x16 instances") {
  CheckReport merged;
  merged.claim = Claim::kTheoremB;
  std::size_t vacuous = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance inst = make_instance(gen_bernoulli(8, 16, seed), 3, seed);
    const CheckReport rep =
        check_theorem_B(inst.trace, inst.phi, coherence(inst.phi).mu, 3, 1000000);
    if (rep.instances_checked == 0) ++vacuous;
    merge_report(merged, rep);
  }
  CHECK(merged.passed());
  CHECK(vacuous == 50);  // mu >= 1/4 at 8x16, so the l range is always empty
}

TEST_CASE("lemma 1 at l = 0 and after exact recovery") {
  const SensingMatrix q = test::random_orthonormal(10, 3);
  const Instance inst = make_instance(q, 3, 5);
  const RipEstimate delta = rip_delta_exhaustive(q, std::min<std::size_t>(8, 10), 1000000);
  CHECK(delta.delta <= 1e-10);

  const Lemma1Report at0 = check_lemma1(inst.trace, inst.x, delta, 0);
  CHECK(at0.part_a.passed());
  CHECK(at0.part_b.passed());
  CHECK(at0.hypotheses_a.hold());
  CHECK(at0.hypotheses_b.hold());
  // l = 0: nothing selected yet, so the captured-error side is zero and
  // the energy inequality reads R(V_0) <= (1 + 2 delta) ||y||^2.
  CHECK(at0.part_a.worst_slack == doctest::Approx(3.0 * delta.delta *
                                                  support_energy(inst.x, inst.x.support)));

  REQUIRE(inst.trace.termination == Termination::kResidualZero);
  const std::size_t final_l = inst.trace.steps.size();
  const Lemma1Report at_end = check_lemma1(inst.trace, inst.x, delta, final_l);
  CHECK(at_end.part_a.passed());
  CHECK(at_end.part_b.passed());
}

TEST_CASE("lemma 1 evaluates verbatim on a seeded coherent instance") {
  const Instance inst = make_instance(gen_bernoulli(10, 20, 4), 2, 4);
  for (std::size_t l = 0; l <= std::min<std::size_t>(inst.trace.steps.size(), 3); ++l) {
    const RipEstimate delta = rip_delta_exhaustive(inst.phi, inst.x.sparsity() + l, 1000000);
    const Lemma1Report rep = check_lemma1(inst.trace, inst.x, delta, l);

    // Recompute both sides independently of the checker.
    const auto lambda = support_at(inst.trace, l);
    const Vector z = error_vector(inst.trace, inst.x, std::min(l, inst.trace.steps.size()));
    double lhs_a = 0.0;
    for (std::size_t idx : *lambda) lhs_a += z[idx] * z[idx];
    double rem = 0.0;
    for (std::size_t j = 0; j < inst.x.support.size(); ++j) {
      bool selected = false;
      for (std::size_t idx : *lambda) selected = selected || idx == inst.x.support[j];
      if (!selected) rem += inst.x.values[j] * inst.x.values[j];
    }
    const double rn = *residual_norm_at(inst.trace, l);

    CHECK(rep.part_a.violations.empty() ==
          (lhs_a <= 3.0 * delta.delta * rem + 1e-9 * (1.0 + 3.0 * delta.delta * rem)));
    CHECK(rep.part_b.violations.empty() ==
          (rem <= (1.0 + 2.0 * delta.delta) * rn * rn +
                      1e-9 * (1.0 + (1.0 + 2.0 * delta.delta) * rn * rn)));
    CHECK(rep.part_a.passed());
    CHECK(rep.part_b.passed());
  }
}

TEST_CASE("lemma 2: captured support forces a zero bound") {
  const SensingMatrix q = test::random_orthonormal(8, 9);
  const Instance inst = make_instance(q, 2, 11);
  REQUIRE(inst.trace.termination == Termination::kResidualZero);
  const RipEstimate delta = rip_delta_exhaustive(q, 6, 1000000);
  const TheoremConstants constants;

  // At l_k = K the support is fully captured: R_k = 0 and the residual
  // must already be numerically zero.
  const std::size_t lk = inst.trace.steps.size();
  const Lemma2Report rep = check_lemma2(inst.trace, inst.x, delta, constants, lk, 1);
  CHECK(rep.report.passed());
  CHECK(rep.report.violations.empty());

  const Lemma2Report start = check_lemma2(inst.trace, inst.x, delta, constants, 0, 1);
  CHECK(start.report.passed());
  CHECK(start.hypotheses.hold());
}

TEST_CASE("lemma 2 sweep over orthonormal instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SensingMatrix q = test::random_orthonormal(12, seed);
    const Instance inst = make_instance(q, 4, seed + 1);
    const RipEstimate delta = rip_delta_exhaustive(q, 8, 1000000);
    const TheoremConstants constants;
    for (std::size_t lk = 0; lk <= std::min<std::size_t>(4, inst.trace.steps.size()); ++lk) {
      for (std::size_t p = 1; p <= 4; ++p) {
        if (!residual_norm_at(inst.trace, lk + p)) continue;
        const Lemma2Report rep = check_lemma2(inst.trace, inst.x, delta, constants, lk, p);
        CHECK(rep.report.passed());
      }
    }
  }
}

TEST_CASE("lemma 3 on orthonormal instances, including the binding W = V_k case") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SensingMatrix q = test::random_orthonormal(12, seed + 20);
    const Instance inst = make_instance(q, 4, seed + 21);
    const RipEstimate delta = rip_delta_exhaustive(q, 10, 1000000);
    for (std::size_t lk = 0; lk <= std::min<std::size_t>(2, inst.trace.steps.size()); ++lk) {
      const auto lambda = support_at(inst.trace, lk);
      std::vector<std::size_t> v_k;
      for (std::size_t idx : inst.x.support) {
        bool in = false;
        for (std::size_t s : *lambda) in = in || s == idx;
        if (!in) v_k.push_back(idx);
      }
      for (std::size_t p = 1; p <= std::min<std::size_t>(2, v_k.size()); ++p) {
        for_each_combination(v_k.size(), p, [&](const std::vector<std::size_t>& pick) {
          std::vector<std::size_t> w;
          for (std::size_t pi : pick) w.push_back(v_k[pi]);
          const Lemma3Report rep = check_lemma3(inst.trace, inst.phi, inst.x, delta, lk, p, w);
          CHECK(rep.report.passed());
          if (rep.report.instances_checked > 0) {
            CHECK(rep.hypotheses.hold());
            ++checked;
          }
        });
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("lemma 3 gates: oversized W, oversized p, large coherence") {
  const SensingMatrix phi = gen_bernoulli(12, 24, 6);
  const Instance inst = make_instance(phi, 3, 6);
  const RipEstimate delta = rip_delta_exhaustive(phi, 5, 1000000);

  // K = 3: p must stay at or below K^0.8 ~ 2.41.
  std::vector<std::size_t> v0 = inst.x.support;
  const Lemma3Report too_big =
      check_lemma3(inst.trace, inst.phi, inst.x, delta, 0, 3, v0);
  CHECK(too_big.report.instances_checked == 0);
  CHECK(too_big.report.instances_skipped == 1);

  // mu >= 1/6 at 12x24, so p >= 1 always fails the coherence gate.
  const Lemma3Report mu_gate = check_lemma3(inst.trace, inst.phi, inst.x, delta, 0, 1,
                                            {inst.x.support[0]});
  CHECK(mu_gate.report.instances_checked == 0);
  CHECK(mu_gate.report.instances_skipped == 1);
  REQUIRE(!mu_gate.report.skip_reasons.empty());
  CHECK(mu_gate.report.skip_reasons[0].find("mu") != std::string::npos);

  // W not inside V_k.
  const Lemma3Report outside = check_lemma3(inst.trace, inst.phi, inst.x, delta, 0, 1, {23});
  CHECK(outside.report.instances_skipped == 1);
}

TEST_CASE("lemma checks refuse an undersized delta order") {
  const SensingMatrix q = test::random_orthonormal(8, 31);
  const Instance inst = make_instance(q, 3, 32);
  const RipEstimate delta = rip_delta_exhaustive(q, 3, 1000000);
  CHECK_THROWS_AS(check_lemma1(inst.trace, inst.x, delta, 1), Error);
  CHECK_THROWS_AS(check_lemma2(inst.trace, inst.x, delta, TheoremConstants{}, 1, 1), Error);
}

TEST_CASE("monte carlo delta demotes lemma verdicts to advisory") {
  const SensingMatrix q = test::random_orthonormal(8, 41);
  const Instance inst = make_instance(q, 2, 42);
  const RipEstimate mc = rip_delta_monte_carlo(q, 4, 5, 1);
  const Lemma1Report rep = check_lemma1(inst.trace, inst.x, mc, 0);
  CHECK(rep.part_a.advisory);
  CHECK(rep.part_b.advisory);
  CHECK(!rep.hypotheses_a.hold());
}

TEST_CASE("coherence condition boundary") {
  CHECK(coherence_condition(0.0, 10));
  CHECK(!coherence_condition(1.0 / 3.0, 2));  // boundary is strict
  CHECK(coherence_condition(0.2, 2));
  CHECK_THROWS_AS(coherence_condition(-0.1, 2), Error);
  CHECK_THROWS_AS(coherence_condition(0.5, 0), Error);
}

TEST_CASE("recovery verdicts") {
  const SensingMatrix eye = test::identity_sensing(4);
  const SparseVector x = make_sparse_vector(4, {2}, {2.0});
  const Vector y = multiply(eye.data, x.dense());
  const OmpTrace trace = omp_solve(eye, y);
  const RecoveryReport rep = verify_recovery(trace, x, 1e-8);
  CHECK(rep.success);
  CHECK(rep.support_match);
  CHECK(rep.iterations_used == 1);
  CHECK(rep.relative_error <= 1e-12);

  const SparseVector zero{4, {}, {}};
  const OmpTrace ztrace = omp_solve(eye, Vector{0, 0, 0, 0});
  const RecoveryReport zrep = verify_recovery(ztrace, zero, 1e-8);
  CHECK(zrep.success);
  CHECK(zrep.iterations_used == 0);

  // Coherence-condition regime: exactly K iterations.
  const SparseVector x3 = make_sparse_vector(6, {0, 2, 5}, {1.0, -2.0, 0.5});
  const SensingMatrix eye6 = test::identity_sensing(6);
  const OmpTrace t3 = omp_solve(eye6, multiply(eye6.data, x3.dense()));
  const RecoveryReport r3 = verify_recovery(t3, x3, 1e-8);
  CHECK(r3.success);
  CHECK(r3.iterations_used == 3);
}

TEST_CASE("zero-residual traces continue with frozen state") {
  const SensingMatrix eye = test::identity_sensing(4);
  const SparseVector x = make_sparse_vector(4, {1}, {3.0});
  const OmpTrace trace = omp_solve(eye, multiply(eye.data, x.dense()));
  REQUIRE(trace.termination == Termination::kResidualZero);
  CHECK(*residual_norm_at(trace, 5) == 0.0);
  CHECK(*support_at(trace, 5) == std::vector<std::size_t>{1});

  // A max-iterations trace has no continuation.
  const SensingMatrix phi = gen_bernoulli(8, 16, 51);
  const Vector y = test::random_vector(8, 52);
  const OmpTrace capped = omp_solve(phi, y, StopRule{0.0, 2});
  REQUIRE(capped.termination == Termination::kMaxIterations);
  CHECK(!residual_norm_at(capped, 3).has_value());
  CHECK(!support_at(capped, 3).has_value());
  CHECK_THROWS_AS(check_lemma1(capped, x, rip_delta_exhaustive(phi, 8, 1000000), 5), Error);
}

TEST_CASE("check report serialization and merging") {
  CheckReport a;
  a.claim = Claim::kTheoremA;
  a.instances_checked = 2;
  a.worst_slack = 0.5;
  CheckReport b;
  b.claim = Claim::kTheoremA;
  b.instances_checked = 3;
  b.worst_slack = 0.25;
  b.violations.push_back(CheckViolation{"l=1", 2.0, 1.0, -1.0});
  merge_report(a, b);
  CHECK(a.instances_checked == 5);
  CHECK(a.worst_slack == 0.25);
  CHECK(!a.passed());

  const std::string text = to_text(a);
  CHECK(text.find("claim theorem-a") != std::string::npos);
  CHECK(text.find("violations 1") != std::string::npos);
  CHECK(text.find("passed false") != std::string::npos);

  CheckReport c;
  c.claim = Claim::kLemma2;
  CHECK_THROWS_AS(merge_report(a, c), Error);
}
