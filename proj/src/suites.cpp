#include "omplab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "omplab/rng.hpp"
#include "omplab/text.hpp"

namespace omplab::suites {

namespace {

SensingMatrix instance_matrix(const std::optional<SensingMatrix>& fixed, Ensemble ensemble,
                              std::size_t m, std::size_t n, std::uint64_t seed) {
  if (fixed) return *fixed;
  return ensemble == Ensemble::kGaussianNormalized ? gen_gaussian_normalized(m, n, seed)
                                                   : gen_bernoulli(m, n, seed);
}

}  // namespace

std::string TheoremASuiteResult::text() const {
  std::ostringstream out;
  out << "suite theorem-a instances " << instances << "\n" << to_text(report);
  return out.str();
}

TheoremASuiteResult run_theorem_a_suite(const TheoremASuiteConfig& cfg) {
  TheoremASuiteResult result;
  result.report.claim = Claim::kTheoremA;
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    const std::uint64_t seed = rng::derive_seed(cfg.seed, {rng::purpose_tag("thm-a"), i});
    const std::size_t k = cfg.k_values[i % cfg.k_values.size()];
    const SignalModel model = cfg.models[(i / cfg.k_values.size()) % cfg.models.size()];
    const SensingMatrix phi =
        instance_matrix(cfg.fixed_matrix, Ensemble::kBernoulli, cfg.m, cfg.n, seed);
    const SparseVector x = plant_signal(phi.n(), k, model, seed);
    const Vector y = multiply(phi.data, x.dense());
    const OmpTrace trace = omp_solve(phi, y, StopRule::defaults(y, phi.m()));
    merge_report(result.report, check_theorem_A(trace, x));
    ++result.instances;
  }
  return result;
}

std::string TheoremBSuiteResult::text() const {
  std::ostringstream out;
  out << "suite theorem-b instances " << instances << " vacuous " << vacuous << "\n"
      << to_text(report);
  return out.str();
}

TheoremBSuiteResult run_theorem_b_suite(const TheoremBSuiteConfig& cfg) {
  TheoremBSuiteResult result;
  result.report.claim = Claim::kTheoremB;
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    const std::uint64_t seed = rng::derive_seed(cfg.seed, {rng::purpose_tag("thm-b"), i});
    const std::size_t k = cfg.k_values[i % cfg.k_values.size()];
    const SensingMatrix phi = instance_matrix(cfg.fixed_matrix, cfg.ensemble, cfg.m, cfg.n, seed);
    const SparseVector x = plant_signal(phi.n(), k, SignalModel::kGaussianValues, seed);
    const Vector y = multiply(phi.data, x.dense());
    const OmpTrace trace = omp_solve(phi, y, StopRule::defaults(y, phi.m()));
    const double mu = coherence(phi).mu;
    const CheckReport one = check_theorem_B(trace, phi, mu, cfg.l_max, cfg.cap);
    if (one.instances_checked == 0) ++result.vacuous;
    merge_report(result.report, one);
    ++result.instances;
  }
  return result;
}

std::string LemmaSuiteResult::text() const {
  std::ostringstream out;
  out << "suite lemmas instances " << instances << " no-valid-delta "
      << instances_without_valid_delta << "\n";
  out << to_text(lemma1a) << to_text(lemma1b) << to_text(lemma2) << to_text(lemma3);
  return out.str();
}

LemmaSuiteResult run_lemma_suite(const LemmaSuiteConfig& cfg) {
  LemmaSuiteResult result;
  result.lemma1a.claim = Claim::kLemma1a;
  result.lemma1b.claim = Claim::kLemma1b;
  result.lemma2.claim = Claim::kLemma2;
  result.lemma3.claim = Claim::kLemma3;

  for (std::size_t i = 0; i < cfg.instances; ++i) {
    const std::uint64_t seed = rng::derive_seed(cfg.seed, {rng::purpose_tag("lemmas"), i});
    const std::size_t k = cfg.k_values[i % cfg.k_values.size()];
    const SensingMatrix phi =
        instance_matrix(cfg.fixed_matrix, Ensemble::kBernoulli, cfg.m, cfg.n, seed);
    const SparseVector x = plant_signal(phi.n(), k, SignalModel::kGaussianValues, seed);
    const Vector y = multiply(phi.data, x.dense());
    const OmpTrace trace = omp_solve(phi, y, StopRule::defaults(y, phi.m()));
    ++result.instances;

    // Steps with defined supports; past the trace the support freezes
    // only after a zero-residual stop.
    const std::size_t horizon = trace.steps.size();

    // Largest order whose exhaustive constant is still a usable
    // restricted isometry bound (delta <= 1/2, so at least the energy
    // inequality's constant applies). delta grows with the order, so
    // scan upward and stop at the first failure.
    std::optional<RipEstimate> delta;
    const std::size_t max_order = std::min({cfg.order_cap, k + horizon, phi.m(), phi.n()});
    for (std::size_t order = std::max<std::size_t>(k, 1); order <= max_order; ++order) {
      const RipEstimate est = rip_delta_exhaustive(phi, order, cfg.cap);
      if (est.delta > 0.5) break;
      delta = est;
    }
    if (!delta) {
      ++result.instances_without_valid_delta;
      const std::string reason = "instance " + std::to_string(i) +
                                 ": no restricted isometry constant <= 1/2 at order " +
                                 std::to_string(k);
      result.lemma1a.instances_skipped += 1;
      result.lemma1a.skip_reasons.push_back(reason);
      result.lemma1b.instances_skipped += 1;
      result.lemma1b.skip_reasons.push_back(reason);
      result.lemma2.instances_skipped += 1;
      result.lemma2.skip_reasons.push_back(reason);
      result.lemma3.instances_skipped += 1;
      result.lemma3.skip_reasons.push_back(reason);
      continue;
    }

    const std::size_t max_l = delta->order - k;
    const std::string tag = "i=" + std::to_string(i) + ",";

    for (std::size_t l = 0; l <= std::min(max_l, horizon); ++l) {
      const Lemma1Report rep = check_lemma1(trace, x, *delta, l);
      if (rep.hypotheses_a.hold()) {
        CheckReport prefixed = rep.part_a;
        if (!prefixed.violations.empty()) prefixed.violations[0].instance.insert(0, tag);
        merge_report(result.lemma1a, prefixed);
      } else {
        result.lemma1a.instances_skipped += 1;
        result.lemma1a.skip_reasons.push_back(tag + "l=" + std::to_string(l) +
                                              ": delta > 1/3");
      }
      if (rep.hypotheses_b.hold()) {
        CheckReport prefixed = rep.part_b;
        if (!prefixed.violations.empty()) prefixed.violations[0].instance.insert(0, tag);
        merge_report(result.lemma1b, prefixed);
      } else {
        result.lemma1b.instances_skipped += 1;
        result.lemma1b.skip_reasons.push_back(tag + "l=" + std::to_string(l) +
                                              ": delta > 1/2");
      }
    }

    for (std::size_t l_k = 0; l_k <= std::min(max_l, horizon); ++l_k) {
      for (std::size_t p = 1; p <= cfg.p_max; ++p) {
        if (!residual_norm_at(trace, l_k + p)) continue;
        const Lemma2Report rep = check_lemma2(trace, x, *delta, cfg.constants, l_k, p);
        if (rep.hypotheses.hold()) {
          CheckReport prefixed = rep.report;
          if (!prefixed.violations.empty()) prefixed.violations[0].instance.insert(0, tag);
          merge_report(result.lemma2, prefixed);
        } else {
          result.lemma2.instances_skipped += 1;
          result.lemma2.skip_reasons.push_back(tag + "l_k=" + std::to_string(l_k) +
                                               ",p=" + std::to_string(p) + ": delta > 1/3");
        }
      }
    }

    for (std::size_t l_k = 0; l_k <= std::min(max_l, horizon); ++l_k) {
      const auto lambda = support_at(trace, l_k);
      std::vector<std::size_t> v_k;
      for (std::size_t idx : x.support) {
        if (std::find(lambda->begin(), lambda->end(), idx) == lambda->end()) v_k.push_back(idx);
      }
      for (std::size_t p = 1; p <= std::min(cfg.p_max, v_k.size()); ++p) {
        // The two-step bound needs the constant at order K + l_k + 2p.
        if (k + l_k + 2 * p > delta->order) continue;
        if (!support_at(trace, l_k + 2 * p)) continue;
        for_each_combination(v_k.size(), p, [&](const std::vector<std::size_t>& pick) {
          std::vector<std::size_t> w;
          for (std::size_t pi : pick) w.push_back(v_k[pi]);
          const Lemma3Report rep = check_lemma3(trace, phi, x, *delta, l_k, p, w);
          if (rep.report.instances_skipped > 0 || rep.hypotheses.hold()) {
            CheckReport prefixed = rep.report;
            if (!prefixed.violations.empty()) prefixed.violations[0].instance.insert(0, tag);
            for (std::string& reason : prefixed.skip_reasons) reason.insert(0, tag);
            merge_report(result.lemma3, prefixed);
          } else {
            result.lemma3.instances_skipped += 1;
            result.lemma3.skip_reasons.push_back(tag + "l_k=" + std::to_string(l_k) + ",p=" +
                                                 std::to_string(p) + ": delta out of range");
          }
        });
      }
    }
  }
  return result;
}

std::string CoherenceRecoverySuiteResult::text() const {
  std::ostringstream out;
  out << "suite coherence-recovery\n";
  for (const CoherenceRecoveryKStats& s : per_k) {
    out << "k " << s.k << " trials " << s.trials << " eligible " << s.eligible << " recovered "
        << s.recovered << "\n";
  }
  out << "failures " << failures.size() << "\n";
  for (const std::string& f : failures) out << "failure " << f << "\n";
  out << "passed " << (passed() ? "true" : "false") << "\n";
  return out.str();
}

CoherenceRecoverySuiteResult run_coherence_recovery_suite(const CoherenceRecoverySuiteConfig& cfg) {
  CoherenceRecoverySuiteResult result;
  for (std::size_t k : cfg.k_values) {
    CoherenceRecoveryKStats stats;
    stats.k = k;
    stats.trials = cfg.trials;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const std::uint64_t seed = rng::derive_seed(cfg.seed, {rng::purpose_tag("coh-rec"), k, t});
      const SensingMatrix phi = gen_bernoulli(cfg.m, cfg.n, seed);
      const double mu = coherence(phi).mu;
      if (!coherence_condition(mu, k)) continue;
      ++stats.eligible;

      const SparseVector x = plant_signal(cfg.n, k, SignalModel::kUnitValues, seed);
      const Vector y = multiply(phi.data, x.dense());
      const OmpTrace trace = omp_solve(phi, y, StopRule::defaults(y, cfg.m));
      const RecoveryReport rec = verify_recovery(trace, x, cfg.tol);
      if (rec.success && rec.iterations_used == k) {
        ++stats.recovered;
      } else {
        result.failures.push_back("k=" + std::to_string(k) + ",trial=" + std::to_string(t) +
                                  ",mu=" + g17(mu) + ",iters=" +
                                  std::to_string(rec.iterations_used) + ",rel-err=" +
                                  g17(rec.relative_error));
      }
    }
    result.per_k.push_back(stats);
  }
  return result;
}

std::string OracleEquivalenceSuiteResult::text() const {
  std::ostringstream out;
  out << "suite oracle-equivalence instances " << instances << " unique " << unique_solution
      << " omp-succeeded " << omp_succeeded << " matched " << matched << "\n";
  out << "omp-success-rate "
      << g17(unique_solution == 0
                 ? 0.0
                 : static_cast<double>(omp_succeeded) / static_cast<double>(unique_solution))
      << "\n";
  out << "failures " << failures.size() << "\n";
  for (const std::string& f : failures) out << "failure " << f << "\n";
  out << "passed " << (passed() ? "true" : "false") << "\n";
  return out.str();
}

OracleEquivalenceSuiteResult run_oracle_equivalence_suite(const OracleEquivalenceSuiteConfig& cfg) {
  OracleEquivalenceSuiteResult result;
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    const std::uint64_t seed = rng::derive_seed(cfg.seed, {rng::purpose_tag("oracle-eq"), i});
    const SensingMatrix phi = gen_bernoulli(cfg.m, cfg.n, seed);
    const SparseVector x = plant_signal(cfg.n, cfg.k, SignalModel::kGaussianValues, seed);
    const Vector y = multiply(phi.data, x.dense());
    ++result.instances;

    const double tol = 1e-9 * std::max(1.0, y.norm());
    const std::vector<SparseVector> solutions = l0_decode_exhaustive(phi, y, cfg.k, tol);
    if (solutions.size() != 1) continue;
    ++result.unique_solution;

    const OmpTrace trace = omp_solve(phi, y, StopRule::defaults(y, cfg.m));
    const RecoveryReport rec = verify_recovery(trace, x, cfg.match_tol);
    if (!rec.success) continue;
    ++result.omp_succeeded;

    const Vector xhat = reconstruct(trace, trace.steps.size());
    const Vector sol = solutions.front().dense();
    double diff = 0.0;
    for (std::size_t j = 0; j < sol.size(); ++j) {
      const double d = xhat[j] - sol[j];
      diff += d * d;
    }
    const double rel = std::sqrt(diff) / std::max(solutions.front().norm(), 1e-30);
    if (rel <= cfg.match_tol) {
      ++result.matched;
    } else {
      result.failures.push_back("instance=" + std::to_string(i) + ",rel=" + g17(rel));
    }
  }
  return result;
}

BinomialInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return BinomialInterval{0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return BinomialInterval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<MonotonicityViolation> grid_monotonicity_violations(const GridResult& result) {
  // Two-sided 99% normal quantile.
  const double z = 2.5758293035489004;
  std::vector<MonotonicityViolation> violations;

  std::vector<std::size_t> ms = result.config.m_values;
  std::sort(ms.begin(), ms.end());
  std::vector<std::size_t> ks = result.config.k_values;
  std::sort(ks.begin(), ks.end());

  auto find_cell = [&](std::size_t m, std::size_t k) -> const GridCell* {
    for (const GridCell& cell : result.cells) {
      if (cell.m == m && cell.k == k) return &cell;
    }
    return nullptr;
  };

  for (std::size_t m : ms) {
    for (std::size_t j = 0; j + 1 < ks.size(); ++j) {
      const GridCell* low = find_cell(m, ks[j]);
      const GridCell* high = find_cell(m, ks[j + 1]);
      if (low == nullptr || high == nullptr) continue;
      if (high->success_rate() <= low->success_rate()) continue;
      const BinomialInterval a = wilson_interval(low->successes, low->trials, z);
      const BinomialInterval b = wilson_interval(high->successes, high->trials, z);
      const bool overlap = a.lo <= b.hi && b.lo <= a.hi;
      if (!overlap) {
        violations.push_back(MonotonicityViolation{m, ks[j], ks[j + 1], low->success_rate(),
                                                   high->success_rate()});
      }
    }
  }
  return violations;
}

}  // namespace omplab::suites
