#include "omplab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "omplab/text.hpp"

namespace omplab {

namespace {

// All checkers use an additive tolerance scaled by the bound magnitude,
// absorbing floating-point error only.
double check_tol(double rhs) { return 1e-9 * (1.0 + std::abs(rhs)); }

void record_instance(CheckReport& report, std::string instance, double lhs, double rhs) {
  ++report.instances_checked;
  const double slack = rhs - lhs;
  report.worst_slack = std::min(report.worst_slack, slack);
  if (lhs > rhs + check_tol(rhs)) {
    report.violations.push_back(CheckViolation{std::move(instance), lhs, rhs, slack});
  }
}

void record_skip(CheckReport& report, std::string reason) {
  ++report.instances_skipped;
  report.skip_reasons.push_back(std::move(reason));
}

// Indices of supp(x) not contained in lambda.
std::vector<std::size_t> support_difference(const std::vector<std::size_t>& base,
                                            const std::vector<std::size_t>& lambda) {
  std::vector<std::size_t> out;
  for (std::size_t idx : base) {
    if (std::find(lambda.begin(), lambda.end(), idx) == lambda.end()) out.push_back(idx);
  }
  return out;
}

// max l for the theorem-B range: floor(1/(20 mu)), unbounded when mu = 0.
std::size_t theorem_b_range(double mu, std::size_t l_max) {
  if (mu <= 0.0) return l_max;
  const double bound = 1.0 / (20.0 * mu);
  if (bound >= 1e18) return l_max;
  if (bound < 1.0) return 0;
  return std::min<std::size_t>(l_max, static_cast<std::size_t>(std::floor(bound)));
}

// Largest delta for which the stated (1 + 2 delta) tail constant of the
// two-step energy bound is implied: 9 (1 + delta)(1 + 2 delta) <= 10.
const double kLemma3DeltaBound = (std::sqrt(801.0) - 27.0) / 36.0;

LemmaHypotheses lemma_hypotheses(const RipEstimate& delta, double delta_bound,
                                 std::size_t order_needed, bool size_condition) {
  LemmaHypotheses h;
  h.delta_exhaustive = delta.method == RipMethod::kExhaustive;
  h.delta_is_rip = delta.delta < 1.0;
  h.delta_in_range = delta.delta <= delta_bound;
  h.order_sufficient = delta.order >= order_needed;
  h.size_condition = size_condition;
  return h;
}

}  // namespace

const char* claim_name(Claim c) {
  switch (c) {
    case Claim::kTheoremA: return "theorem-a";
    case Claim::kTheoremB: return "theorem-b";
    case Claim::kLemma1a: return "lemma-1a";
    case Claim::kLemma1b: return "lemma-1b";
    case Claim::kLemma2: return "lemma-2";
    case Claim::kLemma3: return "lemma-3";
    case Claim::kCoherenceCondition: return "coherence-condition";
  }
  return "?";
}

void merge_report(CheckReport& agg, const CheckReport& one) {
  if (agg.claim != one.claim) throw Error("merge_report: claim mismatch");
  agg.instances_checked += one.instances_checked;
  agg.instances_skipped += one.instances_skipped;
  agg.skip_reasons.insert(agg.skip_reasons.end(), one.skip_reasons.begin(),
                          one.skip_reasons.end());
  agg.violations.insert(agg.violations.end(), one.violations.begin(), one.violations.end());
  agg.advisory = agg.advisory || one.advisory;
  agg.worst_slack = std::min(agg.worst_slack, one.worst_slack);
  if (one.observed_max_ratio) {
    agg.observed_max_ratio = agg.observed_max_ratio
                                 ? std::max(*agg.observed_max_ratio, *one.observed_max_ratio)
                                 : *one.observed_max_ratio;
  }
}

std::string to_text(const CheckReport& r) {
  std::ostringstream out;
  out << "omplab-check v1\n";
  out << "claim " << claim_name(r.claim) << "\n";
  out << "instances-checked " << r.instances_checked << "\n";
  out << "instances-skipped " << r.instances_skipped << "\n";
  out << "violations " << r.violations.size() << "\n";
  out << "worst-slack " << g17(r.worst_slack) << "\n";
  out << "advisory " << (r.advisory ? "true" : "false") << "\n";
  out << "passed " << (r.passed() ? "true" : "false") << "\n";
  if (r.observed_max_ratio) out << "observed-max-ratio " << g17(*r.observed_max_ratio) << "\n";
  for (const CheckViolation& v : r.violations) {
    out << "violation " << v.instance << " lhs " << g17(v.lhs) << " rhs " << g17(v.rhs)
        << " slack " << g17(v.slack) << "\n";
  }
  return out.str();
}

std::optional<double> residual_norm_at(const OmpTrace& trace, std::size_t l) {
  if (l == 0) return trace.y.norm();
  if (l <= trace.steps.size()) return trace.steps[l - 1].residual_norm;
  if (trace.termination == Termination::kResidualZero) return 0.0;
  return std::nullopt;
}

std::optional<std::vector<std::size_t>> support_at(const OmpTrace& trace, std::size_t l) {
  if (l == 0) return std::vector<std::size_t>{};
  if (l <= trace.steps.size()) return trace.steps[l - 1].support;
  if (trace.termination == Termination::kResidualZero) {
    return trace.steps.empty() ? std::vector<std::size_t>{} : trace.steps.back().support;
  }
  return std::nullopt;
}

CheckReport check_theorem_A(const OmpTrace& trace, const SparseVector& x) {
  const Vector phix = multiply(trace.matrix.data, x.dense());
  double diff = 0.0;
  for (std::size_t i = 0; i < phix.size(); ++i) {
    const double d = trace.y[i] - phix[i];
    diff += d * d;
  }
  if (std::sqrt(diff) > 1e-9 * trace.y.norm() + 1e-12) {
    throw Error("check_theorem_A: trace right-hand side is not phi * x");
  }

  CheckReport report;
  report.claim = Claim::kTheoremA;
  const double l1 = x.l1_norm();
  for (std::size_t l = 1; l <= trace.steps.size(); ++l) {
    const double lhs = trace.steps[l - 1].residual_norm;
    const double rhs = l1 / std::sqrt(static_cast<double>(l));
    record_instance(report, "l=" + std::to_string(l), lhs, rhs);
  }
  return report;
}

CheckReport check_theorem_B(const OmpTrace& trace, const SensingMatrix& phi, double mu,
                            std::size_t l_max, std::uint64_t cap) {
  if (!(mu >= 0.0 && mu <= 1.0 + 1e-12)) throw Error("check_theorem_B: mu outside [0, 1]");
  CheckReport report;
  report.claim = Claim::kTheoremB;

  const std::size_t hi = theorem_b_range(mu, l_max);
  for (std::size_t l = 1; l <= hi; ++l) {
    const auto rn = residual_norm_at(trace, 2 * l);
    if (!rn) {
      throw Error("check_theorem_B: trace has no step " + std::to_string(2 * l) +
                  " and did not stop at zero residual");
    }
    const double sigma = best_l_term_error(phi, trace.y, l, cap).sigma;
    const double lhs = *rn;
    const double rhs = 3.0 * sigma;
    record_instance(report, "l=" + std::to_string(l), lhs, rhs);
    if (sigma > 1e-12) {
      const double ratio = lhs / sigma;
      report.observed_max_ratio =
          report.observed_max_ratio ? std::max(*report.observed_max_ratio, ratio) : ratio;
    }
  }
  return report;
}

Lemma1Report check_lemma1(const OmpTrace& trace, const SparseVector& x,
                          const RipEstimate& delta, std::size_t l) {
  const std::size_t k = x.sparsity();
  if (delta.order < k + l) {
    throw Error("check_lemma1: delta order " + std::to_string(delta.order) +
                " below K + l = " + std::to_string(k + l));
  }
  const auto lambda = support_at(trace, l);
  if (!lambda) throw Error("check_lemma1: step " + std::to_string(l) + " beyond trace");
  const auto rn = residual_norm_at(trace, l);

  const std::size_t effective = std::min(l, trace.steps.size());
  const Vector z = error_vector(trace, x, effective);
  const std::vector<std::size_t> remaining = support_difference(x.support, *lambda);
  const double energy_remaining = support_energy(x, remaining);

  double lhs_a = 0.0;
  for (std::size_t idx : *lambda) lhs_a += z[idx] * z[idx];

  Lemma1Report rep;
  const TheoremConstants constants;
  const bool size_ok =
      static_cast<double>(l + k) <= constants.big_c * std::pow(static_cast<double>(k), 1.2);

  rep.part_a.claim = Claim::kLemma1a;
  rep.part_a.advisory = delta.method == RipMethod::kMonteCarlo;
  record_instance(rep.part_a, "l=" + std::to_string(l), lhs_a,
                  3.0 * delta.delta * energy_remaining);
  rep.hypotheses_a = lemma_hypotheses(delta, 1.0 / 3.0, k + l, size_ok);

  rep.part_b.claim = Claim::kLemma1b;
  rep.part_b.advisory = rep.part_a.advisory;
  record_instance(rep.part_b, "l=" + std::to_string(l), energy_remaining,
                  (1.0 + 2.0 * delta.delta) * (*rn) * (*rn));
  rep.hypotheses_b = lemma_hypotheses(delta, 0.5, k + l, size_ok);
  return rep;
}

Lemma2Report check_lemma2(const OmpTrace& trace, const SparseVector& x,
                          const RipEstimate& delta, const TheoremConstants& constants,
                          std::size_t l_k, std::size_t p) {
  if (p == 0) throw Error("check_lemma2: p must be at least 1");
  const std::size_t k = x.sparsity();
  if (delta.order < k + l_k) {
    throw Error("check_lemma2: delta order below K + l_k");
  }
  const auto lambda = support_at(trace, l_k);
  if (!lambda) throw Error("check_lemma2: step " + std::to_string(l_k) + " beyond trace");
  const auto rn = residual_norm_at(trace, l_k + p);
  if (!rn) {
    throw Error("check_lemma2: step " + std::to_string(l_k + p) +
                " beyond trace without zero residual");
  }

  const double r_k = support_energy(x, support_difference(x.support, *lambda));
  const double kd = static_cast<double>(k);
  const double rhs = (r_k / static_cast<double>(p)) *
                     (6.0 * delta.delta * constants.big_c * std::pow(kd, 1.2) + 2.0 * kd);

  Lemma2Report rep;
  rep.report.claim = Claim::kLemma2;
  rep.report.advisory = delta.method == RipMethod::kMonteCarlo;
  record_instance(rep.report, "l_k=" + std::to_string(l_k) + ",p=" + std::to_string(p),
                  (*rn) * (*rn), rhs);
  const bool size_ok =
      static_cast<double>(l_k + k) <= constants.big_c * std::pow(kd, 1.2);
  rep.hypotheses = lemma_hypotheses(delta, 1.0 / 3.0, k + l_k, size_ok);
  return rep;
}

Lemma3Report check_lemma3(const OmpTrace& trace, const SensingMatrix& phi,
                          const SparseVector& x, const RipEstimate& delta,
                          std::size_t l_k, std::size_t p,
                          const std::vector<std::size_t>& w) {
  Lemma3Report rep;
  rep.report.claim = Claim::kLemma3;
  rep.report.advisory = delta.method == RipMethod::kMonteCarlo;

  const std::size_t k = x.sparsity();
  const auto lambda_lk = support_at(trace, l_k);
  if (!lambda_lk) throw Error("check_lemma3: step " + std::to_string(l_k) + " beyond trace");
  const std::vector<std::size_t> v_k = support_difference(x.support, *lambda_lk);

  const std::string where =
      "l_k=" + std::to_string(l_k) + ",p=" + std::to_string(p) + ",|W|=" + std::to_string(w.size());

  if (p == 0 || w.size() != p) {
    record_skip(rep.report, where + ": |W| != p");
    return rep;
  }
  for (std::size_t idx : w) {
    if (std::find(v_k.begin(), v_k.end(), idx) == v_k.end()) {
      record_skip(rep.report, where + ": W not inside V_k");
      return rep;
    }
  }
  if (static_cast<double>(p) > std::pow(static_cast<double>(k), 0.8)) {
    record_skip(rep.report, where + ": p > K^0.8");
    return rep;
  }
  const double mu = phi.n() >= 2 ? coherence(phi).mu : 0.0;
  if (mu > 0.0 && static_cast<double>(p) > 1.0 / (20.0 * mu)) {
    record_skip(rep.report, where + ": p > 1/(20 mu), mu=" + g17(mu));
    return rep;
  }

  const auto lambda_after = support_at(trace, l_k + 2 * p);
  if (!lambda_after) {
    throw Error("check_lemma3: step " + std::to_string(l_k + 2 * p) +
                " beyond trace without zero residual");
  }

  const double lhs = support_energy(x, support_difference(v_k, *lambda_after));
  const double r_k = support_energy(x, v_k);
  const double rhs = 10.0 * support_energy(x, support_difference(v_k, w)) +
                     30.0 * delta.delta * r_k;
  record_instance(rep.report, where, lhs, rhs);

  const TheoremConstants constants;
  const bool size_ok = static_cast<double>(l_k + 2 * p + k) <=
                       constants.big_c * std::pow(static_cast<double>(k), 1.2);
  rep.hypotheses = lemma_hypotheses(delta, kLemma3DeltaBound, k + l_k + 2 * p, size_ok);
  return rep;
}

bool coherence_condition(double mu, std::size_t k) {
  if (k == 0) throw Error("coherence_condition: K must be at least 1");
  if (!(mu >= 0.0 && mu <= 1.0)) throw Error("coherence_condition: mu outside [0, 1]");
  return mu < 1.0 / (2.0 * static_cast<double>(k) - 1.0);
}

std::string to_text(const RecoveryReport& r) {
  std::ostringstream out;
  out << "success " << (r.success ? "true" : "false") << "\n";
  out << "support-match " << (r.support_match ? "true" : "false") << "\n";
  out << "relative-error " << g17(r.relative_error) << "\n";
  out << "iterations-used " << r.iterations_used << "\n";
  return out.str();
}

RecoveryReport verify_recovery(const OmpTrace& trace, const SparseVector& x, double tol) {
  if (x.ambient_dim != trace.matrix.n()) {
    throw DimensionError("verify_recovery: signal dimension does not match N");
  }
  RecoveryReport rep;
  rep.iterations_used = trace.steps.size();

  const std::vector<std::size_t> final_support =
      trace.steps.empty() ? std::vector<std::size_t>{} : trace.steps.back().support;
  rep.support_match = true;
  for (std::size_t idx : x.support) {
    if (std::find(final_support.begin(), final_support.end(), idx) == final_support.end()) {
      rep.support_match = false;
      break;
    }
  }

  const Vector xhat = reconstruct(trace, trace.steps.size());
  const Vector xd = x.dense();
  double diff = 0.0;
  for (std::size_t i = 0; i < xd.size(); ++i) {
    const double d = xhat[i] - xd[i];
    diff += d * d;
  }
  rep.relative_error = std::sqrt(diff) / std::max(x.norm(), 1e-30);
  rep.success = rep.support_match && rep.relative_error <= tol;
  return rep;
}

}  // namespace omplab
