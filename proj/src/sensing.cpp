#include "omplab/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "omplab/oracles.hpp"
#include "omplab/rng.hpp"
#include "omplab/text.hpp"

namespace omplab {

namespace {

constexpr double kUnitNormTol = 1e-12;

void validate_generated_dims(std::size_t m, std::size_t n, const char* who) {
  if (m == 0) throw DimensionError(std::string(who) + ": M must be positive");
  if (m > n) throw DimensionError(std::string(who) + ": generated ensembles need M <= N");
}

void validate_unit_columns(const DenseMatrix& a) {
  for (std::size_t c = 0; c < a.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, c) * a(r, c);
    if (std::abs(std::sqrt(s) - 1.0) > kUnitNormTol) {
      throw Error("SensingMatrix: column " + std::to_string(c) + " norm " +
                  g17(std::sqrt(s)) + " is not 1 within 1e-12");
    }
  }
}

// Full Gram matrix Phi^T Phi; fine at desk scale.
std::vector<double> gram(const SensingMatrix& phi) {
  const std::size_t m = phi.m();
  const std::size_t n = phi.n();
  std::vector<double> g(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < m; ++r) s += phi.data(r, i) * phi.data(r, j);
      g[i * n + j] = s;
      g[j * n + i] = s;
    }
  }
  return g;
}

// max(lambda_max - 1, 1 - lambda_min) for one Gram submatrix.
double subset_deviation(const std::vector<double>& g, std::size_t n,
                        const std::vector<std::size_t>& subset) {
  const std::size_t k = subset.size();
  if (k == 1) return std::abs(g[subset[0] * n + subset[0]] - 1.0);
  DenseMatrix sub(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) sub(a, b) = g[subset[a] * n + subset[b]];
  }
  const std::vector<double> eig = symmetric_eigenvalues(sub);
  return std::max(eig.back() - 1.0, 1.0 - eig.front());
}

}  // namespace

const char* ensemble_name(Ensemble e) {
  switch (e) {
    case Ensemble::kBernoulli: return "bernoulli";
    case Ensemble::kGaussianNormalized: return "gaussian-normalized";
    case Ensemble::kExplicit: return "explicit";
  }
  return "?";
}

std::optional<Ensemble> ensemble_from_name(const std::string& name) {
  if (name == "bernoulli") return Ensemble::kBernoulli;
  if (name == "gaussian-normalized" || name == "gaussian") return Ensemble::kGaussianNormalized;
  if (name == "explicit") return Ensemble::kExplicit;
  return std::nullopt;
}

SensingMatrix explicit_sensing_matrix(DenseMatrix data) {
  validate_unit_columns(data);
  SensingMatrix phi;
  phi.data = std::move(data);
  phi.ensemble = Ensemble::kExplicit;
  return phi;
}

SensingMatrix gen_bernoulli(std::size_t m, std::size_t n, std::uint64_t seed) {
  validate_generated_dims(m, n, "gen_bernoulli");
  rng::Xoshiro256 gen(rng::derive_seed(seed, {rng::purpose_tag("bernoulli")}));
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  DenseMatrix a(m, n);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) a(r, c) = gen.sign() * scale;
  }
  SensingMatrix phi;
  phi.data = std::move(a);
  phi.ensemble = Ensemble::kBernoulli;
  phi.seed = seed;
  return phi;
}

SensingMatrix gen_gaussian_normalized(std::size_t m, std::size_t n, std::uint64_t seed) {
  validate_generated_dims(m, n, "gen_gaussian_normalized");
  rng::Xoshiro256 gen(rng::derive_seed(seed, {rng::purpose_tag("gaussian")}));
  DenseMatrix a(m, n);
  std::vector<double> col(m);
  for (std::size_t c = 0; c < n; ++c) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        col[r] = gen.normal();
        norm += col[r] * col[r];
      }
      norm = std::sqrt(norm);
    } while (norm == 0.0);
    for (std::size_t r = 0; r < m; ++r) a(r, c) = col[r] / norm;
  }
  SensingMatrix phi;
  phi.data = std::move(a);
  phi.ensemble = Ensemble::kGaussianNormalized;
  phi.seed = seed;
  return phi;
}

CoherenceReport coherence(const SensingMatrix& phi) {
  const std::size_t n = phi.n();
  if (n < 2) throw DimensionError("coherence: need at least two columns");
  const std::vector<double> g = gram(phi);
  CoherenceReport rep;
  rep.mu = -1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::abs(g[i * n + j]);
      if (v > rep.mu) {
        rep.mu = v;
        rep.argmax_i = i;
        rep.argmax_j = j;
      }
    }
  }
  return rep;
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("symmetric_eigenvalues: matrix not square");
  const std::size_t n = a.rows();
  std::vector<double> w(a.entries());
  auto at = [&](std::size_t r, std::size_t c) -> double& { return w[r * n + c]; };

  double frob = 0.0;
  for (double x : w) frob += x * x;
  frob = std::sqrt(frob);
  const double tol = 1e-12 * std::max(frob, 1.0);

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r + 1; c < n; ++c) off += 2.0 * at(r, c) * at(r, c);
    }
    if (std::sqrt(off) <= tol) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double tau = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = at(i, p);
          const double aiq = at(i, q);
          at(i, p) = c * aip - s * aiq;
          at(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = at(p, i);
          const double aqi = at(q, i);
          at(p, i) = c * api - s * aqi;
          at(q, i) = s * api + c * aqi;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;  // exact: the running product is always an integer
    if (c > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(c);
}

RipEstimate rip_delta_exhaustive(const SensingMatrix& phi, std::size_t order,
                                 std::uint64_t cap) {
  const std::size_t n = phi.n();
  if (order == 0 || order > std::min(phi.m(), n)) {
    throw DimensionError("rip_delta_exhaustive: order must be in [1, min(M, N)]");
  }
  const std::uint64_t count = binomial_capped(n, order, cap);
  if (count > cap) {
    throw CapExceededError("rip_delta_exhaustive: C(" + std::to_string(n) + ", " +
                               std::to_string(order) + ") exceeds cap " + std::to_string(cap) +
                               "; use the monte-carlo estimator",
                           count, cap);
  }

  const std::vector<double> g = gram(phi);
  RipEstimate est;
  est.order = order;
  est.method = RipMethod::kExhaustive;
  double delta = 0.0;
  est.subsets_examined = for_each_combination(
      n, order, [&](const std::vector<std::size_t>& subset) {
        delta = std::max(delta, subset_deviation(g, n, subset));
      });
  est.delta = delta;
  return est;
}

RipEstimate rip_delta_monte_carlo(const SensingMatrix& phi, std::size_t order,
                                  std::uint64_t trials, std::uint64_t seed) {
  const std::size_t n = phi.n();
  if (trials == 0) throw Error("rip_delta_monte_carlo: need at least one trial");
  if (order == 0 || order > std::min(phi.m(), n)) {
    throw DimensionError("rip_delta_monte_carlo: order must be in [1, min(M, N)]");
  }

  const std::vector<double> g = gram(phi);
  RipEstimate est;
  est.order = order;
  est.method = RipMethod::kMonteCarlo;
  est.seed = seed;

  // With enough trials to cover every subset, enumerate instead; the
  // estimate then equals the exhaustive constant (still a lower bound).
  const std::uint64_t total = binomial_capped(n, order, trials);
  if (total <= trials) {
    double delta = 0.0;
    est.subsets_examined = for_each_combination(
        n, order, [&](const std::vector<std::size_t>& subset) {
          delta = std::max(delta, subset_deviation(g, n, subset));
        });
    est.delta = delta;
    return est;
  }

  double delta = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    rng::Xoshiro256 gen(rng::derive_seed(seed, {rng::purpose_tag("rip-mc"), t}));
    const std::vector<std::size_t> subset = gen.sample_combination(n, order);
    delta = std::max(delta, subset_deviation(g, n, subset));
  }
  est.subsets_examined = trials;
  est.delta = delta;
  return est;
}

double TheoremConstants::delta_of_k(std::size_t k) const {
  return small_c * std::pow(static_cast<double>(k), -0.2);
}

std::uint64_t TheoremConstants::rip_order_of_k(std::size_t k) const {
  return static_cast<std::uint64_t>(std::floor(big_c * std::pow(static_cast<double>(k), 1.2)));
}

double TheoremConstants::coherence_bound_of_k(std::size_t k) const {
  return 1.0 / (20.0 * std::pow(static_cast<double>(k), 0.8));
}

const char* hypothesis_verdict_name(HypothesisVerdict v) {
  switch (v) {
    case HypothesisVerdict::kHolds: return "holds";
    case HypothesisVerdict::kFails: return "fails";
    case HypothesisVerdict::kInfeasible: return "infeasible";
    case HypothesisVerdict::kPartial: return "partial";
  }
  return "?";
}

Theorem1Hypotheses theorem1_hypotheses(const SensingMatrix& phi, std::size_t k,
                                       const TheoremConstants& constants, std::uint64_t cap,
                                       std::uint64_t mc_trials, std::uint64_t mc_seed) {
  if (k == 0) throw Error("theorem1_hypotheses: K must be at least 1");
  Theorem1Hypotheses rep;
  rep.k = k;
  rep.constants = constants;
  rep.rip_order_required = constants.rip_order_of_k(k);
  rep.delta_required = constants.delta_of_k(k);
  rep.mu_required = constants.coherence_bound_of_k(k);
  rep.mu_measured = coherence(phi).mu;
  rep.mu_holds = rep.mu_measured <= rep.mu_required;

  const std::uint64_t max_order = std::min(phi.m(), phi.n());
  if (rep.rip_order_required > max_order) {
    // No matrix of these dimensions satisfies a restricted isometry of
    // that order with constant below 1; the hypothesis is vacuous at
    // this scale.
    rep.delta_verdict = HypothesisVerdict::kInfeasible;
    return rep;
  }

  const auto order = static_cast<std::size_t>(rep.rip_order_required);
  if (binomial_capped(phi.n(), order, cap) <= cap) {
    rep.delta_measured = rip_delta_exhaustive(phi, order, cap);
    rep.delta_verdict = rep.delta_measured->delta <= rep.delta_required
                            ? HypothesisVerdict::kHolds
                            : HypothesisVerdict::kFails;
  } else {
    rep.delta_measured = rip_delta_monte_carlo(phi, order, mc_trials, mc_seed);
    // A lower bound above the requirement already disproves the
    // hypothesis; below it the question stays open.
    rep.delta_verdict = rep.delta_measured->delta > rep.delta_required
                            ? HypothesisVerdict::kFails
                            : HypothesisVerdict::kPartial;
  }
  return rep;
}

std::string to_text(const CoherenceReport& r) {
  std::ostringstream out;
  out << "coherence " << g17(r.mu) << "\n";
  out << "argmax-pair " << r.argmax_i << " " << r.argmax_j << "\n";
  return out.str();
}

std::string to_text(const RipEstimate& r) {
  std::ostringstream out;
  out << "rip-order " << r.order << "\n";
  out << "delta " << g17(r.delta) << "\n";
  out << "method " << (r.method == RipMethod::kExhaustive ? "exhaustive" : "monte-carlo") << "\n";
  out << "subsets-examined " << r.subsets_examined << "\n";
  if (r.seed) out << "seed " << *r.seed << "\n";
  return out.str();
}

std::string to_text(const Theorem1Hypotheses& r) {
  std::ostringstream out;
  out << "k " << r.k << "\n";
  out << "constants C " << g17(r.constants.big_c) << " c " << g17(r.constants.small_c) << "\n";
  out << "rip-order-required " << r.rip_order_required << "\n";
  out << "delta-required " << g17(r.delta_required) << "\n";
  out << "mu-required " << g17(r.mu_required) << "\n";
  out << "mu-measured " << g17(r.mu_measured) << "\n";
  out << "mu-holds " << (r.mu_holds ? "true" : "false") << "\n";
  out << "delta-verdict " << hypothesis_verdict_name(r.delta_verdict) << "\n";
  if (r.delta_measured) {
    out << "delta-measured " << g17(r.delta_measured->delta) << " method "
        << (r.delta_measured->method == RipMethod::kExhaustive ? "exhaustive" : "monte-carlo")
        << "\n";
  }
  return out.str();
}

void write_matrix(std::ostream& out, const SensingMatrix& phi) {
  out << "omplab-matrix v1\n";
  out << "m " << phi.m() << "\n";
  out << "n " << phi.n() << "\n";
  out << "ensemble " << ensemble_name(phi.ensemble) << "\n";
  if (phi.seed) {
    out << "seed " << *phi.seed << "\n";
  } else {
    out << "seed none\n";
  }
  for (std::size_t r = 0; r < phi.m(); ++r) {
    for (std::size_t c = 0; c < phi.n(); ++c) {
      if (c > 0) out << ' ';
      out << g17(phi.data(r, c));
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const SensingMatrix& phi) {
  std::ostringstream out;
  write_matrix(out, phi);
  write_file(path, out.str());
}

namespace {

std::string next_line(std::istream& in, const std::string& context) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(context + ": unexpected end of file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string expect_field(std::istream& in, const std::string& key, const std::string& context) {
  const std::string line = next_line(in, context);
  const auto tokens = split_ws(line);
  if (tokens.size() != 2 || tokens[0] != key) {
    throw IoError(context + ": expected '" + key + " <value>', got '" + line + "'");
  }
  return tokens[1];
}

}  // namespace

SensingMatrix read_matrix(std::istream& in, const std::string& context) {
  const std::string header = next_line(in, context);
  if (header != "omplab-matrix v1") {
    throw IoError(context + ": not an omplab-matrix v1 file (header '" + header + "')");
  }
  const std::size_t m = parse_uint(expect_field(in, "m", context), context);
  const std::size_t n = parse_uint(expect_field(in, "n", context), context);
  const std::string ens_name = expect_field(in, "ensemble", context);
  const auto ens = ensemble_from_name(ens_name);
  if (!ens) throw IoError(context + ": unknown ensemble '" + ens_name + "'");
  const std::string seed_token = expect_field(in, "seed", context);

  if (m == 0 || n == 0) throw IoError(context + ": dimensions must be positive");
  if (*ens != Ensemble::kExplicit && m > n) {
    throw IoError(context + ": generated ensembles must have m <= n");
  }

  DenseMatrix a(m, n);
  for (std::size_t r = 0; r < m; ++r) {
    const auto tokens = split_ws(next_line(in, context));
    if (tokens.size() != n) {
      throw IoError(context + ": row " + std::to_string(r) + " has " +
                    std::to_string(tokens.size()) + " entries, expected " + std::to_string(n));
    }
    for (std::size_t c = 0; c < n; ++c) {
      const double v = parse_double(tokens[c], context);
      if (!std::isfinite(v)) throw IoError(context + ": non-finite entry");
      a(r, c) = v;
    }
  }
  validate_unit_columns(a);

  SensingMatrix phi;
  phi.data = std::move(a);
  phi.ensemble = *ens;
  if (seed_token != "none") phi.seed = parse_uint(seed_token, context);
  return phi;
}

SensingMatrix read_matrix_file(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_matrix(in, path);
}

}  // namespace omplab
