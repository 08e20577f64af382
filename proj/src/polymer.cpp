#include "nipoly/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "nipoly/errors.hpp"
#include "nipoly/parallel.hpp"
#include "nipoly/special.hpp"
#include "nipoly/stats.hpp"

namespace nipoly {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Walks the box [x, x + (A,B)] row by row with a rolling buffer along the
// shorter side. visit(row_index, row_values) runs after each row.
template <class Combine, class Visit>
void sweep_box(const SiteFn& omega, double beta, Point x, std::int64_t d1, std::int64_t d2, bool include_start,
               Combine combine, Visit visit) {
  const bool transposed = d1 > d2;
  const std::int64_t A = transposed ? d2 : d1;  // buffer length - 1
  const std::int64_t B = transposed ? d1 : d2;  // number of rows - 1
  auto site = [&](std::int64_t a, std::int64_t b) {
    return transposed ? Point{x.x1 + b, x.x2 + a} : Point{x.x1 + a, x.x2 + b};
  };
  std::vector<double> row(static_cast<std::size_t>(A + 1), kNegInf);
  for (std::int64_t b = 0; b <= B; ++b) {
    for (std::int64_t a = 0; a <= A; ++a) {
      double prev;
      if (a == 0 && b == 0) {
        row[0] = include_start ? beta * omega(x) : 0.0;
        continue;
      }
      const double below = row[a];                       // previous row, same a
      const double left = a > 0 ? row[a - 1] : kNegInf;  // this row, a - 1
      prev = combine(below, left);
      row[a] = prev + beta * omega(site(a, b));
    }
    visit(b, row, transposed);
  }
}

std::vector<double> source_sweep(const SiteFn& omega, double beta, Point x, const std::vector<Point>& targets,
                                 bool include_start, bool tropical) {
  std::vector<double> out(targets.size(), kNegInf);
  std::int64_t d1 = -1, d2 = -1;
  for (const Point& t : targets) {
    if (precedes(x, t)) {
      d1 = std::max(d1, t.x1 - x.x1);
      d2 = std::max(d2, t.x2 - x.x2);
    }
  }
  if (d1 < 0) return out;
  auto visit = [&](std::int64_t b, const std::vector<double>& row, bool transposed) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const Point& t = targets[i];
      if (!precedes(x, t)) continue;
      const std::int64_t tb = transposed ? t.x1 - x.x1 : t.x2 - x.x2;
      const std::int64_t ta = transposed ? t.x2 - x.x2 : t.x1 - x.x1;
      if (tb == b) out[i] = row[ta];
    }
  };
  if (tropical) {
    sweep_box(omega, beta, x, d1, d2, include_start, [](double a, double b) { return std::max(a, b); }, visit);
  } else {
    sweep_box(omega, beta, x, d1, d2, include_start, [](double a, double b) { return log_add_exp(a, b); },
              visit);
  }
  return out;
}

template <unsigned Digits>
using RealN = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>,
                                            boost::multiprecision::et_off>;

// e^w as m 2^n with the mantissa rounded to double. Any positive weights give
// a positive determinant, so the rounding only perturbs the environment.
template <class Real>
Real weight_of(double w) {
  const double n = std::floor(w / std::log(2.0));
  return ldexp(Real(std::exp(w - n * std::log(2.0))), static_cast<int>(n));
}

// Linear-space partition functions; the exponent range of Real makes overflow
// a non-issue at any lattice size we can sweep.
template <class Real>
std::vector<Real> source_sweep_extended(const SiteFn& omega, double beta, Point x,
                                        const std::vector<Point>& targets, bool include_start) {
  std::vector<Real> out(targets.size(), Real(0));
  std::int64_t d1 = -1, d2 = -1;
  for (const Point& t : targets) {
    if (precedes(x, t)) {
      d1 = std::max(d1, t.x1 - x.x1);
      d2 = std::max(d2, t.x2 - x.x2);
    }
  }
  if (d1 < 0) return out;
  std::vector<Real> row(static_cast<std::size_t>(d1 + 1), Real(0));
  for (std::int64_t b = 0; b <= d2; ++b) {
    for (std::int64_t a = 0; a <= d1; ++a) {
      const Point z{x.x1 + a, x.x2 + b};
      if (a == 0 && b == 0) {
        row[0] = include_start ? weight_of<Real>(beta * omega(z)) : Real(1);
        continue;
      }
      Real s = row[a];
      if (a > 0) s += row[a - 1];
      row[a] = s * weight_of<Real>(beta * omega(z));
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const Point& t = targets[i];
      if (precedes(x, t) && t.x2 - x.x2 == b) out[i] = row[t.x1 - x.x1];
    }
  }
  return out;
}

// Determinant and log Hadamard gap of a row-major n x n matrix.
template <class Real>
LogDet det_extended(std::vector<Real> a, std::size_t n) {
  double hadamard = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Real norm2 = 0;
    for (std::size_t j = 0; j < n; ++j) norm2 += a[i * n + j] * a[i * n + j];
    if (norm2 == 0) return {LogSigned::zero(), std::numeric_limits<double>::infinity()};
    hadamard += 0.5 * static_cast<double>(log(norm2));
  }
  int sign = 1;
  Real logabs = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (abs(a[i * n + k]) > abs(a[piv * n + k])) piv = i;
    }
    if (a[piv * n + k] == 0) return {LogSigned::zero(), std::numeric_limits<double>::infinity()};
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      sign = -sign;
    }
    const Real pivot = a[k * n + k];
    if (pivot < 0) sign = -sign;
    logabs += log(abs(pivot));
    for (std::size_t i = k + 1; i < n; ++i) {
      const Real factor = a[i * n + k] / pivot;
      if (factor == 0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= factor * a[k * n + j];
    }
  }
  const double logmag = static_cast<double>(logabs);
  return {LogSigned::from_log(logmag, sign), hadamard - logmag};
}

// One precision tier. Accepted when the Hadamard gap leaves at least
// kSpareNats of working precision.
template <unsigned Digits>
bool try_tier(const SiteFn& omega, double beta, const KPoint& xs, const KPoint& ys, bool include_start,
              LogDet& out) {
  constexpr double kSpareNats = 30.0;
  using Real = RealN<Digits>;
  const std::size_t k = xs.k();
  std::vector<Real> a(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto row = source_sweep_extended<Real>(omega, beta, xs[i], ys.points(), include_start);
    for (std::size_t j = 0; j < k; ++j) a[i * k + j] = row[j];
  }
  out = det_extended(std::move(a), k);
  return out.value.sign() > 0 && out.cancellation_nats < Digits * std::log(10.0) - kSpareNats;
}

}  // namespace

SiteFn site_fn(const UniformField& field, const WeightSpec& spec) {
  return [field, spec](Point z) { return spec.omega(field.at(z)); };
}

SiteFn constant_site_fn(double c) {
  return [c](Point) { return c; };
}

std::vector<double> single_source_logZ(const SiteFn& omega, double beta, Point x,
                                       const std::vector<Point>& targets, bool include_start) {
  return source_sweep(omega, beta, x, targets, include_start, false);
}

double single_path_logZ(const SiteFn& omega, double beta, Point x, Point y, bool include_start) {
  if (!precedes(x, y)) throw NoPathError("single_path_logZ: end point is not north-east of start");
  return single_source_logZ(omega, beta, x, {y}, include_start)[0];
}

LogMatrix lgv_matrix(const SiteFn& omega, double beta, const KPoint& xs, const KPoint& ys, bool include_start) {
  if (xs.k() != ys.k()) throw DomainError("lgv_matrix: k-points of different size");
  const std::size_t k = xs.k();
  LogMatrix m(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto row = single_source_logZ(omega, beta, xs[i], ys.points(), include_start);
    for (std::size_t j = 0; j < k; ++j) m(i, j) = LogSigned::from_log(row[j]);
  }
  return m;
}

LgvResult kpath_logZ_lgv_detail(const SiteFn& omega, double beta, const KPoint& xs, const KPoint& ys,
                                bool include_start) {
  if (xs.k() != ys.k()) throw DomainError("kpath_logZ_lgv: k-points of different size");
  const LogMatrix m = lgv_matrix(omega, beta, xs, ys, include_start);
  LogDet d = logdet_checked(m);
  LgvResult r{d.value, d.cancellation_nats, false};
  if (!(d.cancellation_nats <= kDeterminantEscalationNats) || d.value.sign() <= 0) {
    // Recompute the entries as well as the elimination: double entries carry
    // ~1e-16 relative error, which the cancellation would amplify.
    LogDet e;
    const bool ok = try_tier<50>(omega, beta, xs, ys, include_start, e) ||
                    try_tier<200>(omega, beta, xs, ys, include_start, e) ||
                    try_tier<800>(omega, beta, xs, ys, include_start, e) ||
                    try_tier<3200>(omega, beta, xs, ys, include_start, e);
    r.value = ok ? e.value : LogSigned::zero();
    r.cancellation_nats = e.cancellation_nats;
    r.extended_precision = true;
  }
  if (r.value.sign() <= 0) {
    throw PrecisionError("kpath_logZ_lgv: determinant is not positive (" + std::to_string(r.cancellation_nats) +
                         " nats of cancellation)");
  }
  return r;
}

LogSigned kpath_logZ_lgv(const SiteFn& omega, double beta, const KPoint& xs, const KPoint& ys,
                         bool include_start) {
  return kpath_logZ_lgv_detail(omega, beta, xs, ys, include_start).value;
}

double kpath_energy(const SiteFn& omega, const KPath& p, bool include_start) {
  double e = 0.0;
  for (const Path& c : p.components) {
    for (std::size_t i = include_start ? 0 : 1; i < c.size(); ++i) e += omega(c[i]);
  }
  return e;
}

LogSigned kpath_logZ_bruteforce(const SiteFn& omega, double beta, const KPoint& xs, const KPoint& ys,
                                std::int64_t cap, bool include_start) {
  std::vector<double> terms;
  for_each_kpath(xs, ys, cap, [&](const KPath& p) { terms.push_back(beta * kpath_energy(omega, p, include_start)); });
  if (terms.empty()) return LogSigned::zero();
  const double top = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  return LogSigned::from_log(top + std::log(s));
}

std::pair<KPoint, KPoint> rectangle_endpoints(int N, int m, int k) {
  if (k < 1 || k > m || k > N) throw DomainError("rectangle_endpoints: need 1 <= k <= min(N, m)");
  return {stack_up({1, 1}, k), stack_down({N, m}, k)};
}

double log_tau(const SiteFn& log_zeta, int N, int m, int k) {
  if (m < 0 || k < 0 || k > m || k > N) throw DomainError("log_tau: need 0 <= k <= m and k <= N");
  if (k == 0) return 0.0;
  const auto [xs, ys] = rectangle_endpoints(N, m, k);
  if (k == m) {
    // The only k-path fills the rectangle.
    double s = 0.0;
    for (int j = 1; j <= m; ++j)
      for (int i = 1; i <= N; ++i) s += log_zeta({i, j});
    return s;
  }
  return kpath_logZ_lgv(log_zeta, 1.0, xs, ys, true).logmag();
}

double log_tau_tilde(const SiteFn& log_zeta, int N, int m, int k) {
  // tau~ on the m-wide, N-tall rectangle is tau of the reflected field.
  const SiteFn reflected = [&log_zeta](Point z) { return log_zeta({z.x2, z.x1}); };
  return log_tau(reflected, N, m, k);
}

double log_tau(const UniformField& field, double mu, int N, int m, int k) {
  return log_tau(site_fn(field, WeightSpec::log_gamma(mu)), N, m, k);
}

double log_tau_tilde(const UniformField& field, double mu, int N, int m, int k) {
  return log_tau_tilde(site_fn(field, WeightSpec::log_gamma(mu)), N, m, k);
}

double last_passage_single(const SiteFn& e, Point x, Point y) {
  if (!precedes(x, y)) throw NoPathError("last_passage: end point is not north-east of start");
  return source_sweep(e, 1.0, x, {y}, true, true)[0];
}

double last_passage(const SiteFn& e, int N, int m, int k, std::int64_t cap) {
  const auto [xs, ys] = rectangle_endpoints(N, m, k);
  if (k == 1) return last_passage_single(e, xs[0], ys[0]);
  double best = kNegInf;
  for_each_kpath(xs, ys, cap, [&](const KPath& p) { best = std::max(best, kpath_energy(e, p, true)); });
  return best;
}

double free_energy_replica(const WeightSpec& spec, double beta, double c, int N, std::uint64_t seed,
                           std::uint64_t r) {
  if (N < 2 || !(c > 0.0)) throw DomainError("free_energy_mc: need N >= 2, c > 0");
  const auto height = static_cast<std::int64_t>(std::floor(c * N));
  if (height < 1) throw DomainError("free_energy_mc: c N < 1");
  const UniformField field{replica_seed(seed, r)};
  return single_path_logZ(site_fn(field, spec), beta, Point{1, 1}, Point{N, height}) / N;
}

FreeEnergyEstimate free_energy_mc(const WeightSpec& spec, double beta, double c, int N, int replicas,
                                  std::uint64_t seed, unsigned threads) {
  if (N < 2 || replicas < 1 || !(c > 0.0)) throw DomainError("free_energy_mc: need N >= 2, replicas >= 1, c > 0");
  if (std::floor(c * N) < 1) throw DomainError("free_energy_mc: c N < 1");
  FreeEnergyEstimate est;
  est.N = N;
  est.replicas = replicas;
  est.samples = parallel_map<double>(static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
    return free_energy_replica(spec, beta, c, N, seed, r);
  });
  est.estimate = mean(est.samples);
  est.std_error = std_error(est.samples);
  return est;
}

double free_energy_beta0(double c) {
  if (!(c > 0.0)) throw DomainError("free_energy_beta0: c must be positive");
  return (c + 1.0) * std::log(c + 1.0) - c * std::log(c);
}

double rost_ell(double c) {
  if (!(c >= 0.0)) throw DomainError("rost_ell: c must be non-negative");
  const double r = 1.0 + std::sqrt(c);
  return r * r;
}

double sepp_argmax(double mu, double c) {
  if (!(mu > 0.0) || !(c > 0.0)) throw DomainError("sepp_free_energy: need mu > 0 and c > 0");
  // The objective is concave; its derivative c psi1(theta) - psi1(mu - theta)
  // decreases from +inf to -inf on (0, mu).
  double lo = 0.0, hi = mu;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * mu; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (c * trigamma(mid) - trigamma(mu - mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double sepp_free_energy(double mu, double c) {
  const double t = sepp_argmax(mu, c);
  return -(c * digamma(t) + digamma(mu - t));
}

IneqReport ineq_theorem_check(double mu, double c, double cprime) {
  if (!(0.0 < c && c < cprime)) throw DomainError("ineq_theorem_check: need 0 < c < c'");
  IneqReport r;
  const double bnu = -digamma(mu);
  r.f_c = sepp_free_energy(mu, c);
  r.f_cprime = sepp_free_energy(mu, cprime);
  r.lower = r.f_c + (cprime - c) * bnu;
  r.upper = (cprime / c) * r.f_c - (cprime / c - 1.0) * bnu;
  const double slack = 1e-12 * (1.0 + std::fabs(r.f_cprime));
  r.holds = r.lower <= r.f_cprime + slack && r.f_cprime <= r.upper + slack;
  return r;
}

namespace {
double varpi_of(const KPoint& xs, const KPoint& ys) {
  double s = 0.0;
  for (std::size_t i = 0; i < xs.k(); ++i) s += static_cast<double>(l1_distance(xs[i], ys[i]));
  return s;
}

LogSigned kpath_logZ(const SiteFn& omega, double beta, const KPoint& xs, const KPoint& ys) {
  if (xs.k() == 1) return LogSigned::from_log(single_path_logZ(omega, beta, xs[0], ys[0]));
  return kpath_logZ_lgv(omega, beta, xs, ys);
}
}  // namespace

SandwichReport jensen_sandwich_check(const WeightSpec& spec, const KPoint& xs, const KPoint& ys, double beta,
                                     int replicas, std::uint64_t seed, unsigned threads) {
  if (replicas < 2) throw DomainError("jensen_sandwich_check: need at least two replicas");
  SandwichReport r;
  r.replicas = replicas;
  r.varpi = varpi_of(xs, ys);
  if (r.varpi <= 0.0) throw DomainError("jensen_sandwich_check: zero total displacement");
  r.lower = beta * spec.mean();
  r.upper = spec.log_mgf(beta);
  const double log_z0 = kpath_logZ(constant_site_fn(0.0), 0.0, xs, ys).logmag();
  const auto samples = parallel_map<double>(static_cast<std::size_t>(replicas), threads, [&](std::size_t i) {
    const UniformField field{replica_seed(seed, i)};
    return (kpath_logZ(site_fn(field, spec), beta, xs, ys).logmag() - log_z0) / r.varpi;
  });
  r.mean = mean(samples);
  r.std_error = std_error(samples);
  const double band = 3.0 * r.std_error + 1e-12;
  r.inside = r.mean >= r.lower - band && r.mean <= r.upper + band;
  return r;
}

double w_limit(double c, double alpha) {
  if (!(alpha >= 0.0) || alpha > std::min(c, 1.0) + 1e-15) throw DomainError("w_limit: need 0 <= alpha <= min(c,1)");
  auto Q = [](double u) { return u <= 0.0 ? 0.0 : 0.5 * u * u * std::log(u); };
  return Q(1 + c - alpha) + Q(1 - alpha) + Q(c - alpha) + Q(alpha) - Q(c) - Q(c + 1 - 2 * alpha);
}

ScaledKReport scaled_k_check(int N, double c, double alpha) {
  ScaledKReport r;
  const auto m = static_cast<std::int64_t>(std::floor(c * N));
  const auto k = static_cast<std::int64_t>(std::floor(alpha * N));
  const double n2 = static_cast<double>(N) * N;
  r.value = macmahon_log_count(N, m, k) / n2;
  r.w = w_limit(c, alpha);
  r.gap = std::fabs(r.value - r.w);
  return r;
}

ScaledSandwichReport scaled_sandwich_check(const WeightSpec& spec, double beta, int N, double c, double alpha,
                                           int replicas, std::uint64_t seed, unsigned threads) {
  if (replicas < 2) throw DomainError("scaled_sandwich_check: need at least two replicas");
  const int m = static_cast<int>(std::floor(c * N));
  const int k = static_cast<int>(std::floor(alpha * N));
  const auto [xs, ys] = rectangle_endpoints(N, m, k);
  const double n2 = static_cast<double>(N) * N;
  const double varpi = varpi_of(xs, ys);
  const double log_z0 = macmahon_log_count(N, m, k);
  const double bnu = beta * spec.mean();
  const double log_g = spec.log_mgf(beta);
  ScaledSandwichReport r;
  r.lower = (log_z0 + varpi * bnu) / n2;
  r.upper = (log_z0 + varpi * log_g) / n2;
  const double w = w_limit(c, alpha);
  const double len = alpha * (1.0 + c - alpha);
  r.asymptotic_lower = w + len * bnu;
  r.asymptotic_upper = w + len * log_g;
  const auto samples = parallel_map<double>(static_cast<std::size_t>(replicas), threads, [&](std::size_t i) {
    const UniformField field{replica_seed(seed, i)};
    return kpath_logZ_lgv(site_fn(field, spec), beta, xs, ys).logmag() / n2;
  });
  r.mean = mean(samples);
  r.std_error = std_error(samples);
  const double band = 3.0 * r.std_error + 1e-12;
  r.inside = r.mean >= r.lower - band && r.mean <= r.upper + band;
  return r;
}

BoundConfiguration default_bound_configuration() {
  // (1,1),(1,2) -> (3,2),(2,3) -> (4,3),(4,4) inside a 4x4 box.
  return {KPoint({{1, 1}, {1, 2}}), stack_diag({3, 2}, 2), KPoint({{4, 3}, {4, 4}}), 1};
}

BoundReport parallel_series_bound_mc(const WeightSpec& spec, const BoundConfiguration& cfg, double beta,
                                     int replicas, std::uint64_t seed, std::int64_t cap) {
  const std::size_t k = cfg.x.k();
  if (cfg.y.k() != k || cfg.z.k() != k) throw DomainError("bound check: k-points of different size");
  if (!is_nice(cfg.y)) throw DomainError("bound check: intermediate k-point must be nice");
  if (cfg.split < 1 || static_cast<std::size_t>(cfg.split) >= k) throw DomainError("bound check: bad split");
  auto part = [](const KPoint& v, std::size_t from, std::size_t to) {
    return KPoint(std::vector<Point>(v.points().begin() + from, v.points().begin() + to));
  };
  const KPoint x1 = part(cfg.x, 0, cfg.split), x2 = part(cfg.x, cfg.split, k);
  const KPoint y1 = part(cfg.y, 0, cfg.split), y2 = part(cfg.y, cfg.split, k);
  constexpr double kTol = 1e-10;
  BoundReport r;
  r.min_series_slack = r.min_parallel_slack = r.min_separating_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < replicas; ++s) {
    const UniformField field{replica_seed(seed, s)};
    const SiteFn w = site_fn(field, spec);
    auto logz = [&](const KPoint& a, const KPoint& b) {
      return kpath_logZ_bruteforce(w, beta, a, b, cap).logmag();
    };
    const double zxy = logz(cfg.x, cfg.y);
    const double zyz = logz(cfg.y, cfg.z);
    const double zxz = logz(cfg.x, cfg.z);
    const double series = zxz - (zxy + zyz);
    const double parallel = logz(x1, y1) + logz(x2, y2) - zxy;
    double separate = -zxy;
    for (std::size_t i = 0; i < k; ++i) separate += single_path_logZ(w, beta, cfg.x[i], cfg.y[i]);
    const double scale = 1.0 + std::fabs(zxz);
    if (series < -kTol * scale) ++r.series_violations;
    if (parallel < -kTol * scale) ++r.parallel_violations;
    if (separate < -kTol * scale) ++r.separating_violations;
    r.min_series_slack = std::min(r.min_series_slack, series);
    r.min_parallel_slack = std::min(r.min_parallel_slack, parallel);
    r.min_separating_slack = std::min(r.min_separating_slack, separate);
    ++r.samples;
  }
  return r;
}

KLinearityReport k_linearity_probe(const WeightSpec& spec, double beta, int N, int replicas, std::uint64_t seed,
                                   unsigned threads) {
  if (N < 2 || replicas < 2) throw DomainError("k_linearity_probe: need N >= 2 and two replicas");
  const KPoint xs = stack_up({1, 1}, 2);
  const KPoint ys = stack_up({N, N}, 2);
  struct Pair {
    double two = 0.0, one = 0.0;
  };
  const auto samples = parallel_map<Pair>(static_cast<std::size_t>(replicas), threads, [&](std::size_t i) {
    const UniformField field{replica_seed(seed, i)};
    const SiteFn w = site_fn(field, spec);
    return Pair{kpath_logZ_lgv(w, beta, xs, ys).logmag() / N, single_path_logZ(w, beta, {1, 1}, {N, N}) / N};
  });
  std::vector<double> two, one, gap;
  for (const Pair& p : samples) {
    two.push_back(p.two);
    one.push_back(p.one);
    gap.push_back(p.two - 2.0 * p.one);
  }
  KLinearityReport r;
  r.two_path = mean(two);
  r.two_path_se = std_error(two);
  r.single = mean(one);
  r.single_se = std_error(one);
  r.gap = mean(gap);
  r.gap_se = std_error(gap);
  r.within_3se = std::fabs(r.gap) <= 3.0 * r.gap_se;
  return r;
}

}  // namespace nipoly
