#include "nipoly/limit_shapes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nipoly/environment.hpp"
#include "nipoly/errors.hpp"
#include "nipoly/parallel.hpp"
#include "nipoly/polymer.hpp"
#include "nipoly/quadrature.hpp"
#include "nipoly/special.hpp"
#include "nipoly/stats.hpp"

namespace nipoly {

namespace {

void check_unit_square(double s, double t, const char* who) {
  if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)) throw DomainError(std::string(who) + ": need (s,t) in [0,1]^2");
}

double xlogx(double u) { return u > 0.0 ? u * std::log(u) : 0.0; }
}  // namespace

// ---------------------------------------------------------------- MP law

double mp_lower_edge(double c) { return (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c)); }
double mp_upper_edge(double c) { return (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c)); }

double mp_density(double c, double u) {
  const double lo = mp_lower_edge(c), hi = mp_upper_edge(c);
  if (!(u > lo && u < hi)) return 0.0;
  return std::sqrt((hi - u) * (u - lo)) / (2.0 * kPi * c * u);
}

namespace {
// c * nu_c([a + b cos(theta0), M_c]) with u = a + b cos(theta); the Jacobian
// cancels the square-root edges.
double mp_mass_theta(double c, double theta0) {
  const double a = 1.0 + c, b = 2.0 * std::sqrt(c);
  if (theta0 <= 0.0) return 0.0;
  auto g = [a, b](double th) {
    const double s = std::sin(th);
    const double den = a + b * std::cos(th);
    return den > 0.0 ? s * s / den : 0.0;
  };
  return b * b / (2.0 * kPi) * integrate(g, 0.0, std::min(theta0, kPi), 1e-15, 1e-14);
}

void check_mp(double c) {
  if (!(c > 0.0 && c <= 1.0)) throw DomainError("MP law: need 0 < c <= 1");
}
}  // namespace

double mp_mass(double c, double rho) {
  check_mp(c);
  const double a = 1.0 + c, b = 2.0 * std::sqrt(c);
  const double x = std::clamp((rho - a) / b, -1.0, 1.0);
  return mp_mass_theta(c, std::acos(x));
}

double mp_quantile(double c, double alpha) {
  check_mp(c);
  if (!(alpha >= 0.0 && alpha <= c)) throw DomainError("mp_quantile: need 0 <= alpha <= c");
  const double a = 1.0 + c, b = 2.0 * std::sqrt(c);
  if (alpha == 0.0) return mp_upper_edge(c);
  if (alpha == c) return mp_lower_edge(c);
  double lo = 0.0, hi = kPi;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mp_mass_theta(c, mid) < alpha) lo = mid; else hi = mid;
  }
  return a + b * std::cos(0.5 * (lo + hi));
}

// ---------------------------------------------------------- semicircle

double sc_density(double u) { return std::fabs(u) < 2.0 ? std::sqrt(4.0 - u * u) / (2.0 * kPi) : 0.0; }

double sc_cdf(double u) {
  if (u <= -2.0) return 0.0;
  if (u >= 2.0) return 1.0;
  const double phi = std::asin(u / 2.0);
  return 0.5 + phi / kPi + std::sin(phi) * std::cos(phi) / kPi;
}

double sc_quantile(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("sc_quantile: need x in [0,1]");
  // phi + sin phi cos phi is increasing on [-pi/2, pi/2].
  const double target = kPi * (0.5 - x);
  double lo = -kPi / 2, hi = kPi / 2;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid + std::sin(mid) * std::cos(mid) < target) lo = mid; else hi = mid;
  }
  return 2.0 * std::sin(0.5 * (lo + hi));
}

double F_sc_check(double phi) {
  if (!(phi > -kPi / 2 && phi < kPi / 2)) throw DomainError("F_sc_check: need |phi| < pi/2");
  const double closed = 0.5 + phi / kPi + std::sin(phi) * std::cos(phi) / kPi;
  // u = -2 + v^2 removes the square-root edge at -2.
  const double vmax = std::sqrt(2.0 + 2.0 * std::sin(phi));
  auto g = [](double v) { return v * v * std::sqrt(std::max(0.0, 4.0 - v * v)) / kPi; };
  const double quad = integrate(g, 0.0, vmax, 1e-15, 1e-15);
  return std::fabs(closed - quad);
}

// -------------------------------------------------------- limit shapes

double xi_mp(double s, double t) {
  check_unit_square(s, t, "xi_mp");
  if (s > t) std::swap(s, t);
  const double c = 1.0 - t + s;
  if (c <= 0.0) return 1.0;
  return mp_quantile(c, std::min(s, c));
}

double xi_ht(double s, double t) {
  check_unit_square(s, t, "xi_ht");
  if (s > t) std::swap(s, t);
  return xlogx(s) + 2.0 * xlogx(2.0 - s - t) - xlogx(2.0 - t) - xlogx(1.0 - t) - xlogx(1.0 - s);
}

double xi_sc(double s, double t) {
  check_unit_square(s, t, "xi_sc");
  if (s > t) std::swap(s, t);
  const double c = 1.0 - t + s;
  if (c <= 0.0) return 0.0;
  return std::sqrt(c) * sc_quantile(std::min(1.0, s / c));
}

double xi_edge_bottom(double mu, double t) {
  if (!(mu > 0.0) || !(t >= 0.0 && t <= 1.0)) throw DomainError("xi_edge_bottom: need mu > 0, t in [0,1]");
  if (t == 1.0) return -digamma(mu);
  return sepp_free_energy(mu, 1.0 - t);
}

double xi_edge_top(double mu, double t) {
  if (!(mu > 0.0) || !(t >= 0.0 && t <= 1.0)) throw DomainError("xi_edge_top: need mu > 0, t in [0,1]");
  // t = 0: the sup is the limit theta -> 0. t = 1: the limit theta -> inf.
  if (t == 0.0) return -digamma(mu);
  if (t == 1.0) return 0.0;
  auto slope = [&](double th) { return t * trigamma(th) - trigamma(mu + th); };
  double lo = 0.0, hi = 1.0;
  while (slope(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericError("xi_edge_top: no bracket");
  }
  for (int it = 0; it < 300 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0) lo = mid; else hi = mid;
  }
  const double th = 0.5 * (lo + hi);
  return t * digamma(th) - digamma(mu + th);
}

DiagonalFreeEnergyReport diagonal_free_energy_check(double mu, double c, int N, int replicas, std::uint64_t seed,
                                                    unsigned threads) {
  if (!(mu > 0.0) || !(c > 0.0 && c <= 1.0) || N < 1 || replicas < 2)
    throw DomainError("diagonal_free_energy_check: bad arguments");
  const int m = static_cast<int>(std::lround(c * N));
  if (m < 1) throw DomainError("diagonal_free_energy_check: cN rounds to zero");
  const auto spec = WeightSpec::log_gamma(mu);
  const auto vals = parallel_map<double>(static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
    const UniformField f{replica_seed(seed, r)};
    double s = 0.0;
    for (int j = 1; j <= m; ++j)
      for (int i = 1; i <= N; ++i) s += spec.omega(f.at({i, j}));
    return s / (static_cast<double>(N) * N);
  });
  DiagonalFreeEnergyReport r;
  r.N = N;
  r.replicas = replicas;
  const double ce = static_cast<double>(m) / N;
  r.estimate = mean(vals);
  r.std_error = std_error(vals);
  r.target = -ce * digamma(mu);
  r.variance = variance(vals);
  r.variance_target = ce * trigamma(mu) / (static_cast<double>(N) * N);
  r.within_3se = std::fabs(r.estimate - r.target) <= 3.0 * r.std_error;
  return r;
}

// ------------------------------------------------------ bead tension

ExtendedReal bead_sigma_tilted(double p, double q) {
  // s, t < 0 in untilted slopes is exactly p < 0, |q| < |p|/2, which is
  // also where the cosine stays positive.
  if (!(p < 0.0) || !(std::fabs(q) < -0.5 * p)) return ExtendedReal::plus_infinity();
  const double c = std::cos(kPi * q / -p);
  if (!(c > 0.0)) return ExtendedReal::plus_infinity();
  return ExtendedReal::finite(-std::log(-p) - std::log(c));
}

ExtendedReal bead_sigma(double s, double t) { return bead_sigma_tilted(s + t, 0.5 * (t - s)); }

double bead_omega(double u) {
  if (!(std::fabs(u) < 0.5)) throw DomainError("bead_omega: need |u| < 1/2");
  return -std::log(std::cos(kPi * u));
}

double bead_omega_prime(double u) {
  if (!(std::fabs(u) < 0.5)) throw DomainError("bead_omega_prime: need |u| < 1/2");
  return kPi * std::tan(kPi * u);
}

double bead_scaling_residual(double p, double q, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("bead_scaling_residual: need lambda > 0");
  const auto a = bead_sigma_tilted(lambda * p, lambda * q);
  const auto b = bead_sigma_tilted(p, q);
  if (a.infinite != b.infinite) return INFINITY;
  if (a.infinite) return 0.0;
  return std::fabs(a.value - (b.value - std::log(lambda)));
}

double sc_principal_value(double a) {
  if (!(std::fabs(a) < 2.0)) throw DomainError("sc_principal_value: need |a| < 2");
  // u = 2 sin(theta): f_sc(u) du = (2/pi) cos^2 theta d theta, and
  // a - 2 sin(theta) = 4 cos((theta0 + theta)/2) sin((theta0 - theta)/2).
  const double th0 = std::asin(a / 2.0);
  auto h = [th0](double th) {
    const double c = std::cos(th);
    const double den = 4.0 * std::cos(0.5 * (th0 + th)) * std::sin(0.5 * (th0 - th));
    return (2.0 / kPi) * c * c / den;
  };
  const double delta = 0.5 * std::min(th0 + kPi / 2, kPi / 2 - th0);
  // Pairing theta0 +- t cancels the odd part of the pole.
  auto paired = [&](double t) { return t == 0.0 ? 0.0 : h(th0 + t) + h(th0 - t); };
  const double left = integrate(h, -kPi / 2, th0 - delta, 1e-14, 1e-13);
  const double right = integrate(h, th0 + delta, kPi / 2, 1e-14, 1e-13);
  const double mid = integrate(paired, 0.0, delta, 1e-14, 1e-13);
  return left + mid + right;
}

namespace {
// xi_sc in the tilted coordinates (r, tau).
double xi_sc_tilted(double r, double tau) {
  return std::sqrt(1.0 - tau) * sc_quantile(std::clamp((r - tau / 2.0) / (1.0 - tau), 0.0, 1.0));
}
}  // namespace

std::vector<double> default_phi_grid(int n) {
  std::vector<double> g;
  for (int k = 1; k <= n; ++k) g.push_back(-kPi / 2 + k * kPi / (n + 1));
  return g;
}

OmegaIdentityReport omega_identity_check(const std::vector<double>& phi_grid) {
  OmegaIdentityReport rep;
  for (double phi : phi_grid) {
    if (!(std::fabs(phi) < kPi / 2)) throw DomainError("omega_identity_check: need |phi| < pi/2");
    OmegaIdentityRow row;
    row.phi = phi;
    const double c = std::cos(phi), s = std::sin(phi);
    row.rho_prime = -kPi / c;
    row.dtau_xi = phi / c;
    row.tension_term = bead_omega_prime(row.dtau_xi / row.rho_prime) / row.rho_prime;
    row.riesz_closed = -s;
    row.riesz_numeric = -sc_principal_value(2.0 * s);
    row.residual_closed = std::fabs(row.tension_term + row.riesz_closed);
    row.residual_numeric = std::fabs(row.riesz_numeric - row.riesz_closed);
    row.residual_alt_reading = std::fabs(c * std::tan(kPi * phi) + row.riesz_closed);

    const double r = 0.5 - phi / kPi - s * c / kPi;
    const double h = 1e-6 * std::min({1.0, r, 1.0 - r});
    if (h > 0.0) {
      const double rp = (sc_quantile(r + h) - sc_quantile(r - h)) / (2.0 * h);
      const double dt = (xi_sc_tilted(r, h) - xi_sc_tilted(r, -h)) / (2.0 * h);
      row.rho_prime_fd_error = std::fabs(rp - row.rho_prime) / std::fabs(row.rho_prime);
      row.dtau_xi_fd_error = std::fabs(dt - row.dtau_xi) / std::max(1.0, std::fabs(row.dtau_xi));
    }
    rep.max_residual_closed = std::max(rep.max_residual_closed, row.residual_closed);
    rep.max_residual_numeric = std::max(rep.max_residual_numeric, row.residual_numeric);
    rep.max_residual_alt_reading = std::max(rep.max_residual_alt_reading, row.residual_alt_reading);
    rep.max_fd_error = std::max({rep.max_fd_error, row.rho_prime_fd_error, row.dtau_xi_fd_error});
    rep.rows.push_back(row);
  }
  return rep;
}

AffineWulffReport affine_wulff_check(double b) {
  if (!(b < 0.0)) throw DomainError("affine_wulff_check: need b < 0");
  AffineWulffReport r;
  r.b = b;
  const double w = -b;
  r.argmin = golden_min(
      [b](double f) {
        const auto v = bead_sigma_tilted(b, f);
        return v.infinite ? INFINITY : v.value;
      },
      -w, w, 1e-12);
  r.lhs = 0.5 * bead_sigma_tilted(b, r.argmin).value;
  // int int_{0<s<t<1} log(t-s) = int_0^1 (1-u) log u du.
  r.log_integral = integrate([](double u) { return (1.0 - u) * std::log(u); }, 0.0, 1.0, 1e-15, 1e-15);
  r.rhs = -(0.5 * std::log(-b) + r.log_integral) - 0.75;
  r.residual = std::fabs(r.lhs - r.rhs);
  return r;
}

// ----------------------------------------------------- random matrices

HermitianMatrix gue_matrix(int N, std::uint64_t seed) {
  if (N < 1) throw DomainError("gue_matrix: need N >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const double h = std::sqrt(0.5);
  HermitianMatrix H(N);
  for (int i = 0; i < N; ++i) {
    H(i, i) = g(rng);
    for (int j = i + 1; j < N; ++j) {
      const double re = h * g(rng), im = h * g(rng);
      H(i, j) = {re, im};
      H(j, i) = {re, -im};
    }
  }
  return H;
}

HermitianMatrix lue_matrix(int N, int m, std::uint64_t seed) {
  if (m < 1 || m > N) throw DomainError("lue_matrix: need 1 <= m <= N");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const double h = std::sqrt(0.5);
  std::vector<std::complex<double>> X(static_cast<std::size_t>(m) * N);
  for (auto& x : X) {
    const double re = h * g(rng);
    x = {re, h * g(rng)};
  }
  HermitianMatrix H(m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      std::complex<double> s = 0.0;
      for (int k = 0; k < N; ++k) s += X[static_cast<std::size_t>(i) * N + k] * std::conj(X[static_cast<std::size_t>(j) * N + k]);
      if (i == j) s.imag(0.0);
      H(i, j) = s;
      H(j, i) = std::conj(s);
    }
  }
  return H;
}

std::vector<double> gue_sample(int N, std::uint64_t seed) { return hermitian_eigenvalues(gue_matrix(N, seed)); }
std::vector<double> lue_sample(int N, int m, std::uint64_t seed) { return hermitian_eigenvalues(lue_matrix(N, m, seed)); }

InterfaceGrid minors_process(const HermitianMatrix& h) {
  const int N = h.n;
  std::vector<std::vector<double>> ev(static_cast<std::size_t>(N) + 1);
  for (int k = 1; k <= N; ++k) ev[static_cast<std::size_t>(k)] = hermitian_eigenvalues(h.minor(k));
  InterfaceGrid g(N);
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j)
      g(i, j) = ev[static_cast<std::size_t>(N - std::abs(i - j))][static_cast<std::size_t>(std::min(i, j) - 1)];
  return g;
}

QuantileGapReport gue_semicircle_gap(int N, int samples, std::uint64_t seed, unsigned threads) {
  if (samples < 1) throw DomainError("gue_semicircle_gap: need samples >= 1");
  const auto runs = parallel_map<std::vector<double>>(static_cast<std::size_t>(samples), threads,
                                                      [&](std::size_t s) { return gue_sample(N, replica_seed(seed, s)); });
  std::vector<double> pooled;
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  for (const auto& r : runs)
    for (double v : r) pooled.push_back(v * scale);
  std::sort(pooled.begin(), pooled.end());
  QuantileGapReport rep;
  rep.samples = samples;
  for (int k = 0; k <= 90; ++k) {
    const double x = 0.05 + 0.01 * k;
    const double gap = std::fabs(empirical_quantile(pooled, 1.0 - x) - sc_quantile(x));
    if (gap > rep.sup_gap) {
      rep.sup_gap = gap;
      rep.at_alpha = x;
    }
  }
  return rep;
}

QuantileGapReport lue_mp_gap(int N, int m, int samples, std::uint64_t seed, unsigned threads) {
  if (samples < 1) throw DomainError("lue_mp_gap: need samples >= 1");
  const auto runs = parallel_map<std::vector<double>>(static_cast<std::size_t>(samples), threads,
                                                      [&](std::size_t s) { return lue_sample(N, m, replica_seed(seed, s)); });
  std::vector<double> pooled;
  for (const auto& r : runs)
    for (double v : r) pooled.push_back(v / N);
  std::sort(pooled.begin(), pooled.end());
  const double c = static_cast<double>(m) / N;
  QuantileGapReport rep;
  rep.samples = samples;
  for (int k = 0; k <= 90; ++k) {
    const double alpha = c * (0.05 + 0.01 * k);
    const double gap = std::fabs(empirical_quantile(pooled, 1.0 - alpha / c) - mp_quantile(c, alpha));
    if (gap > rep.sup_gap) {
      rep.sup_gap = gap;
      rep.at_alpha = alpha;
    }
  }
  return rep;
}

JohanssonReport johansson_check(int N, int m, int k, int samples, std::uint64_t seed, unsigned threads) {
  if (!(1 <= k && k <= m && m <= N) || samples < 2) throw DomainError("johansson_check: need 1 <= k <= m <= N");
  const std::uint64_t lpp_seed = fmix64(seed ^ 0x243f6a8885a308d3ULL);
  const std::uint64_t eig_seed = fmix64(seed ^ 0x13198a2e03707344ULL);
  const auto lpp = parallel_map<double>(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
    const UniformField f{replica_seed(lpp_seed, s)};
    return last_passage([&f](Point z) { return coupled_exponential(f, z); }, N, m, k);
  });
  const auto eig = parallel_map<double>(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
    const auto ev = lue_sample(N, m, replica_seed(eig_seed, s));
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += ev[static_cast<std::size_t>(i)];
    return sum;
  });
  JohanssonReport r;
  r.N = N;
  r.m = m;
  r.k = k;
  r.samples = samples;
  r.mean_lpp = mean(lpp);
  r.se_lpp = std_error(lpp);
  r.var_lpp = variance(lpp);
  r.mean_eig = mean(eig);
  r.se_eig = std_error(eig);
  r.var_eig = variance(eig);
  r.mean_z = (r.mean_lpp - r.mean_eig) / std::hypot(r.se_lpp, r.se_eig);
  r.ks = ks_two_sample(lpp, eig);
  r.means_agree = std::fabs(r.mean_z) < 3.0;
  return r;
}

// -------------------------------------------------------- fluctuations

FluctuationReport fluctuation_mc(double kappa, int N, const std::vector<double>& t_grid, int samples,
                                 std::uint64_t seed, unsigned threads) {
  if (!(kappa > 0.0) || N < 2 || samples < 4) throw DomainError("fluctuation_mc: bad arguments");
  for (double t : t_grid)
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("fluctuation_mc: need t in (0,1]");
  const double mu = kappa * N * N;
  const double log_mu = std::log(mu);
  const auto spec = WeightSpec::log_gamma(mu);
  const double sk = std::sqrt(kappa);
  // Per sample: cumulative row sums of (log zeta + log mu), rows j = 1..N.
  const auto cums = parallel_map<std::vector<double>>(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
    const UniformField f{replica_seed(seed, s)};
    std::vector<double> cum(static_cast<std::size_t>(N) + 1, 0.0);
    for (int j = 1; j <= N; ++j) {
      double row = 0.0;
      for (int i = 1; i <= N; ++i) row += spec.omega(f.at({i, j})) + log_mu;
      cum[static_cast<std::size_t>(j)] = cum[static_cast<std::size_t>(j) - 1] + sk * row;
    }
    return cum;
  });
  auto at_m = [&](int m) {
    std::vector<double> v;
    v.reserve(cums.size());
    for (const auto& c : cums) v.push_back(c[static_cast<std::size_t>(m)]);
    return v;
  };
  FluctuationReport rep;
  rep.kappa = kappa;
  rep.N = N;
  rep.samples = samples;
  for (double t : t_grid) {
    FluctuationRow row;
    row.t = t;
    row.m = static_cast<int>(std::floor(t * N + 1e-9));
    const auto v = at_m(row.m);
    const double sites = static_cast<double>(row.m) * N;
    row.mean = mean(v);
    row.mean_se = std_error(v);
    row.mean_exact = sk * sites * (log_mu - digamma(mu));
    row.mean_limit = sk * t / (2.0 * kappa);
    row.variance = variance(v);
    row.variance_exact = kappa * sites * trigamma(mu);
    row.skewness = skewness(v);
    row.excess_kurtosis = excess_kurtosis(v);
    rep.rows.push_back(row);
  }
  const auto half = at_m(N / 2), full = at_m(N);
  std::vector<double> inc(full.size());
  for (std::size_t i = 0; i < full.size(); ++i) inc[i] = full[i] - half[i];
  rep.increment_correlation = correlation(half, inc);
  return rep;
}

double superfactorial_asymptotic_check(double p, int N) {
  if (!(p > 0.0) || N < 1) throw DomainError("superfactorial_asymptotic_check: need p > 0, N >= 1");
  const double pn = p * N;
  const auto n = static_cast<std::int64_t>(std::llround(pn));
  if (std::fabs(pn - static_cast<double>(n)) > 1e-9 || n < 2)
    throw DomainError("superfactorial_asymptotic_check: pN must be an integer >= 2");
  const double N2 = static_cast<double>(N) * N;
  const double predicted = 0.5 * p * p * std::log(p) + 0.5 * p * p * std::log(static_cast<double>(N)) - 0.75 * p * p;
  return std::fabs(log_superfactorial(n) / N2 - predicted);
}

double xi_ht_gap(int N, int grid) {
  if (N < 1 || grid < 1) throw DomainError("xi_ht_gap: need N, grid >= 1");
  const auto th = theta_min(N);
  double gap = 0.0;
  for (int a = 0; a <= grid; ++a) {
    for (int b = 0; b <= grid; ++b) {
      const double s = static_cast<double>(a) / grid, t = static_cast<double>(b) / grid;
      gap = std::max(gap, std::fabs(rescaled_value(th, s, t) - xi_ht(s, t)));
    }
  }
  return gap;
}

}  // namespace nipoly
