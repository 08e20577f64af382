#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "nipoly/errors.hpp"
#include "nipoly/special.hpp"

namespace nipoly {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSqrt2Pi = 2.50662827463100050241576528481104525;
constexpr double kInvSqrtPi = 0.56418958354775628694807945156077259;

// Above this shape the uniform asymptotic expansion is used; its truncation
// error is below 1e-14 there and it costs O(1) instead of O(sqrt(a)).
constexpr double kUniformThreshold = 1000.0;

struct LogPQ {
  double logp;
  double logq;
};

// exp(z^2) erfc(z) for z >= 0.
double erfcx(double z) {
  if (z < 3.0) return std::exp(z * z) * std::erfc(z);
  // Laplace continued fraction, evaluated bottom up.
  double f = z;
  for (int n = 60; n >= 1; --n) f = z + 0.5 * n / f;
  return kInvSqrtPi / f;
}

// lambda - 1 - ln(lambda) with lambda = 1 + d, without cancellation near d=0.
double half_eta_sq(double d) {
  if (std::fabs(d) < 0.1) {
    // sum_{k>=2} (-1)^k d^k / k, truncated where 0.1^21/21 is below rounding.
    static constexpr auto coef = [] {
      std::array<double, 20> c{};
      for (int k = 2; k <= 21; ++k) c[k - 2] = ((k % 2 == 0) ? 1.0 : -1.0) / k;
      return c;
    }();
    double r = coef[19];
    for (int k = 18; k >= 0; --k) r = r * d + coef[k];
    return r * d * d;
  }
  return d - std::log1p(d);
}

double poly(const double* c, int n, double x) {
  double r = 0.0;
  for (int i = n - 1; i >= 0; --i) r = r * x + c[i];
  return r;
}

// C0 + C1/a + C2/a^2 of Temme's expansion
//   Q(a,x) = erfc(eta sqrt(a/2))/2 + exp(-a eta^2/2)/sqrt(2 pi a) * S.
constexpr double kC0[] = {-1.0 / 3, 1.0 / 12, -2.0 / 135, 1.0 / 864, 1.0 / 2835, -139.0 / 777600,
                          1.0 / 25515, -571.0 / 261273600, -281.0 / 151559100,
                          163879.0 / 197522841600.0, -5221.0 / 29554024500.0,
                          5246819.0 / 782190452736000.0};
constexpr double kC1[] = {-1.0 / 540, -1.0 / 288, 1.0 / 378, -77.0 / 77760, 1.0 / 4860,
                          -1.0 / 2488320, -2743.0 / 151559100, 41969.0 / 5486745600.0,
                          -11.0 / 6823440, 47207.0 / 10158317568000.0};
constexpr double kC2[] = {25.0 / 6048, -139.0 / 51840, 1.0 / 1296, 1.0 / 497664,
                          -6199.0 / 57736800, 5531.0 / 104509440, -1219.0 / 95528160,
                          19321.0 / 564350976000.0};
constexpr double kTaylorEta = 0.05;

// Polynomial value and derivative.
void poly_d(const double* c, int n, double x, double& v, double& dv) {
  v = c[n - 1];
  dv = 0.0;
  for (int i = n - 2; i >= 0; --i) {
    dv = dv * x + v;
    v = v * x + c[i];
  }
}

// Series S and dS/deta for |eta| < kTaylorEta.
void temme_series_taylor(double eta, double a, double& s, double& ds) {
  double v0, d0, v1, d1, v2, d2;
  poly_d(kC0, 12, eta, v0, d0);
  poly_d(kC1, 10, eta, v1, d1);
  poly_d(kC2, 8, eta, v2, d2);
  s = v0 + (v1 + v2 / a) / a;
  ds = d0 + (d1 + d2 / a) / a;
}

double temme_series(double eta, double d, double a) {
  const double* c0 = kC0;
  const double* c1 = kC1;
  const double* c2 = kC2;
  double C0, C1, C2;
  if (std::fabs(eta) < kTaylorEta) {
    C0 = poly(c0, 12, eta);
    C1 = poly(c1, 10, eta);
    C2 = poly(c2, 8, eta);
  } else {
    const double lambda = 1.0 + d;
    const double e2 = eta * eta;
    const double e3 = e2 * eta;
    const double id = 1.0 / d;
    const double id2 = id * id;
    const double id3 = id2 * id;
    C0 = id - 1.0 / eta;
    C1 = 1.0 / e3 - id3 - id2 - id / 12.0;
    C2 = -3.0 / (e3 * e2) + lambda * id * (3.0 * id2 * id2 + 2.0 * id3 + id2 / 12.0) + id / 288.0;
  }
  return C0 + (C1 + C2 / a) / a;
}

LogPQ uniform_asymptotic(double a, double x) {
  const double d = (x - a) / a;
  const double h = half_eta_sq(d);
  const double eta = std::copysign(std::sqrt(2.0 * h), d);
  const double z = eta * std::sqrt(0.5 * a);
  const double s = temme_series(eta, d, a) / (kSqrt2Pi * std::sqrt(a));
  // Both tails carry the common factor exp(-a eta^2/2) = exp(-z^2).
  const double expo = -a * h;
  if (eta >= 0.0) {
    const double logq = expo + std::log(0.5 * erfcx(z) + s);
    return {std::log(-std::expm1(logq)), logq};
  }
  const double logp = expo + std::log(0.5 * erfcx(-z) - s);
  return {logp, std::log(-std::expm1(logp))};
}

// a ln x - x - ln Gamma(a), written as -a(lambda - 1 - ln lambda) plus the
// Stirling remainder for large a so the O(a ln a) pieces never cancel.
double log_prefactor(double a, double x, double y, double lgam) {
  if (a < 10.0 || x <= 0.0) return a * y - x - lgam;
  const double h = half_eta_sq((x - a) / a);
  return -a * h + 0.5 * std::log(a) - 0.91893853320467274178 - log_gamma_remainder(a);
}

LogPQ lower_series(double a, double x, double y, double lgam) {
  double sum = 1.0;
  double term = 1.0;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  const double logp = log_prefactor(a, x, y, lgam) - std::log(a) + std::log(sum);
  const double lp = std::min(logp, 0.0);
  return {lp, std::log(-std::expm1(lp))};
}

LogPQ upper_fraction(double a, double x, double y, double lgam) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double dd = 1.0 / b;
  double h = dd;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    dd = an * dd + b;
    if (std::fabs(dd) < tiny) dd = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    dd = 1.0 / dd;
    const double del = dd * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  const double logq = std::min(log_prefactor(a, x, y, lgam) + std::log(h), 0.0);
  return {std::log(-std::expm1(logq)), logq};
}

// Works from y = ln x so that x underflowing to zero (tiny shapes, far lower
// tail) still yields a finite ln P.
LogPQ log_pq_xy(double a, double x, double y, double lgam) {
  if (y == kNegInf) return {kNegInf, 0.0};
  if (std::isinf(x)) return {0.0, kNegInf};
  if (a >= kUniformThreshold) return uniform_asymptotic(a, x);
  if (x < a + 1.0) return lower_series(a, x, y, lgam);
  return upper_fraction(a, x, y, lgam);
}

LogPQ log_pq(double a, double x, double lgam) {
  if (x <= 0.0) return {kNegInf, 0.0};
  return log_pq_xy(a, x, std::log(x), lgam);
}

void check_shape(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete gamma: shape must be positive");
}

// lambda(eta) near eta = 0, the inverse of eta^2/2 = lambda - 1 - ln lambda.
double lambda_series(double eta) {
  static constexpr double c[] = {1.0,
                                 1.0,
                                 1.0 / 3,
                                 1.0 / 36,
                                 -1.0 / 270,
                                 1.0 / 4320,
                                 1.0 / 17010,
                                 -139.0 / 5443200,
                                 1.0 / 204120,
                                 -571.0 / 2351462400.0,
                                 -281.0 / 1515591000.0,
                                 163879.0 / 2172751257600.0,
                                 -5221.0 / 354648294000.0,
                                 5246819.0 / 10168475885568000.0};
  return poly(c, 14, eta);
}


// Acklam's rational approximation without refinement; ~1e-9 relative.
double normal_quantile_rough(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  if (p < 0.02425 || p > 0.97575) {
    const double q = std::sqrt(-2.0 * std::log(p < 0.5 ? p : 1.0 - p));
    const double x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
                     ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    return p < 0.5 ? x : -x;
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Large shape, u away from 0 and 1: Newton in lambda = x/a on Q itself.
// Q and P are then not small, so linear space is accurate and each step costs
// one erfc and one exp. Returns ln x.
double log_gamma_quantile_uniform(double a, double u) {
  thread_local double cached_a = -1.0;
  thread_local double dens_scale = 0.0;
  thread_local double sqrt_a = 0.0;
  if (a != cached_a) {
    cached_a = a;
    sqrt_a = std::sqrt(a);
    // sqrt(a / 2 pi) exp(-Stirling remainder)
    dens_scale = sqrt_a / kSqrt2Pi * std::exp(-log_gamma_remainder(a));
  }
  const double z = -normal_quantile_rough(u);
  const double eta0 = z / sqrt_a;
  const bool taylor = std::fabs(eta0) < 0.5 * kTaylorEta;
  double s0, ds0 = 0.0;
  if (taylor) {
    temme_series_taylor(eta0, a, s0, ds0);
  } else {
    s0 = temme_series(eta0, lambda_series(eta0) - 1.0, a);
  }
  const double sigma = s0 / a;
  double delta = sigma;
  for (int i = 0; i < 3; ++i) {
    const double ad = a * delta;
    const double lhs_extra = -0.5 * ad * eta0 * delta + (a * ad * eta0 * eta0 - ad) * delta * delta / 6.0;
    const double rhs = sigma * (1.0 - ad * eta0 - 0.5 * ad * delta + 0.5 * ad * ad * eta0 * eta0);
    delta = rhs - lhs_extra;
  }
  double lambda = lambda_series(eta0 + delta);
  const double inv_sqrt_2pi_a = 1.0 / (kSqrt2Pi * sqrt_a);
  for (int iter = 0; iter < 50; ++iter) {
    const double d = lambda - 1.0;
    const double h = half_eta_sq(d);
    const double eta = std::copysign(std::sqrt(2.0 * h), d);
    // Near the first guess S is linear in eta to far below rounding.
    const double s = (taylor && iter == 0) ? s0 + ds0 * (eta - eta0) : temme_series(eta, d, a);
    const double e = std::exp(-a * h);
    const double q = 0.5 * std::erfc(eta * sqrt_a * 0.70710678118654752440) + e * inv_sqrt_2pi_a * s;
    const double dq = -dens_scale * e / lambda;
    const double step = -(q - u) / dq;
    lambda += step;
    if (std::fabs(step) * sqrt_a < 5e-7 * lambda) break;
  }
  return std::log(a * lambda);
}

}  // namespace

double log_gamma_p(double a, double x) {
  check_shape(a);
  return log_pq(a, x, log_gamma(a)).logp;
}

double log_gamma_q(double a, double x) {
  check_shape(a);
  return log_pq(a, x, log_gamma(a)).logq;
}

double inv_gamma_cdf(double mu, double s) {
  check_shape(mu);
  if (s <= 0.0) return 0.0;
  return std::exp(log_pq(mu, 1.0 / s, log_gamma(mu)).logq);
}

namespace {

// ln x where x ~ Gamma(a,1) has ln Q(a,x) = target (use_q) or
// ln P(a,x) = target. z is the matching standard normal deviate.
double log_gamma_quantile_general(double a, bool use_q, double target, double z) {
  const double lgam = log_gamma(a);
  double y;
  if (a >= kUniformThreshold) {
    y = std::log(a * lambda_series(z / std::sqrt(a)));
  } else {
    const double base = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
    if (base > 0.0 && a >= 0.5) {
      y = std::log(a) + 3.0 * std::log(base);
    } else {
      // Small x: P ~ x^a / Gamma(a+1). For tiny a this holds even when P is
      // close to one, where ln x is of order ln(P)/a.
      const double log_p = use_q ? std::log1p(-std::exp(target)) : target;
      y = (log_p + lgam + std::log(a)) / a;
      if (use_q && !(y < 0.0)) {
        // Q small: Q ~ x^(a-1) e^-x / Gamma(a).
        double x = std::max(1.0, -target);
        for (int i = 0; i < 4; ++i) x = std::max(1e-3, -target + (a - 1.0) * std::log(x) - lgam);
        y = std::log(x);
      }
    }
  }

  const double tol = 5e-7 / std::sqrt(std::max(a, 1.0));
  double lo = kNegInf;
  double hi = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200; ++iter) {
    const double x = std::exp(y);
    const LogPQ pq = log_pq_xy(a, x, y, lgam);
    const double lt = use_q ? pq.logq : pq.logp;
    // h increases in y.
    const double h = use_q ? target - lt : lt - target;
    if (h == 0.0) return y;
    if (h > 0.0) {
      hi = y;
    } else {
      lo = y;
    }
    const double hprime = std::exp(log_prefactor(a, x, y, lgam) - lt);
    double step = (std::isfinite(hprime) && hprime > 0.0) ? -h / hprime : (h > 0 ? -1.0 : 1.0);
    if (!std::isfinite(step)) step = h > 0 ? -1.0 : 1.0;
    step = std::clamp(step, -50.0, 50.0);
    if (std::fabs(step) < tol) return y + step;
    double next = y + step;
    if (!(next > lo && next < hi)) {
      if (std::isfinite(lo) && std::isfinite(hi)) {
        next = 0.5 * (lo + hi);
      } else {
        next = y + (h > 0 ? -1.0 : 1.0) * std::max(1.0, std::fabs(step));
      }
    }
    if (std::isfinite(lo) && std::isfinite(hi) && hi - lo < 1e-15 * std::max(1.0, std::fabs(y))) return next;
    y = next;
  }
  throw NumericError("inv_gamma_quantile: no convergence");
}

}  // namespace

double log_inv_gamma_quantile(double mu, double u) {
  check_shape(mu);
  if (!(u > 0.0 && u < 1.0)) throw DomainError("inv_gamma_quantile: u must lie in (0,1)");
  // x = 1/s is Gamma(mu,1) with Q(mu,x) = u. Solve in y = ln x against
  // whichever of ln Q, ln P is the smaller tail, so neither underflows.
  if (mu >= kUniformThreshold && u > 1e-8 && u < 1.0 - 1e-8) return -log_gamma_quantile_uniform(mu, u);
  const bool use_q = u <= 0.5;
  return -log_gamma_quantile_general(mu, use_q, use_q ? std::log(u) : std::log1p(-u), -normal_quantile(u));
}

namespace {

constexpr double kTableZMax = 9.0;
constexpr double kTableWidth = 0.25;
constexpr int kTablePieces = static_cast<int>(2 * kTableZMax / kTableWidth);

// log Phi(-z) without underflow for the z range of the table.
double log_upper_normal_tail(double z) {
  const double w = z * 0.70710678118654752440;
  if (w < 3.0) return std::log(0.5 * std::erfc(w));
  return -w * w + std::log(0.5 * erfcx(w));
}

double exact_log_x_at(double mu, double z) {
  // Q = Phi(-z); pick the smaller tail.
  if (z >= 0.0) return log_gamma_quantile_general(mu, true, log_upper_normal_tail(z), z);
  return log_gamma_quantile_general(mu, false, log_upper_normal_tail(-z), z);
}

double clenshaw(const double* c, int n, double t) {
  double b1 = 0.0, b2 = 0.0;
  for (int k = n - 1; k >= 1; --k) {
    const double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

}  // namespace

InvGammaQuantileTable::InvGammaQuantileTable(double mu) : mu_(mu) {
  check_shape(mu);
  // Fit ln x - ln mu, which is O(|z|/sqrt(mu)) for large mu, so the series
  // coefficients carry full relative precision.
  offset_ = std::log(mu);
  const double lgam = log_gamma(mu);
  constexpr int n = kDegree + 1;
  coeffs_.assign(static_cast<std::size_t>(kTablePieces) * n, 0.0);
  std::array<double, n> vals{};
  for (int p = 0; p < kTablePieces; ++p) {
    const double mid = -kTableZMax + (p + 0.5) * kTableWidth;
    const double half = 0.5 * kTableWidth;
    for (int j = 0; j < n; ++j) vals[j] = exact_log_x_at(mu, mid + half * std::cos(kPi * (j + 0.5) / n)) - offset_;
    double* c = &coeffs_[static_cast<std::size_t>(p) * n];
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += vals[j] * std::cos(kPi * k * (j + 0.5) / n);
      c[k] = (k == 0 ? 1.0 : 2.0) * acc / n;
    }
    // Check between nodes, measured as the induced CDF error
    // |dF| ~ x f(x) |d ln x|. A bad fit disables the table for this shape.
    for (double t : {-0.97, -0.5, 0.13, 0.61, 0.99}) {
      const double exact = exact_log_x_at(mu, mid + half * t);
      const double approx = clenshaw(c, n, t) + offset_;
      const double x = std::exp(exact);
      const double dens = std::exp(log_prefactor(mu, x, exact, lgam));
      max_fit_error_ = std::max(max_fit_error_, dens * std::fabs(exact - approx));
    }
  }
  tabulated_ = max_fit_error_ < 5e-13;
}

double InvGammaQuantileTable::log_quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("inv_gamma_quantile: u must lie in (0,1)");
  if (tabulated_) {
    const double z = -normal_quantile(u);
    if (std::fabs(z) < kTableZMax) {
      constexpr int n = kDegree + 1;
      int p = static_cast<int>((z + kTableZMax) / kTableWidth);
      p = std::clamp(p, 0, kTablePieces - 1);
      const double mid = -kTableZMax + (p + 0.5) * kTableWidth;
      const double t = (z - mid) / (0.5 * kTableWidth);
      return -(clenshaw(&coeffs_[static_cast<std::size_t>(p) * n], n, t) + offset_);
    }
  }
  return log_inv_gamma_quantile(mu_, u);
}

double inv_gamma_quantile(double mu, double u) { return std::exp(log_inv_gamma_quantile(mu, u)); }

}  // namespace nipoly
