#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "nipoly/log_signed.hpp"

namespace nipoly {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

// ln Gamma(x) for x > 0 by the Stirling series, shifting x up to >= 10.
double log_gamma(double x);
// ln Gamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2].
double log_gamma_remainder(double x);
// Psi_0 = Gamma'/Gamma.
double digamma(double x);
// Mutation hook for the self-test harness: drops the asymptotic series from
// digamma while set.
void set_digamma_fault(bool on);
// Psi_1 = Psi_0'.
double trigamma(double x);

double log_factorial(std::int64_t n);
// log H(N) where H(N) = 0! 1! ... (N-1)!.
double log_superfactorial(std::int64_t n);
// ln C(n, k); zero (sign 0) outside 0 <= k <= n.
LogSigned log_binomial(std::int64_t n, std::int64_t k);

// Regularized lower/upper incomplete gamma, returned as logarithms.
// Both are accurate to ~1e-14 absolute in P and Q.
double log_gamma_p(double a, double x);
double log_gamma_q(double a, double x);
inline double gamma_p(double a, double x) { return std::exp(log_gamma_p(a, x)); }
inline double gamma_q(double a, double x) { return std::exp(log_gamma_q(a, x)); }

// Standard normal quantile.
double normal_quantile(double p);

// CDF of the inverse-gamma law s^{-mu-1} e^{-1/s} / Gamma(mu) ds, i.e.
// F_mu(s) = Q(mu, 1/s).
double inv_gamma_cdf(double mu, double s);
// F_mu^{-1}(u) computed in log space; safe when the quantile overflows double
// (small mu).
double log_inv_gamma_quantile(double mu, double u);
double inv_gamma_quantile(double mu, double u);

// F_mu^{-1} for one fixed mu, tabulated as piecewise Chebyshev series of
// ln x in the normal deviate z = Phi^{-1}(1-u). The fit is checked against the
// direct solver at construction; if it misses double precision the table
// falls back to the solver. Immutable after construction.
class InvGammaQuantileTable {
 public:
  explicit InvGammaQuantileTable(double mu);
  double mu() const { return mu_; }
  double log_quantile(double u) const;
  double quantile(double u) const { return std::exp(log_quantile(u)); }
  bool tabulated() const { return tabulated_; }
  // Largest CDF error seen at the fit check points.
  double max_fit_error() const { return max_fit_error_; }

 private:
  static constexpr int kDegree = 15;
  double mu_;
  double offset_ = 0.0;
  bool tabulated_ = false;
  double max_fit_error_ = 0.0;
  std::vector<double> coeffs_;
};

// Modified Bessel function of the second kind, order zero.
double bessel_k0(double x);

}  // namespace nipoly
