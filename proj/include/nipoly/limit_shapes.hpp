#pragma once

#include <cstdint>
#include <vector>

#include "nipoly/eigen_jacobi.hpp"
#include "nipoly/interface.hpp"

namespace nipoly {

// ---- Marchenko-Pastur law, ratio c in (0,1] ----

double mp_lower_edge(double c);  // (1 - sqrt c)^2
double mp_upper_edge(double c);  // (1 + sqrt c)^2
double mp_density(double c, double u);
// Mass of [rho, M_c] under nu_c, times c.
double mp_mass(double c, double rho);
// rho with c * nu_c([rho, M_c]) = alpha, 0 <= alpha <= c.
double mp_quantile(double c, double alpha);

// ---- semicircle law on [-2,2] ----

double sc_density(double u);
// Closed-form CDF, evaluated through u = 2 sin(phi).
double sc_cdf(double u);
// rho in [-2,2] with mass x to its right.
double sc_quantile(double x);
// |closed form - quadrature| for the CDF at 2 sin(phi).
double F_sc_check(double phi);

// ---- limit shapes of the interface, symmetric in (s,t) ----

double xi_mp(double s, double t);
double xi_ht(double s, double t);
double xi_sc(double s, double t);
double xi_edge_bottom(double mu, double t);
double xi_edge_top(double mu, double t);

// (1/N^2) log tau(cN, cN) is a plain sum of cN^2 log-gamma weights.
struct DiagonalFreeEnergyReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double target = 0.0;             // -c psi0(mu)
  double variance = 0.0;           // sample variance across replicas
  double variance_target = 0.0;    // c psi1(mu) / N^2
  int N = 0;
  int replicas = 0;
  bool within_3se = false;
};
DiagonalFreeEnergyReport diagonal_free_energy_check(double mu, double c, int N, int replicas, std::uint64_t seed,
                                                    unsigned threads = 0);

// ---- bead surface tension ----

// Real number or +infinity, kept apart rather than encoded as a float.
struct ExtendedReal {
  bool infinite = false;
  double value = 0.0;
  static ExtendedReal finite(double v) { return {false, v}; }
  static ExtendedReal plus_infinity() { return {true, 0.0}; }
};

// Tilted coordinates: p = d/dr, q = d/dtau. Finite iff p < 0, |q| < |p|/2.
ExtendedReal bead_sigma_tilted(double p, double q);
// Untilted slopes (s,t); p = s + t, q = (t - s)/2.
ExtendedReal bead_sigma(double s, double t);
// Omega(u) = sigma(-1, u) and its derivative pi tan(pi u), |u| < 1/2.
double bead_omega(double u);
double bead_omega_prime(double u);

// Absolute violation of sigma(lambda p, lambda q) = sigma(p,q) - log lambda.
double bead_scaling_residual(double p, double q, double lambda);

// Euler-Lagrange balance for the semicircle profile at rho = 2 sin(phi).
struct OmegaIdentityRow {
  double phi = 0.0;
  double rho_prime = 0.0;      // -pi / cos(phi)
  double dtau_xi = 0.0;        // phi / cos(phi)
  double tension_term = 0.0;   // (1/rho') Omega'(dtau_xi / rho')
  double riesz_closed = 0.0;   // -sin(phi)
  double riesz_numeric = 0.0;  // - PV int f_sc(u) / (2 sin phi - u) du
  double residual_closed = 0.0;
  double residual_numeric = 0.0;
  // Same balance with Omega'(-phi/pi) read as -pi tan(pi phi).
  double residual_alt_reading = 0.0;
  // Finite-difference checks of rho' and dtau_xi against xi_sc.
  double rho_prime_fd_error = 0.0;
  double dtau_xi_fd_error = 0.0;
};
struct OmegaIdentityReport {
  std::vector<OmegaIdentityRow> rows;
  double max_residual_closed = 0.0;
  double max_residual_numeric = 0.0;
  double max_residual_alt_reading = 0.0;
  double max_fd_error = 0.0;
};
// PV integral of f_sc(u)/(a - u) over [-2,2], |a| < 2.
double sc_principal_value(double a);
OmegaIdentityReport omega_identity_check(const std::vector<double>& phi_grid);
// phi_k = -pi/2 + k pi/(n+1), k = 1..n.
std::vector<double> default_phi_grid(int n = 99);

struct AffineWulffReport {
  double b = 0.0;
  double argmin = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double log_integral = 0.0;  // int int_{s<t} log(t-s), by quadrature
  double residual = 0.0;
};
AffineWulffReport affine_wulff_check(double b);

// ---- random matrices ----

HermitianMatrix gue_matrix(int N, std::uint64_t seed);
// X X* with X an m x N standard complex Gaussian matrix (E|X_ij|^2 = 1).
HermitianMatrix lue_matrix(int N, int m, std::uint64_t seed);
std::vector<double> gue_sample(int N, std::uint64_t seed);
std::vector<double> lue_sample(int N, int m, std::uint64_t seed);

// phi(i,j) = i-th largest eigenvalue of the leading (N-j+i) minor for i <= j;
// the lower triangle uses U* H U, here with U = I (the law is conjugation
// invariant, so any fixed unitary gives a valid sample of the process).
InterfaceGrid minors_process(const HermitianMatrix& h);

struct QuantileGapReport {
  double sup_gap = 0.0;
  double at_alpha = 0.0;
  int samples = 0;
};
// Pooled empirical quantiles of lambda/sqrt(N) against sc_quantile on
// x in [0.05, 0.95].
QuantileGapReport gue_semicircle_gap(int N, int samples, std::uint64_t seed, unsigned threads = 0);
// Pooled empirical quantiles of lambda/N against mp_quantile(m/N, alpha) on
// alpha in [0.05c, 0.95c].
QuantileGapReport lue_mp_gap(int N, int m, int samples, std::uint64_t seed, unsigned threads = 0);

struct JohanssonReport {
  int N = 0, m = 0, k = 0, samples = 0;
  double mean_lpp = 0.0, se_lpp = 0.0, var_lpp = 0.0;
  double mean_eig = 0.0, se_eig = 0.0, var_eig = 0.0;
  double mean_z = 0.0;  // (mean difference) / combined stderr
  double ks = 0.0;
  bool means_agree = false;
};
JohanssonReport johansson_check(int N, int m, int k, int samples, std::uint64_t seed, unsigned threads = 0);

// ---- fluctuations on the diagonal ----

struct FluctuationRow {
  double t = 0.0;
  int m = 0;
  double mean = 0.0;
  double mean_se = 0.0;
  double mean_exact = 0.0;    // sqrt(kappa) m N (log mu - psi0(mu))
  double mean_limit = 0.0;    // sqrt(kappa) t / (2 kappa)
  double variance = 0.0;
  double variance_exact = 0.0;  // kappa m N psi1(kappa N^2)
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};
struct FluctuationReport {
  double kappa = 0.0;
  int N = 0;
  int samples = 0;
  std::vector<FluctuationRow> rows;
  // corr(H(1/2), H(1) - H(1/2)); the two blocks share no sites.
  double increment_correlation = 0.0;
};
// Samples sqrt(kappa) H(t,t) on the diagonal, mu = kappa N^2.
FluctuationReport fluctuation_mc(double kappa, int N, const std::vector<double>& t_grid, int samples,
                                 std::uint64_t seed, unsigned threads = 0);

// |(1/N^2) log H(pN) - (p^2/2 log p + p^2/2 log N - 3p^2/4)|, pN an integer.
double superfactorial_asymptotic_check(double p, int N);

// sup over the grid {0, 1/g, ..., 1}^2 of |(1/N) theta_min(s,t) - xi_ht(s,t)|.
double xi_ht_gap(int N, int grid = 20);

}  // namespace nipoly
