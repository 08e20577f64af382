#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nipoly/environment.hpp"
#include "nipoly/polymer.hpp"

namespace nipoly {

// Real function on S_N = {1..N}^2, 1-based (i, j). Directed edges run from
// (i,j) to (i+1,j) and to (i,j+1).
class InterfaceGrid {
 public:
  InterfaceGrid() = default;
  explicit InterfaceGrid(int N, double fill = 0.0);

  int N() const { return n_; }
  double& operator()(int i, int j) { return v_[index(i, j)]; }
  double operator()(int i, int j) const { return v_[index(i, j)]; }
  std::vector<double> diagonal() const;
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  // sup |a - b|.
  friend double sup_distance(const InterfaceGrid& a, const InterfaceGrid& b);

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>((i - 1) * n_ + (j - 1)); }
  int n_ = 0;
  std::vector<double> v_;
};

// log tau(m,k) and log tau~(m,k) for 0 <= k <= m <= N on one environment.
struct TauTable {
  int N = 0;
  std::vector<std::vector<double>> tau;        // [m][k]
  std::vector<std::vector<double>> tau_tilde;  // [m][k]
};
TauTable tau_table(const SiteFn& log_zeta, int N);

// phi(i,j) = log tau(N-j+i, i) / tau(N-j+i, i-1) for i <= j, and the
// transposed ratio of tau~ with (j, N-i+j) for i >= j.
InterfaceGrid build_phi(const TauTable& t);
InterfaceGrid build_phi(const SiteFn& log_zeta, int N);
InterfaceGrid build_phi(const UniformField& field, double mu, int N);

// max over 1 <= k <= m <= N of |sum_{i<=k} phi(i, N-m+i) - log tau(m,k)|.
double inversion_residual(const InterfaceGrid& phi, const TauTable& t);
// max_k |log tau(N,k) - log tau~(N,k)|.
double diagonal_consistency_gap(const TauTable& t);

// log density of the exponential-interaction interface with weights
// mu u on the diagonal and e^{-u} at (N,N), normalized by Gamma(mu)^{N^2}.
double interface_log_density(const InterfaceGrid& g, double mu);

// Part of -H that depends on site (i,j) when it holds value v.
double interface_local_log_weight(const InterfaceGrid& g, double mu, int i, int j, double v);

// log of the Metropolis acceptance probability for moving (i,j) to v.
double metropolis_log_accept(const InterfaceGrid& g, double mu, int i, int j, double v);

struct GibbsOptions {
  std::int64_t updates = 1'000'000;   // single-site updates after burn-in
  std::int64_t burn_in = 100'000;
  double target_acceptance = 0.4;
  int batches = 50;
};

struct GibbsSummary {
  int N = 0;
  double mu = 0.0;
  InterfaceGrid mean;
  InterfaceGrid std_error;   // batch means
  InterfaceGrid second_moment;
  double acceptance = 0.0;
  double tau_int_max = 1.0;
  std::vector<double> proposal_scale;
};

// Random-walk Metropolis on the interface density, one site per update in
// systematic sweeps. Proposal scales are tuned during burn-in and frozen.
class GibbsSampler {
 public:
  GibbsSampler(int N, double mu, std::uint64_t seed);
  void set_state(const InterfaceGrid& g) { state_ = g; }
  const InterfaceGrid& state() const { return state_; }
  // One pass over all N^2 sites; returns the number of accepted moves.
  int sweep();
  void tune(std::int64_t updates, double target);
  double acceptance_rate() const;
  const std::vector<double>& proposal_scale() const { return scale_; }

 private:
  bool update_site(int i, int j);
  int n_;
  double mu_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  InterfaceGrid state_;
  std::vector<double> scale_;
  std::int64_t proposed_ = 0;
  std::int64_t accepted_ = 0;
};

GibbsSummary gibbs_sampler(int N, double mu, std::uint64_t seed, const GibbsOptions& opt = {});

// Mean and standard error of phi(i,j) from independent polymer environments.
struct PolymerPhiSummary {
  InterfaceGrid mean;
  InterfaceGrid std_error;
  InterfaceGrid second_moment;
  int samples = 0;
};
PolymerPhiSummary polymer_phi_moments(int N, double mu, int samples, std::uint64_t seed, unsigned threads = 0);

// theta(i,j) = phi(i,j) + (2N + 1 - i - j) log mu.
InterfaceGrid theta_rescale(const InterfaceGrid& phi, double mu);
// Deterministic large-mu limit of theta, from log-factorials.
InterfaceGrid theta_min(int N);

// e^{-theta(N,N)} + sum_i theta(i,i) + sum_edges e^{theta(y) - theta(x)}.
double energy_F(const InterfaceGrid& theta);
InterfaceGrid grad_F(const InterfaceGrid& theta);
// Dense Hessian, row-major over sites (i-1)*N + (j-1).
std::vector<double> hessian_F(const InterfaceGrid& theta);

// Rescaled interface (1/N) phi(s'N, t'N) with s'N = floor(sN) + 1 clamped
// to N.
double rescaled_value(const InterfaceGrid& g, double s, double t);

struct LargeMuReport {
  std::vector<double> mu;
  std::vector<double> median_sup;          // per mu
  std::vector<std::vector<double>> sup;    // [mu][seed]
  double fitted_exponent = 0.0;            // slope of log median vs log mu
  bool median_decreasing = false;
};
LargeMuReport large_mu_convergence(int seeds, int N, const std::vector<double>& mu_list, std::uint64_t seed,
                                   unsigned threads = 0);

struct SmallMuReport {
  std::vector<double> mu;
  std::vector<std::vector<double>> diff;   // [mu][seed] |mu log tau - L|
  double fraction_decreasing = 0.0;        // seeds with diff decreasing in the mu order given
  double ks = 0.0;                         // two-sample KS at the last mu against independent L draws
  int seeds = 0;
};
// mu_list ordered from large to small.
SmallMuReport small_mu_coupling(int seeds, int N, int m, int k, const std::vector<double>& mu_list,
                                std::uint64_t seed, unsigned threads = 0);

// Vol GT_N(lambda) = prod_{i<j} (lambda_i - lambda_j) / H(N); zero unless
// strictly decreasing.
double gt_volume(const std::vector<double>& lambda);
// Hit-or-miss estimate over the bounding box of the pattern polytope.
struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
};
VolumeEstimate gt_volume_mc(const std::vector<double>& lambda, std::int64_t samples, std::uint64_t seed);

// True when the triangle i <= j satisfies phi(i,j-1) >= phi(i,j) >= phi(i+1,j)
// up to tol, i.e. the values never increase along a directed edge.
bool is_gt_pattern(const InterfaceGrid& g, double tol = 0.0);

// int exp(-e^{p - l1} - e^{l2 - p}) dp by quadrature.
double whittaker_gl2(double lambda1, double lambda2);
// 2 K0(2 e^{(l2 - l1)/2}).
double whittaker_gl2_bessel(double lambda1, double lambda2);
// Diagonal law of the interface for N in {1,2}.
double whittaker_measure_logdensity(const std::vector<double>& lambda, double mu);

}  // namespace nipoly
