#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nipoly/environment.hpp"
#include "nipoly/lattice.hpp"
#include "nipoly/log_signed.hpp"

namespace nipoly {

// Site log-weight omega(z).
using SiteFn = std::function<double(Point)>;

// omega(z) = spec.omega(U(z)); captures copies of both.
SiteFn site_fn(const UniformField& field, const WeightSpec& spec);
SiteFn constant_site_fn(double c);

// log sum_{pi: x -> y} exp(beta F(pi)). F sums omega over the path without
// its start point unless include_start. Throws NoPathError unless x <= y.
double single_path_logZ(const SiteFn& omega, double beta, Point x, Point y, bool include_start = false);

// log Z(x -> t) for every target t; -inf for targets not above x. One sweep
// over the bounding box of x and the targets.
std::vector<double> single_source_logZ(const SiteFn& omega, double beta, Point x,
                                       const std::vector<Point>& targets, bool include_start = false);

// Matrix of single-pair partition functions Z(xs[i] -> ys[j]).
LogMatrix lgv_matrix(const SiteFn& omega, double beta, const KPoint& xs, const KPoint& ys,
                     bool include_start = false);

struct LgvResult {
  LogSigned value;
  double cancellation_nats = 0.0;
  bool extended_precision = false;
};

// Non-intersecting partition function as det(Z(xs[i] -> ys[j])). When the
// double determinant cancels more than kDeterminantEscalationNats, entries and
// elimination are redone at 50, 200, 800 or 3200 digits, the first whose
// working precision covers the cancellation. Throws PrecisionError otherwise.
LgvResult kpath_logZ_lgv_detail(const SiteFn& omega, double beta, const KPoint& xs, const KPoint& ys,
                                bool include_start = false);
LogSigned kpath_logZ_lgv(const SiteFn& omega, double beta, const KPoint& xs, const KPoint& ys,
                         bool include_start = false);

// Energy of a k-path: sum of omega over every component.
double kpath_energy(const SiteFn& omega, const KPath& p, bool include_start = false);

// Direct sum over enumerate_kpaths; the small-instance oracle. Zero when no
// k-path exists.
LogSigned kpath_logZ_bruteforce(const SiteFn& omega, double beta, const KPoint& xs, const KPoint& ys,
                                std::int64_t cap, bool include_start = false);

// Endpoints of Gamma^N(m,k): (1,1) stacked k high to (N,m) stacked k deep,
// in an N-wide, m-tall box.
std::pair<KPoint, KPoint> rectangle_endpoints(int N, int m, int k);

// log tau(m,k) for the log-gamma environment omega = log zeta: rectangle
// N wide and m tall, start weights included. k = 0 gives 0.
double log_tau(const SiteFn& log_zeta, int N, int m, int k);
// Transposed rectangle: m wide, N tall.
double log_tau_tilde(const SiteFn& log_zeta, int N, int m, int k);
double log_tau(const UniformField& field, double mu, int N, int m, int k);
double log_tau_tilde(const UniformField& field, double mu, int N, int m, int k);

// max over k-paths of sum e(z), start points included.
double last_passage_single(const SiteFn& e, Point x, Point y);
// Gamma^N(m,k); k = 1 by dynamic programming, k >= 2 by enumeration.
double last_passage(const SiteFn& e, int N, int m, int k, std::int64_t cap = 10'000'000);

struct FreeEnergyEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int N = 0;
  int replicas = 0;
  std::vector<double> samples;
};

// (1/N) log Z_{(1,1) -> (N, floor(cN))}(beta) on the environment with seed
// replica_seed(seed, r).
double free_energy_replica(const WeightSpec& spec, double beta, double c, int N, std::uint64_t seed,
                           std::uint64_t r);
// Mean of free_energy_replica over r < replicas.
FreeEnergyEstimate free_energy_mc(const WeightSpec& spec, double beta, double c, int N, int replicas,
                                  std::uint64_t seed, unsigned threads = 0);

// Infinite-temperature free energy (c+1) log(c+1) - c log c.
double free_energy_beta0(double c);
// Exponential last passage shape (1 + sqrt c)^2.
double rost_ell(double c);
// Log-gamma free energy -sup_{0<theta<mu} (c psi0(theta) + psi0(mu - theta)).
double sepp_free_energy(double mu, double c);
// Maximizer theta in (0, mu) of the objective above.
double sepp_argmax(double mu, double c);

struct IneqReport {
  double f_c = 0.0;
  double f_cprime = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool holds = false;
};
// f_c + (c'-c) beta nu <= f_c' <= (c'/c) f_c - (c'/c - 1) beta nu with
// beta nu = -psi0(mu).
IneqReport ineq_theorem_check(double mu, double c, double cprime);

struct SandwichReport {
  double mean = 0.0;        // MC mean of (1/varpi) log(Z(beta)/Z(0))
  double std_error = 0.0;
  double lower = 0.0;       // beta nu
  double upper = 0.0;       // log G(beta)
  double varpi = 0.0;
  int replicas = 0;
  bool inside = false;      // within 3 stderr of the bracket
};
SandwichReport jensen_sandwich_check(const WeightSpec& spec, const KPoint& xs, const KPoint& ys, double beta,
                                     int replicas, std::uint64_t seed, unsigned threads = 0);

// Q(u) = u^2/2 log u with Q(0) = 0.
double w_limit(double c, double alpha);

struct ScaledKReport {
  double value = 0.0;   // (1/N^2) macmahon_log_count(N, floor(cN), floor(alpha N))
  double w = 0.0;
  double gap = 0.0;
};
ScaledKReport scaled_k_check(int N, double c, double alpha);

// Finite-N Jensen band for (1/N^2) E log Z over Gamma^N(cN, alpha N):
// [log Z(0) + varpi beta nu, log Z(0) + varpi log G(beta)] / N^2.
struct ScaledSandwichReport {
  double mean = 0.0;
  double std_error = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double asymptotic_lower = 0.0;  // w + alpha(1+c-alpha) beta nu
  double asymptotic_upper = 0.0;  // w + alpha(1+c-alpha) log G(beta)
  bool inside = false;
};
ScaledSandwichReport scaled_sandwich_check(const WeightSpec& spec, double beta, int N, double c, double alpha,
                                           int replicas, std::uint64_t seed, unsigned threads = 0);

struct BoundConfiguration {
  KPoint x;   // start
  KPoint y;   // nice intermediate for the series bound
  KPoint z;   // end
  // Parallel split: the first `split` components against the rest, taken on
  // the x -> y leg.
  int split = 1;
};
// Default 4x4, k = 2 configuration with a nice diagonal intermediate point.
BoundConfiguration default_bound_configuration();

struct BoundReport {
  int samples = 0;
  int series_violations = 0;
  int parallel_violations = 0;
  int separating_violations = 0;
  double min_series_slack = 0.0;      // log Z_xz - log Z_xy - log Z_yz
  double min_parallel_slack = 0.0;    // log Z' + log Z'' - log Z
  double min_separating_slack = 0.0;  // sum log Z_i - log Z
  int violations() const { return series_violations + parallel_violations + separating_violations; }
};
// Exact per-sample checks by enumeration (cap on the number of k-paths).
BoundReport parallel_series_bound_mc(const WeightSpec& spec, const BoundConfiguration& cfg, double beta,
                                     int replicas, std::uint64_t seed, std::int64_t cap = 1'000'000);

struct KLinearityReport {
  double two_path = 0.0;      // mean (1/N) log Z over 2-paths
  double two_path_se = 0.0;
  double single = 0.0;        // mean (1/N) log Z over 1 path
  double single_se = 0.0;
  double gap = 0.0;           // two_path - 2 single
  double gap_se = 0.0;
  bool within_3se = false;
};
// Paired probe on one environment per replica: (1/N) log Z over 2-paths
// stack_up((1,1),2) -> stack_up((N,N),2) against twice (1/N) log Z over
// (1,1) -> (N,N).
KLinearityReport k_linearity_probe(const WeightSpec& spec, double beta, int N, int replicas, std::uint64_t seed,
                                   unsigned threads = 0);

}  // namespace nipoly
