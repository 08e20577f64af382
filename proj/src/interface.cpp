#include "nipoly/interface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nipoly/errors.hpp"
#include "nipoly/parallel.hpp"
#include "nipoly/quadrature.hpp"
#include "nipoly/special.hpp"
#include "nipoly/stats.hpp"

namespace nipoly {

InterfaceGrid::InterfaceGrid(int N, double fill) : n_(N), v_(static_cast<std::size_t>(N) * N, fill) {
  if (N < 1) throw DomainError("InterfaceGrid: N must be positive");
}

std::vector<double> InterfaceGrid::diagonal() const {
  std::vector<double> d(n_);
  for (int i = 1; i <= n_; ++i) d[i - 1] = (*this)(i, i);
  return d;
}

double sup_distance(const InterfaceGrid& a, const InterfaceGrid& b) {
  if (a.N() != b.N()) throw DomainError("sup_distance: grids of different size");
  double d = 0.0;
  for (std::size_t i = 0; i < a.v_.size(); ++i) d = std::max(d, std::fabs(a.v_[i] - b.v_[i]));
  return d;
}

TauTable tau_table(const SiteFn& log_zeta, int N) {
  if (N < 1) throw DomainError("tau_table: N must be positive");
  TauTable t;
  t.N = N;
  t.tau.assign(N + 1, {});
  t.tau_tilde.assign(N + 1, {});
  for (int m = 1; m <= N; ++m) {
    t.tau[m].assign(m + 1, 0.0);
    t.tau_tilde[m].assign(m + 1, 0.0);
    for (int k = 1; k <= m; ++k) {
      t.tau[m][k] = log_tau(log_zeta, N, m, k);
      t.tau_tilde[m][k] = log_tau_tilde(log_zeta, N, m, k);
    }
  }
  return t;
}

InterfaceGrid build_phi(const TauTable& t) {
  const int N = t.N;
  InterfaceGrid g(N);
  for (int i = 1; i <= N; ++i) {
    for (int j = 1; j <= N; ++j) {
      if (i <= j) {
        const int m = N - j + i;
        g(i, j) = t.tau[m][i] - t.tau[m][i - 1];
      } else {
        const int m = N - i + j;
        g(i, j) = t.tau_tilde[m][j] - t.tau_tilde[m][j - 1];
      }
    }
  }
  return g;
}

InterfaceGrid build_phi(const SiteFn& log_zeta, int N) { return build_phi(tau_table(log_zeta, N)); }

InterfaceGrid build_phi(const UniformField& field, double mu, int N) {
  return build_phi(site_fn(field, WeightSpec::log_gamma(mu)), N);
}

double inversion_residual(const InterfaceGrid& phi, const TauTable& t) {
  const int N = t.N;
  double worst = 0.0;
  for (int m = 1; m <= N; ++m) {
    double s = 0.0;
    for (int k = 1; k <= m; ++k) {
      s += phi(k, N - m + k);
      worst = std::max(worst, std::fabs(s - t.tau[m][k]));
    }
  }
  return worst;
}

double diagonal_consistency_gap(const TauTable& t) {
  double gap = 0.0;
  for (int k = 1; k <= t.N; ++k) gap = std::max(gap, std::fabs(t.tau[t.N][k] - t.tau_tilde[t.N][k]));
  return gap;
}

namespace {

template <class Fn>
void for_each_edge(int N, Fn fn) {
  for (int i = 1; i <= N; ++i) {
    for (int j = 1; j <= N; ++j) {
      if (i < N) fn(i, j, i + 1, j);
      if (j < N) fn(i, j, i, j + 1);
    }
  }
}

}  // namespace

double interface_log_density(const InterfaceGrid& g, double mu) {
  if (!(mu > 0.0)) throw DomainError("interface_log_density: mu must be positive");
  const int N = g.N();
  double h = 0.0;
  for_each_edge(N, [&](int a, int b, int c, int d) { h += std::exp(g(c, d) - g(a, b)); });
  for (int i = 1; i <= N; ++i) h += mu * g(i, i);
  h += std::exp(-g(N, N));
  return -h - static_cast<double>(N) * N * log_gamma(mu);
}

double interface_local_log_weight(const InterfaceGrid& g, double mu, int i, int j, double v) {
  const int N = g.N();
  double h = 0.0;
  if (i > 1) h += std::exp(v - g(i - 1, j));
  if (j > 1) h += std::exp(v - g(i, j - 1));
  if (i < N) h += std::exp(g(i + 1, j) - v);
  if (j < N) h += std::exp(g(i, j + 1) - v);
  if (i == j) h += mu * v;
  if (i == N && j == N) h += std::exp(-v);
  return -h;
}

double metropolis_log_accept(const InterfaceGrid& g, double mu, int i, int j, double v) {
  const double d = interface_local_log_weight(g, mu, i, j, v) - interface_local_log_weight(g, mu, i, j, g(i, j));
  return std::min(0.0, d);
}

GibbsSampler::GibbsSampler(int N, double mu, std::uint64_t seed)
    : n_(N), mu_(mu), rng_(seed), state_(N), scale_(static_cast<std::size_t>(N) * N, 1.0) {
  if (!(mu > 0.0)) throw DomainError("GibbsSampler: mu must be positive");
  // Start at the large-mu profile shifted to this mu; burn-in does the rest.
  const InterfaceGrid t = theta_min(N);
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) state_(i, j) = t(i, j) - (2.0 * N + 1 - i - j) * std::log(mu);
}

bool GibbsSampler::update_site(int i, int j) {
  const std::size_t s = static_cast<std::size_t>((i - 1) * n_ + (j - 1));
  const double v = state_(i, j) + scale_[s] * normal_(rng_);
  ++proposed_;
  const double la = metropolis_log_accept(state_, mu_, i, j, v);
  if (la >= 0.0 || std::log(unif_(rng_)) < la) {
    state_(i, j) = v;
    ++accepted_;
    return true;
  }
  return false;
}

int GibbsSampler::sweep() {
  int acc = 0;
  for (int i = 1; i <= n_; ++i)
    for (int j = 1; j <= n_; ++j) acc += update_site(i, j);
  return acc;
}

void GibbsSampler::tune(std::int64_t updates, double target) {
  const int sites = n_ * n_;
  const std::int64_t rounds = std::max<std::int64_t>(1, updates / (200 * sites));
  for (std::int64_t r = 0; r < rounds; ++r) {
    std::vector<int> acc(sites, 0);
    for (int rep = 0; rep < 200; ++rep) {
      for (int i = 1; i <= n_; ++i)
        for (int j = 1; j <= n_; ++j) acc[(i - 1) * n_ + (j - 1)] += update_site(i, j);
    }
    // Robbins-Monro step on the log scale with a decaying gain.
    const double gain = 1.0 / std::sqrt(1.0 + r);
    for (int s = 0; s < sites; ++s) scale_[s] *= std::exp(gain * (acc[s] / 200.0 - target));
  }
  proposed_ = accepted_ = 0;
}

double GibbsSampler::acceptance_rate() const {
  return proposed_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposed_);
}

GibbsSummary gibbs_sampler(int N, double mu, std::uint64_t seed, const GibbsOptions& opt) {
  GibbsSampler chain(N, mu, seed);
  chain.tune(opt.burn_in, opt.target_acceptance);
  const int sites = N * N;
  const std::int64_t sweeps = std::max<std::int64_t>(opt.updates / sites, 2 * opt.batches);
  std::vector<std::vector<double>> trace(sites, std::vector<double>(static_cast<std::size_t>(sweeps)));
  for (std::int64_t t = 0; t < sweeps; ++t) {
    chain.sweep();
    const auto& v = chain.state().values();
    for (int s = 0; s < sites; ++s) trace[s][t] = v[s];
  }
  GibbsSummary out;
  out.N = N;
  out.mu = mu;
  out.mean = InterfaceGrid(N);
  out.std_error = InterfaceGrid(N);
  out.second_moment = InterfaceGrid(N);
  out.acceptance = chain.acceptance_rate();
  out.proposal_scale = chain.proposal_scale();
  for (int s = 0; s < sites; ++s) {
    const BatchMeans bm = batch_means(trace[s], opt.batches);
    out.mean.values()[s] = bm.mean;
    out.std_error.values()[s] = bm.std_error;
    double m2 = 0.0;
    for (double x : trace[s]) m2 += x * x;
    out.second_moment.values()[s] = m2 / static_cast<double>(trace[s].size());
    out.tau_int_max = std::max(out.tau_int_max, bm.tau_int);
  }
  return out;
}

PolymerPhiSummary polymer_phi_moments(int N, double mu, int samples, std::uint64_t seed, unsigned threads) {
  if (samples < 2) throw DomainError("polymer_phi_moments: need at least two samples");
  const WeightSpec spec = WeightSpec::log_gamma(mu);
  const auto grids = parallel_map<InterfaceGrid>(static_cast<std::size_t>(samples), threads, [&](std::size_t r) {
    return build_phi(site_fn(UniformField{replica_seed(seed, r)}, spec), N);
  });
  PolymerPhiSummary out;
  out.samples = samples;
  out.mean = InterfaceGrid(N);
  out.std_error = InterfaceGrid(N);
  out.second_moment = InterfaceGrid(N);
  std::vector<double> column(static_cast<std::size_t>(samples));
  for (int s = 0; s < N * N; ++s) {
    double m2 = 0.0;
    for (int r = 0; r < samples; ++r) {
      column[r] = grids[r].values()[s];
      m2 += column[r] * column[r];
    }
    out.mean.values()[s] = mean(column);
    out.std_error.values()[s] = std_error(column);
    out.second_moment.values()[s] = m2 / samples;
  }
  return out;
}

InterfaceGrid theta_rescale(const InterfaceGrid& phi, double mu) {
  if (!(mu > 0.0)) throw DomainError("theta_rescale: mu must be positive");
  const int N = phi.N();
  InterfaceGrid t(N);
  const double lm = std::log(mu);
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) t(i, j) = phi(i, j) + (2.0 * N + 1 - i - j) * lm;
  return t;
}

InterfaceGrid theta_min(int N) {
  InterfaceGrid t(N);
  for (int i = 1; i <= N; ++i) {
    for (int j = i; j <= N; ++j) {
      const double v = log_factorial(i - 1) + log_factorial(2 * N - j - i + 1) + log_factorial(2 * N - j - i) -
                       log_factorial(2 * N - j) - log_factorial(N - j) - log_factorial(N - i);
      t(i, j) = v;
      t(j, i) = v;
    }
  }
  return t;
}

double energy_F(const InterfaceGrid& th) {
  const int N = th.N();
  double f = std::exp(-th(N, N));
  for (int i = 1; i <= N; ++i) f += th(i, i);
  for_each_edge(N, [&](int a, int b, int c, int d) { f += std::exp(th(c, d) - th(a, b)); });
  return f;
}

InterfaceGrid grad_F(const InterfaceGrid& th) {
  const int N = th.N();
  InterfaceGrid g(N);
  for (int i = 1; i <= N; ++i) g(i, i) += 1.0;
  g(N, N) -= std::exp(-th(N, N));
  for_each_edge(N, [&](int a, int b, int c, int d) {
    const double e = std::exp(th(c, d) - th(a, b));
    g(c, d) += e;
    g(a, b) -= e;
  });
  return g;
}

std::vector<double> hessian_F(const InterfaceGrid& th) {
  const int N = th.N();
  const std::size_t n = static_cast<std::size_t>(N) * N;
  std::vector<double> h(n * n, 0.0);
  auto at = [N](int i, int j) { return static_cast<std::size_t>((i - 1) * N + (j - 1)); };
  h[at(N, N) * n + at(N, N)] += std::exp(-th(N, N));
  for_each_edge(N, [&](int a, int b, int c, int d) {
    const double e = std::exp(th(c, d) - th(a, b));
    const std::size_t x = at(a, b), y = at(c, d);
    h[x * n + x] += e;
    h[y * n + y] += e;
    h[x * n + y] -= e;
    h[y * n + x] -= e;
  });
  return h;
}

double rescaled_value(const InterfaceGrid& g, double s, double t) {
  const int N = g.N();
  auto idx = [N](double u) {
    const auto k = static_cast<int>(std::floor(u * N)) + 1;
    return std::clamp(k, 1, N);
  };
  return g(idx(s), idx(t)) / N;
}

LargeMuReport large_mu_convergence(int seeds, int N, const std::vector<double>& mu_list, std::uint64_t seed,
                                   unsigned threads) {
  if (seeds < 1 || mu_list.empty()) throw DomainError("large_mu_convergence: empty input");
  LargeMuReport r;
  r.mu = mu_list;
  const InterfaceGrid target = theta_min(N);
  for (double mu : mu_list) {
    const WeightSpec spec = WeightSpec::log_gamma(mu);
    r.sup.push_back(parallel_map<double>(static_cast<std::size_t>(seeds), threads, [&](std::size_t s) {
      const auto phi = build_phi(site_fn(UniformField{replica_seed(seed, s)}, spec), N);
      return sup_distance(theta_rescale(phi, mu), target);
    }));
    r.median_sup.push_back(empirical_quantile(r.sup.back(), 0.5));
  }
  r.median_decreasing = true;
  for (std::size_t i = 1; i < r.median_sup.size(); ++i)
    r.median_decreasing = r.median_decreasing && r.median_sup[i] < r.median_sup[i - 1];
  if (mu_list.size() >= 2) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < mu_list.size(); ++i) {
      x.push_back(std::log(mu_list[i]));
      y.push_back(std::log(r.median_sup[i]));
    }
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    r.fitted_exponent = sxy / sxx;
  }
  return r;
}

SmallMuReport small_mu_coupling(int seeds, int N, int m, int k, const std::vector<double>& mu_list,
                                std::uint64_t seed, unsigned threads) {
  if (seeds < 2 || mu_list.empty()) throw DomainError("small_mu_coupling: empty input");
  SmallMuReport r;
  r.mu = mu_list;
  r.seeds = seeds;
  std::vector<WeightSpec> specs;
  for (double mu : mu_list) specs.push_back(WeightSpec::log_gamma(mu));
  struct Row {
    double L = 0.0;
    std::vector<double> scaled;
  };
  const auto rows = parallel_map<Row>(static_cast<std::size_t>(seeds), threads, [&](std::size_t s) {
    const UniformField field{replica_seed(seed, s)};
    Row row;
    row.L = last_passage([field](Point z) { return coupled_exponential(field, z); }, N, m, k);
    for (std::size_t a = 0; a < specs.size(); ++a)
      row.scaled.push_back(mu_list[a] * log_tau(site_fn(field, specs[a]), N, m, k));
    return row;
  });
  r.diff.assign(mu_list.size(), std::vector<double>(static_cast<std::size_t>(seeds)));
  int decreasing = 0;
  for (int s = 0; s < seeds; ++s) {
    bool dec = true;
    for (std::size_t a = 0; a < mu_list.size(); ++a) {
      r.diff[a][s] = std::fabs(rows[s].scaled[a] - rows[s].L);
      if (a > 0 && !(r.diff[a][s] < r.diff[a - 1][s])) dec = false;
    }
    decreasing += dec;
  }
  r.fraction_decreasing = static_cast<double>(decreasing) / seeds;
  // L drawn from an independent seed stream so the KS statistic compares laws,
  // not coupled samples.
  const std::uint64_t other = fmix64(seed ^ 0x5851f42d4c957f2dULL);
  const auto indep = parallel_map<double>(static_cast<std::size_t>(seeds), threads, [&](std::size_t s) {
    const UniformField field{replica_seed(other, s)};
    return last_passage([field](Point z) { return coupled_exponential(field, z); }, N, m, k);
  });
  std::vector<double> last;
  for (const Row& row : rows) last.push_back(row.scaled.back());
  r.ks = ks_two_sample(last, indep);
  return r;
}

double gt_volume(const std::vector<double>& lambda) {
  const std::size_t n = lambda.size();
  if (n == 0) throw DomainError("gt_volume: empty lambda");
  double logv = -log_superfactorial(static_cast<std::int64_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = lambda[i] - lambda[j];
      if (!(d > 0.0)) return 0.0;
      logv += std::log(d);
    }
  }
  return std::exp(logv);
}

bool is_gt_pattern(const InterfaceGrid& g, double tol) {
  const int N = g.N();
  for (int i = 1; i <= N; ++i) {
    for (int j = i; j <= N; ++j) {
      if (i + 1 <= j && g(i + 1, j) > g(i, j) + tol) return false;
      if (j + 1 <= N && g(i, j + 1) > g(i, j) + tol) return false;
    }
  }
  return true;
}

VolumeEstimate gt_volume_mc(const std::vector<double>& lambda, std::int64_t samples, std::uint64_t seed) {
  const int N = static_cast<int>(lambda.size());
  if (N < 1 || samples < 1) throw DomainError("gt_volume_mc: empty input");
  for (int i = 1; i < N; ++i)
    if (!(lambda[i - 1] > lambda[i])) return {0.0, 0.0};
  if (N == 1) return {1.0, 0.0};
  const double lo = lambda.back(), hi = lambda.front();
  InterfaceGrid g(N, lo);
  for (int i = 1; i <= N; ++i) g(i, i) = lambda[i - 1];
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int i = 1; i <= N; ++i)
      for (int j = i + 1; j <= N; ++j) g(i, j) = u(rng);
    hits += is_gt_pattern(g);
  }
  const int free_sites = N * (N - 1) / 2;
  const double box = std::pow(hi - lo, free_sites);
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

double whittaker_gl2(double lambda1, double lambda2) {
  // Centered variable u = p - (l1 + l2)/2 gives exp(-2 e^{-d} cosh u).
  const double d = 0.5 * (lambda1 - lambda2);
  auto f = [d](double u) { return std::exp(-std::exp(u - d) - std::exp(-u - d)); };
  return 2.0 * integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-15, 1e-13);
}

double whittaker_gl2_bessel(double lambda1, double lambda2) {
  return 2.0 * bessel_k0(2.0 * std::exp(0.5 * (lambda2 - lambda1)));
}

double whittaker_measure_logdensity(const std::vector<double>& lambda, double mu) {
  const std::size_t N = lambda.size();
  if (N < 1 || N > 2) throw DomainError("whittaker_measure_logdensity: only N = 1, 2");
  double s = 0.0;
  for (double l : lambda) s += l;
  double v = -static_cast<double>(N * N) * log_gamma(mu) - std::exp(-lambda.back()) - mu * s;
  if (N == 2) v += 2.0 * std::log(whittaker_gl2(lambda[0], lambda[1]));
  return v;
}

}  // namespace nipoly
