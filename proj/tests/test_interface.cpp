#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <random>

#include "doctest.h"
#include "nipoly/errors.hpp"
#include "nipoly/interface.hpp"
#include "nipoly/special.hpp"
#include "nipoly/stats.hpp"

using namespace nipoly;
using boost::math::quadrature::gauss_kronrod;

namespace {
double gk(const std::function<double(double)>& f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

InterfaceGrid random_grid(int N, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  InterfaceGrid out(N);
  for (double& v : out.values()) v = g(rng);
  return out;
}
}  // namespace

TEST_CASE("phi at N = 1 is the single log weight") {
  const UniformField f{13};
  const auto lz = site_fn(f, WeightSpec::log_gamma(2.5));
  CHECK(build_phi(lz, 1)(1, 1) == doctest::Approx(lz({1, 1})).epsilon(1e-14));
}

TEST_CASE("phi inversion identity and diagonal consistency on every sample") {
  double worst = 0.0, worst_diag = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto lz = site_fn(UniformField{replica_seed(99, s)}, WeightSpec::log_gamma(1.3));
    const auto t = tau_table(lz, 5);
    worst = std::max(worst, inversion_residual(build_phi(t), t));
    for (int N = 1; N <= 4; ++N) worst_diag = std::max(worst_diag, diagonal_consistency_gap(tau_table(lz, N)));
  }
  CHECK(worst < 1e-9);
  CHECK(worst_diag < 1e-9);
}

TEST_CASE("phi of an eigen-free polymer sample is finite and matches tau ratios") {
  const auto lz = site_fn(UniformField{4}, WeightSpec::log_gamma(3.0));
  const int N = 4;
  const auto t = tau_table(lz, N);
  const auto phi = build_phi(t);
  for (int i = 1; i <= N; ++i)
    for (int j = i; j <= N; ++j)
      CHECK(phi(i, j) == doctest::Approx(t.tau[N - j + i][i] - t.tau[N - j + i][i - 1]).epsilon(1e-12));
  for (double v : phi.values()) CHECK(std::isfinite(v));
}

TEST_CASE("N = 1 interface density normalizes and has mean -psi0") {
  for (double mu : {0.7, 1.5, 4.0}) {
    auto dens = [mu](double l) {
      InterfaceGrid g(1, l);
      return std::exp(interface_log_density(g, mu));
    };
    CHECK(gk(dens, -6.0, 60.0 / mu) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(gk([&](double l) { return l * dens(l); }, -6.0, 60.0 / mu) ==
          doctest::Approx(-boost::math::digamma(mu)).epsilon(1e-7));
    CHECK(whittaker_measure_logdensity({0.4}, mu) == doctest::Approx(interface_log_density(InterfaceGrid(1, 0.4), mu)));
  }
}

TEST_CASE("translation changes the density by the diagonal and corner terms only") {
  std::mt19937_64 rng(1);
  const double mu = 1.7, h = 0.35;
  for (int N : {1, 3, 5}) {
    auto g = random_grid(N, rng);
    auto s = g;
    for (double& v : s.values()) v += h;
    const double expect = -mu * N * h - std::exp(-s(N, N)) + std::exp(-g(N, N));
    CHECK(interface_log_density(s, mu) - interface_log_density(g, mu) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("local weight differences reproduce the full density") {
  std::mt19937_64 rng(2);
  const int N = 4;
  const double mu = 2.2;
  auto g = random_grid(N, rng);
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) {
      auto moved = g;
      moved(i, j) += 0.3;
      CHECK(interface_log_density(moved, mu) - interface_log_density(g, mu) ==
            doctest::Approx(interface_local_log_weight(g, mu, i, j, moved(i, j)) -
                            interface_local_log_weight(g, mu, i, j, g(i, j)))
                .epsilon(1e-10));
    }
}

TEST_CASE("Metropolis acceptance is exactly reversible") {
  std::mt19937_64 rng(3);
  const double mu = 1.5;
  for (int rep = 0; rep < 100; ++rep) {
    auto g = random_grid(3, rng);
    const int i = 1 + static_cast<int>(rng() % 3), j = 1 + static_cast<int>(rng() % 3);
    const double a = g(i, j), b = a + std::normal_distribution<double>(0.0, 1.0)(rng);
    const double fwd = metropolis_log_accept(g, mu, i, j, b);
    auto h = g;
    h(i, j) = b;
    const double back = metropolis_log_accept(h, mu, i, j, a);
    const double d = interface_local_log_weight(g, mu, i, j, b) - interface_local_log_weight(g, mu, i, j, a);
    CHECK(fwd - back == d);
    CHECK(std::max(fwd, back) == 0.0);
  }
}

TEST_CASE("Gibbs sampler at N = 1 has mean -psi0") {
  GibbsOptions opt;
  opt.updates = 400000;
  opt.burn_in = 20000;
  const auto s = gibbs_sampler(1, 1.5, 8, opt);
  CHECK(s.acceptance > 0.2);
  CHECK(s.acceptance < 0.7);
  CHECK(std::fabs(s.mean(1, 1) + boost::math::digamma(1.5)) < 3 * s.std_error(1, 1));
}

TEST_CASE("Gibbs sampler and polymer construction agree at N = 2") {
  GibbsOptions opt;
  opt.updates = 1'000'000;
  opt.burn_in = 50000;
  const auto g = gibbs_sampler(2, 1.5, 17, opt);
  const auto p = polymer_phi_moments(2, 1.5, 40000, 18);
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      const double se = std::hypot(g.std_error(i, j), p.std_error(i, j));
      CHECK(std::fabs(g.mean(i, j) - p.mean(i, j)) < 3 * se);
    }
}

TEST_CASE("theta_min closed forms") {
  const auto t = theta_min(2);
  CHECK(t(1, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(t(1, 2) == doctest::Approx(0.0).scale(1.0));
  CHECK(t(2, 1) == doctest::Approx(0.0).scale(1.0));
  CHECK(t(2, 2) == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
  for (int N = 1; N <= 30; ++N) {
    const auto tm = theta_min(N);
    CHECK(tm(1, 1) == doctest::Approx(log_factorial(2 * N - 2) - 2 * log_factorial(N - 1)).epsilon(1e-12).scale(1.0));
    for (int i = 1; i <= N; ++i)
      for (int j = 1; j <= N; ++j) CHECK(tm(i, j) == tm(j, i));
  }
}

TEST_CASE("theta_min is a critical point of the energy") {
  for (int N = 1; N <= 40; ++N) {
    const auto g = grad_F(theta_min(N));
    double worst = 0.0;
    for (double v : g.values()) worst = std::max(worst, std::fabs(v));
    CAPTURE(N);
    CHECK(worst < 1e-9);
  }
  const auto g2 = grad_F(theta_min(2));
  for (double v : g2.values()) CHECK(std::fabs(v) < 1e-14);
}

TEST_CASE("energy gradient and Hessian against finite differences") {
  std::mt19937_64 rng(4);
  for (int N = 1; N <= 6; ++N) {
    const auto th = random_grid(N, rng, 0.5);
    const auto g = grad_F(th);
    const auto H = hessian_F(th);
    const int n = N * N;
    for (int s = 0; s < n; ++s) {
      const double h = 1e-5;
      auto p = th, m = th;
      p.values()[s] += h;
      m.values()[s] -= h;
      const double fd = (energy_F(p) - energy_F(m)) / (2 * h);
      CHECK(std::fabs(fd - g.values()[s]) <= 1e-6 * std::max(1.0, std::fabs(fd)));
      // Symmetric, and weakly diagonally dominant: every edge term is a
      // rank-one PSD block.
      double off = 0.0;
      for (int r = 0; r < n; ++r) {
        CHECK(H[s * n + r] == doctest::Approx(H[r * n + s]).epsilon(1e-14));
        if (r != s) off += std::fabs(H[s * n + r]);
      }
      CHECK(H[s * n + s] >= off - 1e-12);
    }
  }
}

TEST_CASE("theta rescaling") {
  InterfaceGrid phi(3, 0.0);
  const auto t = theta_rescale(phi, std::exp(1.0));
  CHECK(t(1, 1) == doctest::Approx(5.0));
  CHECK(t(3, 3) == doctest::Approx(1.0));
  CHECK(t(1, 3) == doctest::Approx(3.0));
}

TEST_CASE("large mu convergence") {
  const auto r = large_mu_convergence(31, 3, {1e2, 1e3, 1e4}, 5);
  CHECK(r.median_decreasing);
  MESSAGE("fitted exponent " << r.fitted_exponent);
  CHECK(r.fitted_exponent < 0.0);
}

TEST_CASE("packed k-path coupling is exact in the small-mu limit") {
  const UniformField f{21};
  const int N = 3, m = 3;
  double e = 0.0;
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= m; ++j) e += coupled_exponential(f, {i, j});
  double prev = INFINITY;
  for (double mu : {1.0, 0.1, 0.01, 0.001}) {
    const double d = std::fabs(mu * log_tau(f, mu, N, m, m) - e);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("small mu coupling in distribution") {
  const auto r = small_mu_coupling(2000, 4, 3, 1, {1.0, 0.1, 0.01}, 6);
  MESSAGE("fraction of seeds decreasing " << r.fraction_decreasing << ", KS " << r.ks);
  CHECK(r.ks < 0.05);
  double med_prev = INFINITY;
  for (const auto& d : r.diff) {
    const double med = empirical_quantile(d, 0.5);
    CHECK(med < med_prev);
    med_prev = med;
  }
}

TEST_CASE("Gelfand-Tsetlin volume") {
  CHECK(gt_volume({1.0, 0.0}) == doctest::Approx(1.0));
  CHECK(gt_volume({2.0, 1.0, 0.0}) == doctest::Approx(1.0));
  CHECK(gt_volume({0.0, 1.0}) == 0.0);
  CHECK(gt_volume({2.0, 2.0, 0.0}) == 0.0);
  const auto mc = gt_volume_mc({2.0, 1.0, 0.0}, 400000, 3);
  CHECK(mc.value == doctest::Approx(1.0).epsilon(0.02));
  const std::vector<double> l4{3.0, 1.5, 0.5, -1.0};
  const auto mc4 = gt_volume_mc(l4, 400000, 4);
  CHECK(std::fabs(mc4.value - gt_volume(l4)) < 4 * mc4.std_error);
}

TEST_CASE("interlacing predicate") {
  InterfaceGrid g(2);
  g(1, 1) = 0.0;  // only i <= j is read
  g(1, 2) = -1.0;
  g(2, 2) = -2.0;
  CHECK(is_gt_pattern(g));
  g(2, 2) = 0.5;
  CHECK_FALSE(is_gt_pattern(g));
  CHECK_FALSE(is_gt_pattern(g, 1.0));
  CHECK(is_gt_pattern(g, 1.6));
}

TEST_CASE("Whittaker function") {
  CHECK(whittaker_gl2(0.0, 0.0) == doctest::Approx(0.2277877).epsilon(1e-6));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-4, 4);
  for (int rep = 0; rep < 40; ++rep) {
    const double a = U(rng), b = U(rng), s = U(rng);
    CHECK(whittaker_gl2(a, b) == doctest::Approx(whittaker_gl2_bessel(a, b)).epsilon(1e-8));
    CHECK(whittaker_gl2(a + s, b + s) == doctest::Approx(whittaker_gl2(a, b)).epsilon(1e-9));
    CHECK(whittaker_gl2(a + 0.5, b) > whittaker_gl2(a, b));
  }
}

TEST_CASE("N = 2 Whittaker measure is the diagonal marginal") {
  const double mu = 2.0;
  // Pointwise: integrate the two off-diagonal sites out of the full density.
  for (auto [a, b] : {std::pair{0.3, -0.8}, std::pair{1.2, 0.9}, std::pair{-0.5, -1.5}}) {
    const double inner = gk([&](double x) { return std::exp(-std::exp(x - a) - std::exp(b - x)); },
                            b - 40.0, a + 10.0);
    const double want = -4 * log_gamma(mu) - std::exp(-b) - mu * (a + b) + 2 * std::log(inner);
    CHECK(whittaker_measure_logdensity({a, b}, mu) == doctest::Approx(want).epsilon(1e-8));
  }
  // Total mass.
  const double mass = gk([&](double a) {
    return gk([&](double b) { return std::exp(whittaker_measure_logdensity({a, b}, mu)); }, -6.0, 25.0);
  }, -6.0, 25.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("rescaled index convention") {
  InterfaceGrid g(4);
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) g(i, j) = 10 * i + j;
  CHECK(rescaled_value(g, 0.0, 0.0) == doctest::Approx(11.0 / 4));
  CHECK(rescaled_value(g, 1.0, 1.0) == doctest::Approx(44.0 / 4));
  CHECK(rescaled_value(g, 0.5, 0.25) == doctest::Approx(32.0 / 4));
}
