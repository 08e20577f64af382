#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <random>

#include "doctest.h"
#include "nipoly/errors.hpp"
#include "nipoly/limit_shapes.hpp"
#include "nipoly/polymer.hpp"
#include "nipoly/quadrature.hpp"
#include "nipoly/special.hpp"

using namespace nipoly;

TEST_CASE("Jacobi eigenvalues against Eigen") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int n : {1, 2, 5, 17, 40}) {
    RealMatrix a(n);
    Eigen::MatrixXd e(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        const double v = g(rng);
        a(i, j) = a(j, i) = v;
        e(i, j) = e(j, i) = v;
      }
    const auto ours = jacobi_eigenvalues(a);
    Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e).eigenvalues();
    for (int i = 0; i < n; ++i) CHECK(ours[i] == doctest::Approx(ref(n - 1 - i)).epsilon(1e-10).scale(1.0));
  }
  for (int n : {3, 12}) {
    HermitianMatrix h(n);
    Eigen::MatrixXcd e(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        const std::complex<double> v(g(rng), i == j ? 0.0 : g(rng));
        h(i, j) = v;
        h(j, i) = std::conj(v);
        e(i, j) = v;
        e(j, i) = std::conj(v);
      }
    const auto ours = hermitian_eigenvalues(h);
    Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(e).eigenvalues();
    for (int i = 0; i < n; ++i) CHECK(ours[i] == doctest::Approx(ref(n - 1 - i)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("Jacobi reports non-convergence") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  RealMatrix a(30);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
  JacobiOptions opt;
  opt.max_sweeps = 1;
  CHECK_THROWS_AS(jacobi_eigenvalues(a, opt), NumericError);
}

TEST_CASE("random matrix samples preserve the trace and are reproducible") {
  const auto h = gue_matrix(40, 3);
  const auto ev = hermitian_eigenvalues(h);
  double s = 0.0;
  for (double v : ev) s += v;
  CHECK(std::fabs(s - h.trace()) < 1e-9);
  CHECK(gue_sample(40, 3) == ev);
  const auto l = lue_matrix(30, 20, 4);
  const auto lev = hermitian_eigenvalues(l);
  s = 0.0;
  for (double v : lev) s += v;
  CHECK(std::fabs(s - l.trace()) < 1e-9);
  // m x m Wishart with N > m degrees of freedom: positive definite.
  CHECK(lev.size() == 20);
  for (double v : lev) CHECK(v > 0.0);
}

TEST_CASE("minors process is a Gelfand-Tsetlin pattern") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(is_gt_pattern(minors_process(gue_matrix(8, seed)), 1e-9));
    CHECK(is_gt_pattern(minors_process(lue_matrix(8, 5, seed)), 1e-9));
  }
  const auto h = gue_matrix(5, 1);
  const auto g = minors_process(h);
  const auto full = hermitian_eigenvalues(h);
  for (int i = 1; i <= 5; ++i) CHECK(g(i, i) == doctest::Approx(full[i - 1]));
  CHECK(g(1, 5) == doctest::Approx(h(0, 0).real()));
}

TEST_CASE("Marchenko-Pastur quantiles") {
  for (double c : {0.1, 0.5, 1.0}) {
    CHECK(mp_quantile(c, 0.0) == doctest::Approx(mp_upper_edge(c)).epsilon(1e-12));
    CHECK(mp_quantile(c, c) == doctest::Approx(mp_lower_edge(c)).epsilon(1e-10).scale(1.0));
    CHECK(integrate([c](double u) { return mp_density(c, u); }, mp_lower_edge(c), mp_upper_edge(c)) ==
          doctest::Approx(1.0).epsilon(1e-9));
    double prev = INFINITY;
    for (double a = 0.01 * c; a < c; a += 0.02 * c) {
      const double q = mp_quantile(c, a);
      CHECK(q < prev);
      prev = q;
      CHECK(std::fabs(mp_mass(c, q) - a) < 1e-10);
    }
  }
  // Median of MP(1): solve t + sin t cos t = pi/4 for the closed CDF.
  const double t = bisect([](double x) { return x + std::sin(x) * std::cos(x) - kPi / 4; }, 0.0, kPi / 2);
  CHECK(mp_quantile(1.0, 0.5) == doctest::Approx(4 * std::sin(t) * std::sin(t)).epsilon(1e-10));
}

TEST_CASE("semicircle quantiles and CDF") {
  CHECK(sc_quantile(0.5) == doctest::Approx(0.0).scale(1.0));
  CHECK(sc_quantile(0.0) == doctest::Approx(2.0));
  CHECK(sc_quantile(1.0) == doctest::Approx(-2.0));
  double prev = INFINITY;
  for (double x = 0.01; x < 1.0; x += 0.01) {
    const double q = sc_quantile(x);
    CHECK(q < prev);
    prev = q;
    CHECK(std::fabs(1.0 - sc_cdf(q) - x) < 1e-10);
  }
  for (double phi = -1.5; phi < 1.5; phi += 0.1) {
    CHECK(F_sc_check(phi) < 1e-12);
    CHECK(sc_cdf(2 * std::sin(phi)) ==
          doctest::Approx(0.5 + phi / kPi + std::sin(phi) * std::cos(phi) / kPi).epsilon(1e-13));
  }
}

TEST_CASE("limit shapes: symmetry and special values") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double s = U(rng), t = U(rng);
    CHECK(xi_mp(s, t) == xi_mp(t, s));
    CHECK(xi_ht(s, t) == xi_ht(t, s));
    CHECK(xi_sc(s, t) == xi_sc(t, s));
  }
  CHECK(xi_ht(1, 1) == doctest::Approx(0.0).scale(1.0));
  CHECK(xi_ht(0, 0) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
  for (double c : {0.05, 0.3, 0.5, 0.8, 1.0}) {
    CHECK(xi_mp(0, 1 - c) == doctest::Approx(rost_ell(c)).epsilon(1e-10));
    CHECK(xi_mp(c, c) == doctest::Approx(mp_quantile(1.0, c)).epsilon(1e-10));
  }
}

TEST_CASE("theta_min tends to the xi_ht surface") {
  const double a = xi_ht_gap(20), b = xi_ht_gap(40), c = xi_ht_gap(80);
  CHECK(b < a);
  CHECK(c < b);
}

TEST_CASE("edge profiles") {
  CHECK(xi_edge_bottom(2.0, 0.0) == doctest::Approx(2 * kEulerGamma).epsilon(1e-10));
  for (double mu : {0.5, 1.0, 3.0}) {
    CHECK(xi_edge_bottom(mu, 1.0) == doctest::Approx(-boost::math::digamma(mu)).epsilon(1e-10));
    CHECK(xi_edge_top(mu, 0.0) == doctest::Approx(-boost::math::digamma(mu)).epsilon(1e-10));
    // Both edges reach the corner value with a square-root correction
    // +-2 sqrt(eps psi1(mu)) from the optimizer escaping to theta ~ sqrt(eps).
    const double eps = 1e-6, corr = 2 * std::sqrt(eps * boost::math::trigamma(mu));
    CHECK(xi_edge_bottom(mu, 1 - eps) + boost::math::digamma(mu) == doctest::Approx(corr).epsilon(0.05));
    CHECK(xi_edge_top(mu, eps) + boost::math::digamma(mu) == doctest::Approx(-corr).epsilon(0.05));
  }
  CHECK(xi_edge_top(1.0, 0.0) == doctest::Approx(kEulerGamma).epsilon(1e-12));
  // Grid oracle for the sup defining the top edge.
  for (double t : {0.25, 0.5, 0.75}) {
    double best = -INFINITY;
    for (int i = 1; i < 400000; ++i) {
      const double th = std::exp(-12.0 + 24.0 * i / 400000.0);
      best = std::max(best, t * boost::math::digamma(th) - boost::math::digamma(2.0 + th));
    }
    CHECK(xi_edge_top(2.0, t) == doctest::Approx(best).epsilon(1e-6));
  }
}

TEST_CASE("diagonal free energy") {
  const auto r = diagonal_free_energy_check(2.0, 1.0, 100, 200, 5);
  CHECK(r.target == doctest::Approx(kEulerGamma - 1).epsilon(1e-12));
  CHECK(r.within_3se);
  CHECK(r.variance == doctest::Approx(boost::math::trigamma(2.0) / 1e4).epsilon(0.25));
}

TEST_CASE("bead surface tension") {
  CHECK(bead_sigma_tilted(-1, 0).value == doctest::Approx(0.0).scale(1.0));
  CHECK_FALSE(bead_sigma_tilted(-1, 0).infinite);
  CHECK(bead_sigma_tilted(1, 0).infinite);
  CHECK(bead_sigma_tilted(-1, 0.5).infinite);
  CHECK(bead_sigma_tilted(-1, 0.4999).value > bead_sigma_tilted(-1, 0.49).value);
  CHECK(bead_sigma_tilted(-1, 0.4999999).value > 10.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 500; ++i) {
    const double p = -0.01 - 5 * U(rng);
    const double q = (U(rng) - 0.5) * std::fabs(p) * 0.999;
    const double l = 0.01 + 10 * U(rng);
    CHECK(bead_scaling_residual(p, q, l) < 1e-12);
  }
  // Untilted form agrees with the tilted one.
  CHECK(bead_sigma(-0.7, -0.3).value == doctest::Approx(bead_sigma_tilted(-1.0, 0.2).value));
  CHECK(bead_omega(0.0) == 0.0);
  const double h = 1e-6;
  for (double u : {-0.4, -0.1, 0.2, 0.45})
    CHECK((bead_omega(u + h) - bead_omega(u - h)) / (2 * h) == doctest::Approx(bead_omega_prime(u)).epsilon(1e-6));
}

TEST_CASE("principal value integral") {
  for (double phi : {-1.2, -0.3, kPi / 6, 1.0}) {
    const double a = 2 * std::sin(phi);
    CHECK(sc_principal_value(a) == doctest::Approx(a / 2).epsilon(1e-9).scale(1.0));
  }
  CHECK(std::fabs(sc_principal_value(0.0)) < 1e-12);
}

TEST_CASE("Euler-Lagrange balance for the semicircle") {
  const auto r = omega_identity_check(default_phi_grid());
  CHECK(r.rows.size() == 99);
  CHECK(r.max_residual_closed < 1e-12);
  CHECK(r.max_residual_numeric < 1e-6);
  CHECK(r.max_fd_error < 1e-4);
  CHECK(r.max_residual_alt_reading > 1.0);
  const auto z = omega_identity_check({0.0});
  CHECK(z.rows[0].tension_term == doctest::Approx(0.0).scale(1.0));
  CHECK(z.rows[0].riesz_closed == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("affine Wulff identity") {
  const auto one = affine_wulff_check(-1.0);
  CHECK(one.lhs == doctest::Approx(0.0).scale(1.0));
  CHECK(one.rhs == doctest::Approx(0.0).scale(1.0));
  CHECK(one.log_integral == doctest::Approx(-0.75).epsilon(1e-10));
  const auto two = affine_wulff_check(-2.0);
  CHECK(two.lhs == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-10));
  CHECK(two.rhs == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-10));
  for (double b : {-0.1, -1.0, -3.0, -40.0}) {
    const auto r = affine_wulff_check(b);
    CHECK(std::fabs(r.argmin) < 1e-6);
    CHECK(r.residual < 1e-10);
  }
}

TEST_CASE("quantile gaps for small random matrices") {
  CHECK(lue_mp_gap(100, 50, 4, 7).sup_gap < 0.08);
  CHECK(gue_semicircle_gap(80, 4, 8).sup_gap < 0.15);
}

TEST_CASE("Johansson identity: trivial full-rectangle case and small k = 1") {
  const auto full = johansson_check(4, 3, 3, 20000, 9);
  CHECK(std::fabs(full.mean_lpp - 12.0) < 3 * full.se_lpp);
  CHECK(std::fabs(full.mean_eig - 12.0) < 3 * full.se_eig);
  const auto r = johansson_check(5, 3, 1, 20000, 10);
  CHECK(r.means_agree);
  CHECK(r.ks < 0.03);
}

TEST_CASE("diagonal fluctuations at small scale") {
  const auto r = fluctuation_mc(1.0, 40, {0.25, 0.5, 1.0}, 2000, 11);
  CHECK(r.rows.size() == 3);
  for (const auto& row : r.rows) {
    CHECK(row.variance_exact == doctest::Approx(row.t).epsilon(0.02));
    CHECK(row.variance == doctest::Approx(row.variance_exact).epsilon(0.15));
    CHECK(std::fabs(row.mean - row.mean_exact) < 4 * row.mean_se);
  }
  CHECK(std::fabs(r.increment_correlation) < 0.08);
}

TEST_CASE("superfactorial asymptotics") {
  CHECK(superfactorial_asymptotic_check(1.0, 500) < 0.02);
  CHECK(superfactorial_asymptotic_check(2.0, 250) < 0.04);
  const double a = superfactorial_asymptotic_check(1.0, 200), b = superfactorial_asymptotic_check(1.0, 400);
  CHECK(b / a == doctest::Approx(0.5).epsilon(0.2));
}
