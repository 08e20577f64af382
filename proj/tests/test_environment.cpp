#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <set>

#include "doctest.h"
#include "nipoly/environment.hpp"
#include "nipoly/errors.hpp"
#include "nipoly/stats.hpp"

using namespace nipoly;

namespace {
std::vector<double> draw(const WeightSpec& spec, std::uint64_t seed, int n) {
  const UniformField f{seed};
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(omega_at(f, spec, {i % 317, i / 317}));
  return out;
}
}  // namespace

TEST_CASE("field is deterministic and order independent") {
  const UniformField a{42}, b{42}, c{43};
  CHECK(a.at({5, 7}) == b.at({5, 7}));
  CHECK(a.at({5, 7}) != c.at({5, 7}));
  CHECK(a.at({5, 7}) != a.at({7, 5}));
  for (int i = -50; i < 50; ++i) {
    const double u = a.at({i, -i});
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("replica seeds do not collide") {
  std::set<std::uint64_t> s;
  for (std::uint64_t r = 0; r < 10000; ++r) s.insert(replica_seed(9, r));
  CHECK(s.size() == 10000);
}

TEST_CASE("uniform field passes KS and lag correlation") {
  const UniformField f{2024};
  std::vector<double> u, v;
  for (int i = 0; i < 100000; ++i) {
    u.push_back(f.at({i % 400, i / 400}));
    v.push_back(f.at({i % 400 + 1, i / 400}));
  }
  CHECK(ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); }) < 0.01);
  CHECK(std::fabs(correlation(u, v)) < 0.015);
}

TEST_CASE("every law matches its target CDF at 1e5 samples") {
  const int n = 100000;
  for (double mu : {0.3, 1.0, 2.0, 17.0}) {
    CAPTURE(mu);
    const auto x = draw(WeightSpec::log_gamma(mu), 11, n);
    // omega = log zeta, zeta = 1/G with G ~ Gamma(mu): P(omega <= w) = Q(mu, e^{-w}).
    CHECK(ks_statistic(x, [mu](double w) { return boost::math::gamma_q(mu, std::exp(-w)); }) < 0.01);
  }
  boost::math::exponential ed;
  boost::math::normal nd;
  CHECK(ks_statistic(draw(WeightSpec::exponential(), 12, n),
                     [&](double w) { return w <= 0 ? 0.0 : boost::math::cdf(ed, w); }) < 0.01);
  CHECK(ks_statistic(draw(WeightSpec::gaussian(), 13, n), [&](double w) { return boost::math::cdf(nd, w); }) < 0.01);
  const auto b = draw(WeightSpec::bernoulli(0.3), 14, n);
  CHECK(mean(b) == doctest::Approx(0.3).epsilon(0.02));
  for (double v : b) CHECK((v == 0.0 || v == 1.0));
  for (double v : draw(WeightSpec::constant(2.5), 15, 100)) CHECK(v == 2.5);
}

TEST_CASE("means and log-mgf") {
  const auto lg = WeightSpec::log_gamma(3.0);
  const auto x = draw(lg, 21, 200000);
  CHECK(mean(x) == doctest::Approx(lg.mean()).epsilon(0.01));
  CHECK(lg.mean() == doctest::Approx(-(1.5 - kEulerGamma)).epsilon(1e-13));
  CHECK(lg.log_mgf(1.0) == doctest::Approx(std::log(0.5)).epsilon(1e-13));
  CHECK(std::isinf(lg.log_mgf(3.0)));
  CHECK(std::isinf(WeightSpec::exponential().log_mgf(1.0)));
  CHECK(WeightSpec::gaussian().log_mgf(2.0) == doctest::Approx(2.0));
  CHECK(WeightSpec::bernoulli(0.5).log_mgf(std::log(3.0)) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(WeightSpec::log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(WeightSpec::log_gamma(-1.0), DomainError);
  CHECK_THROWS_AS(WeightSpec::bernoulli(1.5), DomainError);
  CHECK_THROWS_AS(WeightSpec::constant(INFINITY), DomainError);
}

TEST_CASE("coupling is continuous and monotone in mu") {
  const UniformField f{77};
  for (int s = 0; s < 20; ++s) {
    const Point z{s, 3 * s};
    double prev = INFINITY;
    double prev_mu = 0.0;
    for (double mu = 0.5; mu <= 5.0; mu += 0.01) {
      const double w = omega_at(f, WeightSpec::log_gamma(mu), z);
      if (prev_mu > 0.0) {
        // Quantile of 1/Gamma(mu) is decreasing in mu with bounded slope on this grid.
        CHECK(w < prev);
        CHECK(prev - w < 0.2);
      }
      prev = w;
      prev_mu = mu;
    }
  }
}

TEST_CASE("coupled exponential is the small-mu limit") {
  const UniformField f{5};
  for (int i = 0; i < 20; ++i) {
    const Point z{i, 2};
    const double e = coupled_exponential(f, z);
    const double a = 1e-3 * omega_at(f, WeightSpec::log_gamma(1e-3), z);
    const double b = 1e-5 * omega_at(f, WeightSpec::log_gamma(1e-5), z);
    CHECK(std::fabs(b - e) <= std::fabs(a - e) + 1e-12);
    CHECK(std::fabs(b - e) < 0.01 * std::max(1.0, e));
  }
}
