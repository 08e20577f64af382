#include <complex>

#include "doctest.h"
#include "nipoly/errors.hpp"
#include "nipoly/lattice.hpp"
#include "nipoly/szego.hpp"

using namespace nipoly;

namespace {
// The worked example is written with the coefficient of s^m equal to d_{-m};
// the general construction stores d_m at s^m. Both give the same Toeplitz
// determinants (transpose) and the same c_0 and Szego constant.
Symbol worked() { return symbol_from_geometry({3, 2}, {-2, 2}).reflected(); }
const double kR = 5 + 2 * std::sqrt(5.0);
}  // namespace

TEST_CASE("symbol from geometry") {
  const auto s = worked();
  CHECK(s.coeffs.size() == 3);
  CHECK(s.coeff(-1) == 5.0);
  CHECK(s.coeff(0) == 10.0);
  CHECK(s.coeff(1) == 1.0);
  CHECK(s.coeff(7) == 0.0);
  const auto direct = symbol_from_geometry({3, 2}, {-2, 2});
  CHECK(direct.coeff(1) == 5.0);
  CHECK(direct.coeff(-1) == 1.0);
  const auto t = symbol_from_geometry({1, 0}, {-1, 1});
  CHECK(t.coeffs.size() == 2);
  CHECK(t.coeff(0) == 1.0);
  CHECK(t.coeff(1) == 1.0);
  CHECK(s.wiener_norm() == 16.0);
  CHECK(s.reflected().coeff(1) == 5.0);
  CHECK(strong_szego_constant(direct).value == doctest::Approx(strong_szego_constant(s).value).epsilon(1e-12));
  CHECK(std::abs(s.eval(0.0) - std::complex<double>(16.0, 0.0)) < 1e-13);
  CHECK_THROWS_AS(symbol_from_geometry({3, 2}, {1, 2}), DomainError);
}

TEST_CASE("winding number") {
  CHECK(winding_number(worked()) == 0);
  CHECK(winding_number(Symbol{{{1, 1.0}}}) == 1);
  CHECK(winding_number(Symbol{{{-1, 1.0}}}) == -1);
  CHECK(winding_number(Symbol{{{0, 0.5}, {2, 1.0}}}) == 2);
  CHECK_THROWS_AS(winding_number(Symbol{{{0, 1.0}, {1, 1.0}}}), DomainError);
  for (double scale : {1e-3, 0.5, 7.0, 1e4}) {
    Symbol s = worked();
    for (auto& [m, v] : s.coeffs) v *= scale;
    CHECK(winding_number(s) == 0);
  }
}

TEST_CASE("log coefficients of the worked symbol") {
  const auto c = log_coefficients(worked(), 30);
  CHECK(c.grid >= 4096);
  CHECK(c.at(0) == doctest::Approx(std::log(kR)).epsilon(1e-13));
  CHECK(c.at(1) == doctest::Approx(1 / kR).epsilon(1e-12));
  CHECK(c.at(-1) == doctest::Approx(5 - 2 * std::sqrt(5.0)).epsilon(1e-12));
  // Factorization oracle: c_m = -(-r)^m / m.
  for (int m = 2; m <= 10; ++m) {
    CHECK(c.at(m) == doctest::Approx(-std::pow(-1 / kR, m) / m).epsilon(1e-9).scale(1e-6));
    CHECK(c.at(-m) == doctest::Approx(-std::pow(-(5 - 2 * std::sqrt(5.0)), m) / m).epsilon(1e-9).scale(1e-6));
  }
}

TEST_CASE("Fourier inversion reproduces the symbol") {
  for (const Symbol& s : {worked(), symbol_from_geometry({2, 3}, {-1, 2}), Symbol{{{-2, 0.3}, {0, 4.0}, {1, -1.1}}}}) {
    if (winding_number(s) != 0) continue;
    const auto c = log_coefficients(s, 60);
    for (double t = 0.0; t < 6.28; t += 0.37) {
      std::complex<double> l = 0.0;
      for (const auto& [m, v] : c.c) l += v * std::exp(std::complex<double>(0.0, m * t));
      CHECK(std::abs(std::exp(l) - s.eval(t)) < 1e-10 * std::abs(s.eval(t)));
    }
  }
}

TEST_CASE("strong Szego constant") {
  const auto e = strong_szego_constant(worked());
  CHECK(e.value == doctest::Approx((2 + std::sqrt(5.0)) / 4).epsilon(1e-10));
  CHECK(e.tail_bound < 1e-10);
  CHECK(strong_szego_constant(Symbol{{{0, 3.0}}}).value == doctest::Approx(1.0));
  CHECK(strong_szego_constant(Symbol{{{-1, 0.2}, {0, 1.0}, {1, 0.3}}}).value > 0.0);
}

TEST_CASE("Toeplitz determinants") {
  const auto s = worked();
  CHECK(toeplitz_det(s, 1).to_double() == doctest::Approx(10.0));
  CHECK(toeplitz_det(s, 2).to_double() == doctest::Approx(95.0));
  const double c0 = std::log(kR);
  const double k40 = std::exp(toeplitz_det(s, 40).logmag() - 40 * c0);
  CHECK(std::fabs(k40 - strong_szego_constant(s).value) < 1e-6);
}

TEST_CASE("Toeplitz determinant counts non-intersecting paths") {
  for (auto [z, h] : {std::pair{Point{3, 2}, Point{-2, 2}}, std::pair{Point{2, 2}, Point{-1, 1}},
                      std::pair{Point{4, 1}, Point{-1, 2}}}) {
    const auto sym = symbol_from_geometry(z, h);
    for (int k = 1; k <= 3; ++k) {
      const auto xs = directed_stack({0, 0}, h, k);
      const auto ys = directed_stack(z, h, k);
      CAPTURE(k);
      CHECK(toeplitz_det(sym, k).to_double() ==
            doctest::Approx(static_cast<double>(count_kpaths(xs, ys, 10'000'000))).epsilon(1e-10));
    }
  }
}

TEST_CASE("many-paths rate") {
  const auto r = many_paths_rate(Point{3, 2}, Point{-2, 2}, 30);
  CHECK(r.c0 == doctest::Approx(std::log(kR)).epsilon(1e-12));
  CHECK(r.ceiling == doctest::Approx(std::log(10.0)));
  CHECK(r.c0 < r.ceiling);
  CHECK(r.rows.front().log_det == doctest::Approx(std::log(10.0)));
  CHECK(std::fabs(r.rows.back().rate - r.c0) < 0.02);
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    CHECK(std::fabs(r.rows[i].rate - r.c0) <= std::fabs(r.rows[i - 1].rate - r.c0) + 1e-12);
}
