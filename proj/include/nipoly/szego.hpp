#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "nipoly/lattice.hpp"
#include "nipoly/log_signed.hpp"

namespace nipoly {

// Laurent polynomial a(s) = sum_m coeffs[m] s^m with finite support.
struct Symbol {
  std::map<int, double> coeffs;

  double coeff(int m) const {
    auto it = coeffs.find(m);
    return it == coeffs.end() ? 0.0 : it->second;
  }
  std::complex<double> eval(double t) const;   // a(e^{it})
  double wiener_norm() const;
  // a(1/s): coefficient m moves to -m.
  Symbol reflected() const;
};

// d_m = C(z1 + z2 + m(h1 + h2), z1 + m h1), the single-path count from 0 to
// z + m h. Requires h1 < 0 < h2 so the support is finite.
Symbol symbol_from_geometry(Point z, Point h);

// x + (i-1) h for i = 1..k.
KPoint directed_stack(Point x, Point h, int k);

// Net number of turns of a(e^{it}) about the origin, t in [0, 2 pi).
// Throws DomainError if |a| nearly vanishes on the grid.
int winding_number(const Symbol& sym);

struct LogCoefficients {
  std::map<int, double> c;   // c_m for |m| <= M
  int grid = 0;              // final number of circle points
  double stability = 0.0;    // max change of c_m on the last grid doubling

  double at(int m) const {
    auto it = c.find(m);
    return it == c.end() ? 0.0 : it->second;
  }
};
// Fourier coefficients of log a(e^{it}) by the trapezoid rule on a grid of at
// least 4096 points, doubled until the coefficients move less than 1e-12.
// Requires winding number zero.
LogCoefficients log_coefficients(const Symbol& sym, int M);

struct SzegoConstant {
  double value = 0.0;   // exp(sum_{m=1}^M m c_m c_{-m})
  int M = 0;
  double tail_bound = 0.0;
};
SzegoConstant strong_szego_constant(const Symbol& sym, int M = 0);

// det (a_{j-i})_{i,j <= k}; escalates to extended precision when the double
// elimination cancels heavily.
LogSigned toeplitz_det(const Symbol& sym, int k);

struct ManyPathsRow {
  int k = 0;
  double log_det = 0.0;
  double rate = 0.0;         // log_det / k
  double normalized = 0.0;   // D_k e^{-k c_0}
};
struct ManyPathsReport {
  double c0 = 0.0;
  double szego_constant = 0.0;
  double ceiling = 0.0;      // log d_0, the parallel-bound ceiling
  std::vector<ManyPathsRow> rows;
};
ManyPathsReport many_paths_rate(Point z, Point h, int k_max);
ManyPathsReport many_paths_rate(const Symbol& sym, int k_max);

}  // namespace nipoly
