#include "nipoly/quadrature.hpp"

#include <array>
#include <cmath>

namespace nipoly {
namespace {

constexpr std::array<double, 8> kXk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                       0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double value;
  double error;
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWk[7];
  double gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXk[i];
    const double s = f(c - dx) + f(c + dx);
    kron += kWk[i] * s;
    if (i % 2 == 1) gauss += kWg[i / 2] * s;
  }
  return {kron * h, std::fabs((kron - gauss) * h)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
             int depth, const Piece& whole) {
  const double m = 0.5 * (a + b);
  const Piece left = gk15(f, a, m);
  const Piece right = gk15(f, m, b);
  const double value = left.value + right.value;
  const double err = left.error + right.error;
  if (depth <= 0 || err <= std::max(abs_tol, rel_tol * std::fabs(value)) ||
      std::fabs(value - whole.value) < 1e-15 * std::fabs(value)) {
    return value;
  }
  return adapt(f, a, m, 0.5 * abs_tol, rel_tol, depth - 1, left) +
         adapt(f, m, b, 0.5 * abs_tol, rel_tol, depth - 1, right);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                 int max_depth) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, abs_tol, rel_tol, max_depth);
  const bool inf_a = std::isinf(a);
  const bool inf_b = std::isinf(b);
  if (inf_a || inf_b) {
    // x = t/(1-t^2), dx = (1+t^2)/(1-t^2)^2 dt.
    auto g = [&](double t) {
      const double d = 1.0 - t * t;
      if (d <= 0.0) return 0.0;
      const double v = f(t / d) * (1.0 + t * t) / (d * d);
      return std::isfinite(v) ? v : 0.0;
    };
    auto tmap = [](double x) {
      if (std::isinf(x)) return x > 0 ? 1.0 : -1.0;
      if (x == 0.0) return 0.0;
      return (std::sqrt(1.0 + 4.0 * x * x) - 1.0) / (2.0 * x);
    };
    const double ta = tmap(a);
    const double tb = tmap(b);
    return integrate(g, ta, tb, abs_tol, rel_tol, max_depth);
  }
  const Piece whole = gk15(f, a, b);
  return adapt(f, a, b, abs_tol, rel_tol, max_depth, whole);
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < 400 && (b - a) > tol * (1.0 + std::fabs(a) + std::fabs(b)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double bisect(const std::function<double(double)>& f, double a, double b, double tol, int max_iter) {
  double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw NumericError("bisect: root not bracketed");
  for (int i = 0; i < max_iter; ++i) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b || (b - a) < tol * (1.0 + std::fabs(m))) return m;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace nipoly
