#include "nipoly/szego.hpp"

#include <algorithm>
#include <cmath>

#include "nipoly/errors.hpp"
#include "nipoly/special.hpp"

namespace nipoly {

std::complex<double> Symbol::eval(double t) const {
  std::complex<double> s{0.0, 0.0};
  for (const auto& [m, d] : coeffs) s += d * std::polar(1.0, m * t);
  return s;
}

double Symbol::wiener_norm() const {
  double s = 0.0;
  for (const auto& [m, d] : coeffs) s += std::fabs(d);
  return s;
}

Symbol Symbol::reflected() const {
  Symbol r;
  for (const auto& [m, d] : coeffs) r.coeffs[-m] = d;
  return r;
}

Symbol symbol_from_geometry(Point z, Point h) {
  if (!(h.x1 < 0 && 0 < h.x2)) throw DomainError("symbol_from_geometry: need h1 < 0 < h2");
  // Nonzero terms need 0 <= z1 + m h1 and 0 <= z2 + m h2.
  const std::int64_t lo = -(z.x2 / h.x2) - 1;
  const std::int64_t hi = z.x1 / (-h.x1) + 1;
  Symbol s;
  for (std::int64_t m = lo; m <= hi; ++m) {
    const std::int64_t a = z.x1 + m * h.x1;
    const std::int64_t b = z.x2 + m * h.x2;
    if (a < 0 || b < 0) continue;
    const LogSigned d = log_binomial(a + b, a);
    if (!d.is_zero()) s.coeffs[static_cast<int>(m)] = std::round(d.to_double());
  }
  return s;
}

KPoint directed_stack(Point x, Point h, int k) {
  if (k < 1) throw DomainError("directed_stack: k must be positive");
  std::vector<Point> p;
  for (int i = 0; i < k; ++i) p.push_back(x + static_cast<std::int64_t>(i) * h);
  return KPoint(std::move(p));
}

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Values of a on K equispaced points plus the unwrapped phase. Throws on a
// near-zero or when consecutive phase steps exceed pi/2 (grid too coarse).
struct CircleSample {
  std::vector<double> logabs;
  std::vector<double> phase;   // continuous, phase[0] in (-pi, pi]
  bool coarse = false;
};

CircleSample sample_circle(const Symbol& sym, int K) {
  CircleSample cs;
  cs.logabs.resize(K);
  cs.phase.resize(K + 1);
  const double floor_abs = 1e-12 * std::max(1.0, sym.wiener_norm());
  double prev = 0.0;
  for (int k = 0; k <= K; ++k) {
    const std::complex<double> a = sym.eval(kTwoPi * k / K);
    if (std::abs(a) < floor_abs) throw DomainError("winding_number: symbol vanishes on the unit circle");
    const double arg = std::arg(a);
    if (k == 0) {
      cs.phase[0] = arg;
    } else {
      double step = arg - prev;
      step -= kTwoPi * std::round(step / kTwoPi);
      if (std::fabs(step) >= 0.5 * kPi) cs.coarse = true;
      cs.phase[k] = cs.phase[k - 1] + step;
    }
    prev = arg;
    if (k < K) cs.logabs[k] = std::log(std::abs(a));
  }
  return cs;
}

CircleSample fine_sample(const Symbol& sym, int K) {
  for (;; K *= 2) {
    CircleSample cs = sample_circle(sym, K);
    if (!cs.coarse) return cs;
    if (K > (1 << 24)) throw NumericError("winding_number: phase does not resolve");
  }
}

int winding_of(const CircleSample& cs) {
  return static_cast<int>(std::lround((cs.phase.back() - cs.phase.front()) / kTwoPi));
}

}  // namespace

int winding_number(const Symbol& sym) {
  if (sym.coeffs.empty()) throw DomainError("winding_number: zero symbol");
  return winding_of(fine_sample(sym, 4096));
}

LogCoefficients log_coefficients(const Symbol& sym, int M) {
  if (M < 0) throw DomainError("log_coefficients: M must be non-negative");
  int K = 4096;
  while (K < 8 * (M + 1)) K *= 2;
  std::map<int, double> prev;
  for (;; K *= 2) {
    const CircleSample cs = fine_sample(sym, K);
    if (winding_of(cs) != 0) throw DomainError("log_coefficients: winding number is not zero");
    const int n = static_cast<int>(cs.logabs.size());
    // The imaginary part of log a is the unwrapped phase; for real
    // coefficients it is odd and contributes to the real part of c_m as
    // sin terms.
    std::map<int, double> c;
    for (int m = -M; m <= M; ++m) {
      double re = 0.0;
      for (int k = 0; k < n; ++k) {
        const double t = kTwoPi * k / n;
        // Re[(L + i P) e^{-imt}] = L cos(mt) + P sin(mt).
        re += cs.logabs[k] * std::cos(m * t) + cs.phase[k] * std::sin(m * t);
      }
      c[m] = re / n;
    }
    double change = prev.empty() ? 1.0 : 0.0;
    for (const auto& [m, v] : c) {
      if (!prev.empty()) change = std::max(change, std::fabs(v - prev[m]));
    }
    prev = c;
    if (change < 1e-12 || K >= (1 << 20)) {
      LogCoefficients out;
      out.c = std::move(c);
      out.grid = n;
      out.stability = change;
      return out;
    }
  }
}

SzegoConstant strong_szego_constant(const Symbol& sym, int M) {
  int m_try = M > 0 ? M : 32;
  for (;;) {
    const LogCoefficients lc = log_coefficients(sym, m_try);
    double s = 0.0;
    for (int m = 1; m <= m_try; ++m) s += m * lc.at(m) * lc.at(-m);
    // Geometric tail estimate from the last two terms.
    const double t1 = std::fabs((m_try - 1) * lc.at(m_try - 1) * lc.at(1 - m_try));
    const double t2 = std::fabs(m_try * lc.at(m_try) * lc.at(-m_try));
    double tail = t2;
    if (t1 > 0.0 && t2 < t1) tail = t2 * (t2 / t1) / (1.0 - t2 / t1);
    if (M > 0 || tail < 1e-10 || m_try >= 1024) return {std::exp(s), m_try, tail};
    m_try *= 2;
  }
}

LogSigned toeplitz_det(const Symbol& sym, int k) {
  if (k < 1) throw DomainError("toeplitz_det: k must be positive");
  LogMatrix a(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = LogSigned::from_double(sym.coeff(j - i));
  const LogDet d = logdet_checked(a);
  if (d.cancellation_nats > kDeterminantEscalationNats) return logdet_extended(a).value;
  return d.value;
}

ManyPathsReport many_paths_rate(const Symbol& sym, int k_max) {
  if (k_max < 1) throw DomainError("many_paths_rate: k_max must be positive");
  ManyPathsReport r;
  r.c0 = log_coefficients(sym, 0).at(0);
  r.szego_constant = strong_szego_constant(sym).value;
  r.ceiling = std::log(sym.coeff(0));
  for (int k = 1; k <= k_max; ++k) {
    const LogSigned d = toeplitz_det(sym, k);
    if (d.sign() <= 0) throw PrecisionError("many_paths_rate: non-positive Toeplitz determinant");
    ManyPathsRow row;
    row.k = k;
    row.log_det = d.logmag();
    row.rate = row.log_det / k;
    row.normalized = std::exp(row.log_det - k * r.c0);
    r.rows.push_back(row);
  }
  return r;
}

ManyPathsReport many_paths_rate(Point z, Point h, int k_max) {
  return many_paths_rate(symbol_from_geometry(z, h), k_max);
}

}  // namespace nipoly
