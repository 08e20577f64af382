#include "nipoly/eigen_jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "nipoly/errors.hpp"

namespace nipoly {

double HermitianMatrix::trace() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += (*this)(i, i).real();
  return s;
}

HermitianMatrix HermitianMatrix::minor(int k) const {
  if (k < 0 || k > n) throw DomainError("HermitianMatrix::minor: size out of range");
  HermitianMatrix m(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = (*this)(i, j);
  return m;
}

std::vector<double> jacobi_eigenvalues(RealMatrix m, const JacobiOptions& opt) {
  const int n = m.n;
  double total = 0.0;
  for (double v : m.a) total += v * v;
  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += 2.0 * m(i, j) * m(i, j);
    return s;
  };
  const double target = opt.threshold * opt.threshold * std::max(total, 1e-300);
  int sweep = 0;
  for (; sweep < opt.max_sweeps; ++sweep) {
    if (off_norm() <= target) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double app = m(p, p), aqq = m(q, q);
        // Skip rotations that would not change the diagonal at working precision.
        if (std::fabs(apq) < 1e-18 * (std::fabs(app) + std::fabs(aqq)) ) {
          m(p, q) = m(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        double* rp = &m.a[static_cast<std::size_t>(p) * n];
        double* rq = &m.a[static_cast<std::size_t>(q) * n];
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = rp[r], arq = rq[r];
          const double np = arp - s * (arq + tau * arp);
          const double nq = arq + s * (arp - tau * arq);
          rp[r] = np;
          rq[r] = nq;
          m(r, p) = np;
          m(r, q) = nq;
        }
        m(p, p) = app - t * apq;
        m(q, q) = aqq + t * apq;
        m(p, q) = m(q, p) = 0.0;
      }
    }
  }
  if (sweep == opt.max_sweeps && off_norm() > target)
    throw NumericError("jacobi_eigenvalues: no convergence within the sweep bound");
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = m(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

std::vector<double> hermitian_eigenvalues(const HermitianMatrix& h, const JacobiOptions& opt) {
  const int n = h.n;
  RealMatrix r(2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = h(i, j).real(), b = h(i, j).imag();
      r(i, j) = a;
      r(i + n, j + n) = a;
      r(i, j + n) = -b;
      r(i + n, j) = b;
    }
  }
  const auto doubled = jacobi_eigenvalues(std::move(r), opt);
  std::vector<double> ev;
  ev.reserve(static_cast<std::size_t>(n));
  // Sorted pairs: take every other entry, averaging the two copies.
  for (int i = 0; i < n; ++i)
    ev.push_back(0.5 * (doubled[static_cast<std::size_t>(2 * i)] + doubled[static_cast<std::size_t>(2 * i + 1)]));
  return ev;
}

}  // namespace nipoly
