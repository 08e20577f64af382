#include "nipoly/log_signed.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <utility>

#include "nipoly/errors.hpp"

namespace nipoly {

LogSigned& LogSigned::operator/=(const LogSigned& o) {
  if (o.sign_ == 0) throw DomainError("LogSigned: division by zero");
  if (sign_ == 0) return *this;
  sign_ *= o.sign_;
  logmag_ -= o.logmag_;
  return *this;
}

LogSigned& LogSigned::operator+=(const LogSigned& o) {
  *this = logsum_checked(*this, o).value;
  return *this;
}

CheckedSum logsum_checked(const LogSigned& a, const LogSigned& b) {
  if (b.is_zero()) return {a, 0.0, false};
  if (a.is_zero()) return {b, 0.0, false};
  const LogSigned& big = a.logmag() >= b.logmag() ? a : b;
  const LogSigned& small = a.logmag() >= b.logmag() ? b : a;
  const double d = small.logmag() - big.logmag();  // <= 0
  if (a.sign() == b.sign()) {
    return {LogSigned::from_log(big.logmag() + std::log1p(std::exp(d)), big.sign()), 0.0, false};
  }
  if (d == 0.0) {
    return {LogSigned::zero(), std::numeric_limits<double>::infinity(), true};
  }
  const double mag = big.logmag() + std::log(-std::expm1(d));
  const double lost = big.logmag() - mag;
  return {LogSigned::from_log(mag, big.sign()), lost, lost > kCancellationLimitNats};
}

LogSigned logsum(const LogSigned& a, const LogSigned& b) { return logsum_checked(a, b).value; }

namespace {

double log_hadamard_bound(const LogMatrix& m) {
  const std::size_t n = m.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) row_max = std::max(row_max, m(i, j).logmag());
    if (row_max == -std::numeric_limits<double>::infinity()) return row_max;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!m(i, j).is_zero()) s += std::exp(2.0 * (m(i, j).logmag() - row_max));
    }
    total += row_max + 0.5 * std::log(s);
  }
  return total;
}

}  // namespace

LogDet logdet_checked(const LogMatrix& input) {
  const std::size_t n = input.size();
  if (n == 0) return {LogSigned::one(), 0.0};
  LogMatrix a = input;
  int sign = 1;
  LogSigned det = LogSigned::one();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k).logmag() > a(piv, k).logmag()) piv = i;
    }
    if (a(piv, k).is_zero()) return {LogSigned::zero(), std::numeric_limits<double>::infinity()};
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      sign = -sign;
    }
    const LogSigned pivot = a(k, k);
    det *= pivot;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k).is_zero()) continue;
      const LogSigned factor = a(i, k) / pivot;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= factor * a(k, j);
    }
  }
  if (sign < 0) det = -det;
  const double bound = log_hadamard_bound(input);
  return {det, det.is_zero() ? std::numeric_limits<double>::infinity() : bound - det.logmag()};
}

LogSigned logdet(const LogMatrix& m) { return logdet_checked(m).value; }

LogDet logdet_extended(const LogMatrix& input) {
  using Real = boost::multiprecision::cpp_bin_float_50;
  const std::size_t n = input.size();
  if (n == 0) return {LogSigned::one(), 0.0};
  // Rescale each row by its largest magnitude so entries are O(1).
  std::vector<Real> a(n * n);
  double row_scale_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) row_max = std::max(row_max, input(i, j).logmag());
    if (row_max == -std::numeric_limits<double>::infinity()) {
      return {LogSigned::zero(), std::numeric_limits<double>::infinity()};
    }
    row_scale_total += row_max;
    for (std::size_t j = 0; j < n; ++j) {
      const LogSigned& e = input(i, j);
      a[i * n + j] = e.is_zero() ? Real(0) : Real(e.sign()) * exp(Real(e.logmag() - row_max));
    }
  }
  int sign = 1;
  Real logabs = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (abs(a[i * n + k]) > abs(a[piv * n + k])) piv = i;
    }
    if (a[piv * n + k] == 0) return {LogSigned::zero(), std::numeric_limits<double>::infinity()};
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      sign = -sign;
    }
    const Real pivot = a[k * n + k];
    if (pivot < 0) sign = -sign;
    logabs += log(abs(pivot));
    for (std::size_t i = k + 1; i < n; ++i) {
      const Real factor = a[i * n + k] / pivot;
      if (factor == 0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= factor * a[k * n + j];
    }
  }
  const double logmag = row_scale_total + static_cast<double>(logabs);
  const LogSigned det = LogSigned::from_log(logmag, sign);
  return {det, log_hadamard_bound(input) - logmag};
}

}  // namespace nipoly
