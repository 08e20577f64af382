#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace nipoly {

// A real number stored as sign * exp(logmag). Partition functions and
// determinants routinely overflow double, so all of them live here.
class LogSigned {
 public:
  constexpr LogSigned() = default;

  static LogSigned zero() { return LogSigned(); }
  static LogSigned one() { return from_log(0.0); }
  static LogSigned from_log(double logmag, int sign = 1) {
    LogSigned r;
    if (sign == 0 || logmag == -std::numeric_limits<double>::infinity()) return r;
    r.sign_ = sign > 0 ? 1 : -1;
    r.logmag_ = logmag;
    return r;
  }
  static LogSigned from_double(double x) {
    if (x == 0.0) return zero();
    return from_log(std::log(std::fabs(x)), x > 0 ? 1 : -1);
  }

  int sign() const { return sign_; }
  // Natural log of |x|; -inf for zero.
  double logmag() const {
    return sign_ == 0 ? -std::numeric_limits<double>::infinity() : logmag_;
  }
  bool is_zero() const { return sign_ == 0; }
  double to_double() const { return sign_ == 0 ? 0.0 : sign_ * std::exp(logmag_); }

  LogSigned operator-() const {
    LogSigned r = *this;
    r.sign_ = -r.sign_;
    return r;
  }
  LogSigned& operator*=(const LogSigned& o) {
    if (sign_ == 0 || o.sign_ == 0) return *this = zero();
    sign_ *= o.sign_;
    logmag_ += o.logmag_;
    return *this;
  }
  LogSigned& operator/=(const LogSigned& o);
  LogSigned& operator+=(const LogSigned& o);
  LogSigned& operator-=(const LogSigned& o) { return *this += -o; }

  friend LogSigned operator*(LogSigned a, const LogSigned& b) { return a *= b; }
  friend LogSigned operator/(LogSigned a, const LogSigned& b) { return a /= b; }
  friend LogSigned operator+(LogSigned a, const LogSigned& b) { return a += b; }
  friend LogSigned operator-(LogSigned a, const LogSigned& b) { return a -= b; }

 private:
  int sign_ = 0;
  double logmag_ = 0.0;
};

// Nats of cancellation beyond which a signed sum is flagged.
inline constexpr double kCancellationLimitNats = 30.0;
// Hadamard gap above which determinants are redone in extended precision;
// double elimination loses about exp(gap) ulps.
inline constexpr double kDeterminantEscalationNats = 12.0;

struct CheckedSum {
  LogSigned value;
  // max(logmag a, logmag b) - logmag(result); 0 for same-sign sums.
  double cancellation_nats = 0.0;
  bool precision_loss = false;
};

LogSigned logsum(const LogSigned& a, const LogSigned& b);
CheckedSum logsum_checked(const LogSigned& a, const LogSigned& b);

// log(exp(a) + exp(b)) for plain log-magnitudes.
inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

// Row-major square matrix of LogSigned entries.
class LogMatrix {
 public:
  LogMatrix() = default;
  explicit LogMatrix(std::size_t n) : n_(n), data_(n * n) {}

  std::size_t size() const { return n_; }
  LogSigned& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const LogSigned& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<LogSigned> data_;
};

struct LogDet {
  LogSigned value;
  // log Hadamard bound minus log|det|: how far below the row-norm product the
  // determinant sits. Large values mean the elimination cancelled heavily.
  double cancellation_nats = 0.0;
};

// Partially pivoted elimination carried out entirely in LogSigned.
// The empty matrix has determinant one.
LogSigned logdet(const LogMatrix& m);
LogDet logdet_checked(const LogMatrix& m);

// Same determinant with ~50 significant digits; used when the double path
// reports too much cancellation.
LogDet logdet_extended(const LogMatrix& m);

}  // namespace nipoly
