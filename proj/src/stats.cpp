#include "nipoly/stats.hpp"

#include <algorithm>
#include <cmath>

#include "nipoly/errors.hpp"

namespace nipoly {

double mean(const std::vector<double>& x) {
  if (x.empty()) throw DomainError("mean of empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double std_error(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

namespace {
double central_moment(const std::vector<double>& x, int p) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += std::pow(v - m, p);
  return s / static_cast<double>(x.size());
}
}  // namespace

double skewness(const std::vector<double>& x) {
  const double m2 = central_moment(x, 2);
  return central_moment(x, 3) / std::pow(m2, 1.5);
}

double excess_kurtosis(const std::vector<double>& x) {
  const double m2 = central_moment(x, 2);
  return central_moment(x, 4) / (m2 * m2) - 3.0;
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("correlation: size mismatch");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw DomainError("ks_statistic: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::fabs(i / nx - j / ny));
  }
  return d;
}

double empirical_quantile(std::vector<double> x, double q) {
  if (x.empty()) throw DomainError("empirical_quantile: empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - lo) * (x[hi] - x[lo]);
}

BatchMeans batch_means(const std::vector<double>& chain, int batches) {
  if (batches < 2 || chain.size() < static_cast<std::size_t>(2 * batches)) {
    throw DomainError("batch_means: chain too short");
  }
  const std::size_t len = chain.size() / batches;
  std::vector<double> means(batches);
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t t = 0; t < len; ++t) s += chain[b * len + t];
    means[b] = s / static_cast<double>(len);
  }
  BatchMeans r;
  r.batches = batches;
  r.mean = mean(means);
  r.std_error = std_error(means);
  const std::vector<double> used(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(len * batches));
  const double v = variance(used);
  r.tau_int = v > 0.0 ? variance(means) * static_cast<double>(len) / v : 1.0;
  return r;
}

}  // namespace nipoly
