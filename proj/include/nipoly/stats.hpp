#pragma once

#include <functional>
#include <vector>

namespace nipoly {

double mean(const std::vector<double>& x);
// Unbiased sample variance.
double variance(const std::vector<double>& x);
// Standard error of the mean for independent samples.
double std_error(const std::vector<double>& x);
double skewness(const std::vector<double>& x);
double excess_kurtosis(const std::vector<double>& x);
double correlation(const std::vector<double>& x, const std::vector<double>& y);

// sup |F_n - F| against a continuous CDF.
double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf);
// sup |F_n - G_m| between two samples.
double ks_two_sample(std::vector<double> x, std::vector<double> y);

// Empirical quantile with linear interpolation, q in [0,1].
double empirical_quantile(std::vector<double> x, double q);

struct BatchMeans {
  double mean = 0.0;
  double std_error = 0.0;
  // Integrated autocorrelation time estimated as batch variance ratio.
  double tau_int = 1.0;
  int batches = 0;
};
// Standard error of a correlated chain from non-overlapping batch means.
BatchMeans batch_means(const std::vector<double>& chain, int batches = 50);

}  // namespace nipoly
