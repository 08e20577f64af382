#include "nipoly/environment.hpp"

#include <cmath>
#include <limits>

#include "nipoly/errors.hpp"

namespace nipoly {

WeightSpec::WeightSpec(WeightLaw law, double param) : law_(law), param_(param) {}

WeightSpec WeightSpec::log_gamma(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("LogGamma: mu must be positive");
  WeightSpec s(WeightLaw::LogGamma, mu);
  s.table_ = std::make_shared<const InvGammaQuantileTable>(mu);
  return s;
}

WeightSpec WeightSpec::exponential() { return WeightSpec(WeightLaw::Exponential, 1.0); }
WeightSpec WeightSpec::gaussian() { return WeightSpec(WeightLaw::Gaussian, 0.0); }

WeightSpec WeightSpec::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("Bernoulli: p must lie in [0,1]");
  return WeightSpec(WeightLaw::Bernoulli, p);
}

WeightSpec WeightSpec::constant(double c) {
  if (!std::isfinite(c)) throw DomainError("Constant: value must be finite");
  return WeightSpec(WeightLaw::Constant, c);
}

std::string WeightSpec::name() const {
  switch (law_) {
    case WeightLaw::LogGamma: return "loggamma";
    case WeightLaw::Exponential: return "exponential";
    case WeightLaw::Gaussian: return "gaussian";
    case WeightLaw::Bernoulli: return "bernoulli";
    case WeightLaw::Constant: return "constant";
  }
  return "unknown";
}

double WeightSpec::omega(double u) const {
  switch (law_) {
    case WeightLaw::LogGamma: return table_->log_quantile(u);
    case WeightLaw::Exponential: return -std::log1p(-u);
    case WeightLaw::Gaussian: return normal_quantile(u);
    case WeightLaw::Bernoulli: return u < param_ ? 1.0 : 0.0;
    case WeightLaw::Constant: return param_;
  }
  return 0.0;
}

double WeightSpec::mean() const {
  switch (law_) {
    case WeightLaw::LogGamma: return -digamma(param_);
    case WeightLaw::Exponential: return 1.0;
    case WeightLaw::Gaussian: return 0.0;
    case WeightLaw::Bernoulli: return param_;
    case WeightLaw::Constant: return param_;
  }
  return 0.0;
}

double WeightSpec::log_mgf(double beta) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (law_) {
    case WeightLaw::LogGamma:
      // E[zeta^beta] = Gamma(mu - beta) / Gamma(mu).
      if (beta >= param_) return inf;
      if (beta == 0.0) return 0.0;
      return nipoly::log_gamma(param_ - beta) - nipoly::log_gamma(param_);
    case WeightLaw::Exponential:
      if (beta >= 1.0) return inf;
      return -std::log1p(-beta);
    case WeightLaw::Gaussian: return 0.5 * beta * beta;
    case WeightLaw::Bernoulli: return std::log1p(param_ * std::expm1(beta));
    case WeightLaw::Constant: return beta * param_;
  }
  return 0.0;
}

double weight_at(const UniformField& f, const WeightSpec& spec, Point z) { return std::exp(omega_at(f, spec, z)); }

}  // namespace nipoly
