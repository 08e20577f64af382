#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "nipoly/lattice.hpp"
#include "nipoly/special.hpp"

namespace nipoly {

// Stateless 64-bit finalizer (MurmurHash3 fmix64).
inline std::uint64_t fmix64(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

// Seed of replica r derived from a master seed; distinct replicas get
// unrelated fields.
inline std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t r) {
  return fmix64(seed ^ fmix64(r + 0x9e3779b97f4a7c15ULL));
}

// Deterministic map z -> U(z) in (0,1): a hash of (seed, z), so any site of
// any environment can be read in any order without storage.
struct UniformField {
  std::uint64_t seed = 0;

  double at(Point z) const {
    std::uint64_t h = fmix64(seed + 0x9e3779b97f4a7c15ULL);
    h = fmix64(h ^ static_cast<std::uint64_t>(z.x1) * 0xd6e8feb86659fd93ULL);
    h = fmix64(h ^ (static_cast<std::uint64_t>(z.x2) + 0x632be59bd9b4e019ULL));
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  }
};

inline double uniform_at(const UniformField& f, Point z) { return f.at(z); }

enum class WeightLaw { LogGamma, Exponential, Gaussian, Bernoulli, Constant };

// Law of the site log-weight omega(z), realized as a quantile transform of
// U(z) so every law and parameter is coupled through one uniform field.
class WeightSpec {
 public:
  // omega = log zeta with zeta inverse-gamma(mu).
  static WeightSpec log_gamma(double mu);
  static WeightSpec exponential();
  static WeightSpec gaussian();
  static WeightSpec bernoulli(double p);
  static WeightSpec constant(double c);

  WeightLaw law() const { return law_; }
  double param() const { return param_; }
  std::string name() const;

  double omega(double u) const;
  // nu = E[omega].
  double mean() const;
  // log E[exp(beta omega)]; +infinity when the moment diverges.
  double log_mgf(double beta) const;

 private:
  WeightSpec(WeightLaw law, double param);
  WeightLaw law_;
  double param_;
  std::shared_ptr<const InvGammaQuantileTable> table_;
};

inline double omega_at(const UniformField& f, const WeightSpec& spec, Point z) { return spec.omega(f.at(z)); }

// zeta_mu(z) for log-gamma specs, exp(omega) in general.
double weight_at(const UniformField& f, const WeightSpec& spec, Point z);

// e(z) = -log(1 - U(z)): the mu -> 0 limit of mu log zeta_mu(z) under the
// quantile coupling.
inline double coupled_exponential(const UniformField& f, Point z) { return -std::log1p(-f.at(z)); }

}  // namespace nipoly
