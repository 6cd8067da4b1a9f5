// Discrete power-law fitting in the Clauset-Shalizi-Newman style: maximum
// likelihood for the exponent, lower cutoff chosen by minimal KS distance,
// a likelihood-ratio comparison against a discretised lognormal on the same
// tail, and a bootstrap goodness-of-fit fraction.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lhl {
namespace powerlaw {

struct PowerlawFit {
  double alpha = 0;                      // scaling exponent, > 1
  std::uint64_t xmin = 1;                // lower cutoff
  double ks_distance = 0;                // KS distance of the chosen fit
  double loglik_ratio_vs_lognormal = 0;  // positive favours the power law
  double p_value_proxy = 0;              // bootstrap fraction with KS >= observed
  std::size_t tail_size = 0;             // observations >= xmin
};

struct FitOptions {
  int bootstrap_replicates = 100;  // 0 disables the bootstrap
  std::uint64_t seed = 1;
  double alpha_lo = 1.01;
  double alpha_hi = 8.0;
  std::size_t min_tail = 10;  // smallest tail considered for an xmin candidate
};

// Throws std::invalid_argument for fewer than 10 usable observations or a
// degenerate (constant) sample.
PowerlawFit fit_powerlaw(const std::vector<std::uint64_t>& observations, FitOptions opts = {});

// zeta(s, a) for s > 1, a > 0 (Euler-Maclaurin).
double hurwitz_zeta(double s, double a);

// Exact inverse-CDF sampling of the discrete power law p(x) ~ x^-alpha,
// x >= xmin.
std::vector<std::uint64_t> sample_discrete_powerlaw(double alpha, std::uint64_t xmin,
                                                    std::size_t n, std::mt19937_64& rng);

struct LognormalFit {
  double mu = 0;
  double sigma = 1;
  double loglik = 0;
};

// Discretised lognormal fitted to the tail {x : x >= xmin} by Nelder-Mead.
LognormalFit fit_discrete_lognormal_tail(const std::vector<std::uint64_t>& tail,
                                         std::uint64_t xmin);

}  // namespace powerlaw
}  // namespace lhl
