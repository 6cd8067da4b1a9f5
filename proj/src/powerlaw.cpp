#include "lhl/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace lhl {
namespace powerlaw {

double hurwitz_zeta(double s, double a) {
  if (s <= 1.0 || a <= 0.0) throw std::invalid_argument("hurwitz_zeta needs s > 1, a > 0");
  constexpr int kDirectTerms = 24;
  double sum = 0;
  for (int k = 0; k < kDirectTerms; ++k) sum += std::pow(a + k, -s);
  const double m = a + kDirectTerms;
  // Euler-Maclaurin tail with Bernoulli corrections through B6.
  sum += std::pow(m, 1.0 - s) / (s - 1.0);
  sum += 0.5 * std::pow(m, -s);
  sum += s * std::pow(m, -s - 1.0) / 12.0;
  sum -= s * (s + 1.0) * (s + 2.0) * std::pow(m, -s - 3.0) / 720.0;
  sum += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * std::pow(m, -s - 5.0) / 30240.0;
  return sum;
}

namespace {

struct TailStats {
  std::size_t n = 0;
  double sum_log = 0;
};

double powerlaw_loglik(double alpha, std::uint64_t xmin, const TailStats& tail) {
  return -static_cast<double>(tail.n) * std::log(hurwitz_zeta(alpha, static_cast<double>(xmin))) -
         alpha * tail.sum_log;
}

// Golden-section maximisation of the unimodal tail likelihood.
double mle_alpha(std::uint64_t xmin, const TailStats& tail, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = powerlaw_loglik(c, xmin, tail);
  double fd = powerlaw_loglik(d, xmin, tail);
  for (int it = 0; it < 80 && (b - a) > 1e-7; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = powerlaw_loglik(c, xmin, tail);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = powerlaw_loglik(d, xmin, tail);
    }
  }
  return (a + b) / 2;
}

// KS distance between the empirical tail CDF and the fitted discrete
// power-law CDF, evaluated at the tail's distinct values.
double ks_distance(double alpha, std::uint64_t xmin,
                   const std::map<std::uint64_t, std::uint64_t>& tail_counts, std::size_t n) {
  const double z_xmin = hurwitz_zeta(alpha, static_cast<double>(xmin));
  double worst = 0;
  std::uint64_t cum = 0;
  for (const auto& [x, count] : tail_counts) {
    cum += count;
    const double empirical = static_cast<double>(cum) / static_cast<double>(n);
    const double fitted = 1.0 - hurwitz_zeta(alpha, static_cast<double>(x) + 1.0) / z_xmin;
    worst = std::max(worst, std::abs(empirical - fitted));
  }
  return worst;
}

struct XminScan {
  double alpha = 0;
  std::uint64_t xmin = 1;
  double ks = 0;
  std::size_t tail_n = 0;
  bool found = false;
};

XminScan scan_xmin(const std::vector<std::uint64_t>& sorted, const FitOptions& opts) {
  XminScan best;
  std::map<std::uint64_t, std::uint64_t> counts;
  for (auto v : sorted) ++counts[v];

  for (auto it = counts.begin(); it != counts.end(); ++it) {
    const std::uint64_t xmin = it->first;
    std::map<std::uint64_t, std::uint64_t> tail_counts(it, counts.end());
    std::size_t n = 0;
    TailStats tail;
    for (const auto& [x, count] : tail_counts) {
      n += count;
      tail.sum_log += static_cast<double>(count) * std::log(static_cast<double>(x));
    }
    tail.n = n;
    if (n < opts.min_tail || tail_counts.size() < 2) continue;
    const double alpha = mle_alpha(xmin, tail, opts.alpha_lo, opts.alpha_hi);
    const double ks = ks_distance(alpha, xmin, tail_counts, n);
    if (!best.found || ks < best.ks) {
      best = XminScan{alpha, xmin, ks, n, true};
    }
  }
  return best;
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double lognormal_tail_loglik(double mu, double sigma,
                             const std::map<std::uint64_t, std::uint64_t>& tail_counts,
                             std::uint64_t xmin) {
  const double lower = std::log(static_cast<double>(xmin) - 0.5);
  const double tail_mass = 1.0 - norm_cdf((lower - mu) / sigma);
  if (tail_mass <= 0) return -1e300;
  double loglik = 0;
  for (const auto& [x, count] : tail_counts) {
    const double hi = (std::log(static_cast<double>(x) + 0.5) - mu) / sigma;
    const double lo = (std::log(static_cast<double>(x) - 0.5) - mu) / sigma;
    const double p = (norm_cdf(hi) - norm_cdf(lo)) / tail_mass;
    if (p <= 0) return -1e300;
    loglik += static_cast<double>(count) * std::log(p);
  }
  return loglik;
}

}  // namespace

LognormalFit fit_discrete_lognormal_tail(const std::vector<std::uint64_t>& tail,
                                         std::uint64_t xmin) {
  if (tail.empty()) throw std::invalid_argument("empty tail");
  std::map<std::uint64_t, std::uint64_t> counts;
  double mean = 0;
  for (auto v : tail) {
    ++counts[v];
    mean += std::log(static_cast<double>(v));
  }
  mean /= static_cast<double>(tail.size());
  double var = 0;
  for (auto v : tail) {
    const double d = std::log(static_cast<double>(v)) - mean;
    var += d * d;
  }
  var /= static_cast<double>(tail.size());
  const double sigma0 = std::max(0.2, std::sqrt(var));

  // Nelder-Mead on (mu, log sigma).
  auto objective = [&](double mu, double log_sigma) {
    return -lognormal_tail_loglik(mu, std::exp(log_sigma), counts, xmin);
  };
  struct Vertex {
    double mu, ls, f;
  };
  std::vector<Vertex> simplex = {
      {mean, std::log(sigma0), 0},
      {mean + 0.5, std::log(sigma0), 0},
      {mean, std::log(sigma0) + 0.5, 0},
  };
  for (auto& v : simplex) v.f = objective(v.mu, v.ls);
  for (int it = 0; it < 400; ++it) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    if (std::abs(simplex[2].f - simplex[0].f) < 1e-10) break;
    const double cmu = (simplex[0].mu + simplex[1].mu) / 2;
    const double cls = (simplex[0].ls + simplex[1].ls) / 2;
    Vertex refl{cmu + (cmu - simplex[2].mu), cls + (cls - simplex[2].ls), 0};
    refl.f = objective(refl.mu, refl.ls);
    if (refl.f < simplex[0].f) {
      Vertex exp_v{cmu + 2 * (cmu - simplex[2].mu), cls + 2 * (cls - simplex[2].ls), 0};
      exp_v.f = objective(exp_v.mu, exp_v.ls);
      simplex[2] = exp_v.f < refl.f ? exp_v : refl;
    } else if (refl.f < simplex[1].f) {
      simplex[2] = refl;
    } else {
      Vertex contr{cmu + 0.5 * (simplex[2].mu - cmu), cls + 0.5 * (simplex[2].ls - cls), 0};
      contr.f = objective(contr.mu, contr.ls);
      if (contr.f < simplex[2].f) {
        simplex[2] = contr;
      } else {
        for (int i = 1; i < 3; ++i) {
          simplex[i].mu = (simplex[i].mu + simplex[0].mu) / 2;
          simplex[i].ls = (simplex[i].ls + simplex[0].ls) / 2;
          simplex[i].f = objective(simplex[i].mu, simplex[i].ls);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(),
            [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  return LognormalFit{simplex[0].mu, std::exp(simplex[0].ls), -simplex[0].f};
}

std::vector<std::uint64_t> sample_discrete_powerlaw(double alpha, std::uint64_t xmin,
                                                    std::size_t n, std::mt19937_64& rng) {
  const double z = hurwitz_zeta(alpha, static_cast<double>(xmin));
  // CDF table up to the point where the tail mass is negligible.
  std::vector<double> cdf;
  double cum = 0;
  std::uint64_t x = xmin;
  while (cum < 1.0 - 1e-10 && cdf.size() < 2'000'000) {
    cum += std::pow(static_cast<double>(x), -alpha) / z;
    cdf.push_back(std::min(cum, 1.0));
    ++x;
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<std::uint64_t> sample;
  sample.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform(rng);
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) {
      // Far tail: continuous approximation.
      sample.push_back(static_cast<std::uint64_t>(
          std::floor((static_cast<double>(xmin) - 0.5) *
                         std::pow(1.0 - u, -1.0 / (alpha - 1.0)) +
                     0.5)));
    } else {
      sample.push_back(xmin + static_cast<std::uint64_t>(it - cdf.begin()));
    }
  }
  return sample;
}

PowerlawFit fit_powerlaw(const std::vector<std::uint64_t>& observations, FitOptions opts) {
  std::vector<std::uint64_t> data;
  data.reserve(observations.size());
  for (auto v : observations) {
    if (v >= 1) data.push_back(v);
  }
  if (data.size() < 10) throw std::invalid_argument("need at least 10 observations >= 1");
  std::sort(data.begin(), data.end());
  if (data.front() == data.back()) throw std::invalid_argument("degenerate constant sample");

  const XminScan scan = scan_xmin(data, opts);
  if (!scan.found) throw std::invalid_argument("no usable xmin candidate");

  PowerlawFit fit;
  fit.alpha = scan.alpha;
  fit.xmin = scan.xmin;
  fit.ks_distance = scan.ks;
  fit.tail_size = scan.tail_n;

  std::vector<std::uint64_t> tail;
  tail.reserve(scan.tail_n);
  for (auto v : data) {
    if (v >= scan.xmin) tail.push_back(v);
  }
  TailStats stats;
  stats.n = tail.size();
  for (auto v : tail) stats.sum_log += std::log(static_cast<double>(v));
  const double pl_loglik = powerlaw_loglik(fit.alpha, fit.xmin, stats);
  const LognormalFit ln = fit_discrete_lognormal_tail(tail, fit.xmin);
  fit.loglik_ratio_vs_lognormal = pl_loglik - ln.loglik;

  if (opts.bootstrap_replicates > 0) {
    std::mt19937_64 rng(opts.seed);
    std::vector<std::uint64_t> body;
    for (auto v : data) {
      if (v < scan.xmin) body.push_back(v);
    }
    const double tail_fraction = static_cast<double>(tail.size()) / static_cast<double>(data.size());
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> body_pick(0, body.empty() ? 0 : body.size() - 1);
    int exceed = 0;
    for (int rep = 0; rep < opts.bootstrap_replicates; ++rep) {
      std::vector<std::uint64_t> replicate;
      replicate.reserve(data.size());
      std::size_t tail_draws = 0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (body.empty() || uniform(rng) < tail_fraction) {
          ++tail_draws;
        } else {
          replicate.push_back(body[body_pick(rng)]);
        }
      }
      auto tail_sample = sample_discrete_powerlaw(fit.alpha, fit.xmin, tail_draws, rng);
      replicate.insert(replicate.end(), tail_sample.begin(), tail_sample.end());
      std::sort(replicate.begin(), replicate.end());
      if (replicate.front() == replicate.back()) continue;
      const XminScan rep_scan = scan_xmin(replicate, opts);
      if (rep_scan.found && rep_scan.ks >= fit.ks_distance) ++exceed;
    }
    fit.p_value_proxy =
        static_cast<double>(exceed) / static_cast<double>(opts.bootstrap_replicates);
  }
  return fit;
}

}  // namespace powerlaw
}  // namespace lhl
