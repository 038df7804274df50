#include "dosefind/beta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dosefind {

namespace {

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

void check_probability(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " +
                      std::to_string(x));
  }
}

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2).
double incbeta_cf(double x, double a, double b, double lbeta) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 2000;

  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta) / a;
  return front * h;
}

// I_x(a, b) for 0 < x < 1 with validated shapes and log B(a, b) supplied.
double cdf_raw(double x, double a, double b, double lbeta) {
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::clamp(incbeta_cf(x, a, b, lbeta), 0.0, 1.0);
  }
  return std::clamp(1.0 - incbeta_cf(1.0 - x, b, a, lbeta), 0.0, 1.0);
}

double pdf_raw(double x, double a, double b, double lbeta) {
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
                  lbeta);
}

// Safeguarded Newton on [lo, hi], which must bracket the root: keeps
// cdf(lo) <= u <= cdf(hi) and bisects whenever a Newton step leaves it.
double quantile_bracketed(double u, double a, double b, double lo, double hi,
                          double x) {
  const double lbeta = log_beta(a, b);
  for (int iter = 0; iter < 300; ++iter) {
    const double f = cdf_raw(x, a, b, lbeta) - u;
    if (f == 0.0) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double dens = pdf_raw(x, a, b, lbeta);
    double next = x - f / dens;
    if (!(dens > 0.0) || !std::isfinite(next) || next <= lo || next >= hi) {
      next = 0.5 * (lo + hi);
    }
    if (std::fabs(next - x) <= 1e-15 * std::max(1e-3, x) ||
        hi - lo <= 1e-17) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace

BetaParams BetaParams::posterior(int n, int m) {
  if (n < 0 || m < 0 || m > n) {
    throw DomainError("posterior requires 0 <= m <= n");
  }
  return {static_cast<double>(m) + 1.0, static_cast<double>(n - m) + 1.0};
}

void validate(const BetaParams& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) ||
      !std::isfinite(p.beta)) {
    throw DomainError("Beta shapes must be positive and finite");
  }
}

double beta_cdf(double x, const BetaParams& p) {
  validate(p);
  check_probability(x, "beta_cdf argument");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return cdf_raw(x, p.alpha, p.beta, log_beta(p.alpha, p.beta));
}

double beta_pdf(double x, const BetaParams& p) {
  validate(p);
  check_probability(x, "beta_pdf argument");
  const double a = p.alpha;
  const double b = p.beta;
  if (x == 0.0) {
    if (a < 1.0) return std::numeric_limits<double>::infinity();
    return a == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
  }
  if (x == 1.0) {
    if (b < 1.0) return std::numeric_limits<double>::infinity();
    return b == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
  }
  return pdf_raw(x, a, b, log_beta(a, b));
}

double beta_quantile(double u, const BetaParams& p) {
  validate(p);
  check_probability(u, "beta_quantile probability");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;

  const double x0 = std::clamp(p.alpha / (p.alpha + p.beta), 1e-12,
                               1.0 - 1e-12);
  return quantile_bracketed(u, p.alpha, p.beta, 0.0, 1.0, x0);
}

double beta_sample(const BetaParams& p, RngStream& rng) {
  validate(p);
  const double g1 = rng.gamma(p.alpha);
  const double g2 = rng.gamma(p.beta);
  return g1 / (g1 + g2);
}

double beta_sample_truncated(const BetaParams& p, double lo, double hi,
                             RngStream& rng) {
  validate(p);
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  if (!(lo < hi)) {
    throw DomainError("truncation interval is empty after clamping to [0, 1]");
  }
  // Work in whichever tail keeps the CDF values away from 1 so that the
  // difference F(hi) - F(lo) keeps its precision.
  const double mean = p.alpha / (p.alpha + p.beta);
  if (lo > mean) {
    const BetaParams mirrored{p.beta, p.alpha};
    return 1.0 - beta_sample_truncated(mirrored, 1.0 - hi, 1.0 - lo, rng);
  }
  const double f_lo = beta_cdf(lo, p);
  const double f_hi = beta_cdf(hi, p);
  if (!(f_hi > f_lo)) {
    throw DomainError("truncation interval carries no probability mass");
  }
  const double u = f_lo + rng.uniform() * (f_hi - f_lo);
  if (u <= f_lo) return lo;
  if (u >= f_hi) return hi;
  const double x = quantile_bracketed(u, p.alpha, p.beta, lo, hi,
                                      0.5 * (lo + hi));
  return std::clamp(x, lo, hi);
}

}  // namespace dosefind
