#pragma once

#include <stdexcept>

#include "dosefind/rng.hpp"

namespace dosefind {

/// Thrown for arguments outside a function's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Shapes of a Beta distribution. Posterior after m DLTs in n patients under
/// a Beta(1,1) prior is Beta(m + 1, n - m + 1).
struct BetaParams {
  double alpha;
  double beta;

  static BetaParams posterior(int n, int m);
};

/// Throws DomainError unless both shapes are positive and finite.
void validate(const BetaParams& p);

/// Regularized incomplete beta I_x(alpha, beta) = Pr(P <= x).
double beta_cdf(double x, const BetaParams& p);

/// Density of Beta(alpha, beta) at x.
double beta_pdf(double x, const BetaParams& p);

/// Inverse of beta_cdf: the x in [0, 1] with beta_cdf(x) = u.
double beta_quantile(double u, const BetaParams& p);

/// One Beta(alpha, beta) draw, as G1 / (G1 + G2) with independent gammas.
double beta_sample(const BetaParams& p, RngStream& rng);

/// Beta(alpha, beta) draw conditioned on [lo, hi] (clamped to [0, 1]),
/// by inverse CDF over the truncated probability range. Throws DomainError
/// when the clamped interval is empty or carries no posterior mass.
double beta_sample_truncated(const BetaParams& p, double lo, double hi,
                             RngStream& rng);

}  // namespace dosefind
