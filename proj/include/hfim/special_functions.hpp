#ifndef HFIM_SPECIAL_FUNCTIONS_HPP
#define HFIM_SPECIAL_FUNCTIONS_HPP

#include "hfim/fractional.hpp"

namespace hfim {

// Value together with an a-posteriori error estimate. The estimate combines
// truncation (rel_tol * |value|) with roundoff amplified by cancellation
// (largest term magnitude times the accumulation epsilon, with a safety
// factor calibrated against extended-precision references).
struct Eval {
  double value = 0.0;
  double error = 0.0;
};

// Gamma function for positive arguments. Relative error ~1e-15 on
// [1e-3, 171.6] (libm implementation). Errors: domain for x <= 0,
// overflow for x > 171.62.
double gamma_fn(double x);

// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta)
// for alpha in (0, 2], beta > 0 and real z with |z| <= 50.
//
// The power series is summed in extended precision with the two-consecutive-
// small-terms stopping rule. When cancellation would leave less than the
// requested accuracy (alternating series, z << 0) the evaluation switches to
// the spectral integral representation
//   E_{alpha,beta}(z) = int_0^inf K(chi) dchi,   z < 0, 0 < alpha < 1,
//   K(chi) = chi^{(1-beta)/alpha} e^{-chi^{1/alpha}} / (alpha pi)
//            * [chi sin(pi(1-beta)) - z sin(pi(1-beta+alpha))]
//            / [chi^2 - 2 chi z cos(alpha pi) + z^2],
// which is smooth and pole-free on the negative real axis. If neither route
// reaches the requested accuracy the call fails rather than return digits it
// does not have.
Eval mittag_leffler(double alpha, double beta, double z,
                    const SeriesControl& ctl = {});

// One-sided stable series
//   w_mu(theta) = (1/pi) sum_{n>=1} (-1)^{n-1} theta^{-n mu - 1}
//                 Gamma(n mu + 1)/n! sin(n pi mu),   theta > 0.
// Converges for every theta > 0 but loses digits as theta -> 0; the
// documented reliable region is theta >= 0.05. The returned error estimate
// is honest either way.
Eval wright_series(double mu, double theta, const SeriesControl& ctl = {});

// Probability density xi_mu on (0, inf):
//   xi_mu(theta) = (1/mu) theta^{-1-1/mu} w_mu(theta^{-1/mu}).
// Evaluated through whichever of two equivalent series carries the smaller
// roundoff at the given theta: the composition above, or the ascending form
//   xi_mu(theta) = (1/pi) sum_{m>=1} (-theta)^{m-1}/(m-1)! Gamma(mu m) sin(pi mu m),
// obtained from the reflection formula. The ascending form is exact near 0
// (xi_mu(0+) = 1/Gamma(1-mu)), the composition takes over in the tail.
Eval xi_density(double mu, double theta, const SeriesControl& ctl = {});

// Moments int_0^inf theta^k xi_mu(theta) dtheta for k <= 4, by adaptive
// panel quadrature of xi_density plus an analytic (Chernoff-type) tail
// bound folded into the error estimate.
Eval density_moment(double mu, int k, const SeriesControl& ctl = {});

namespace detail {

// Series-only Mittag-Leffler evaluation (no integral fallback); returns the
// partial sum even when the estimate is poor, so callers can dispatch.
// converged=false means the term cap was reached first.
struct SeriesEval {
  double value = 0.0;
  double error = 0.0;
  int terms = 0;
  bool converged = false;
};
SeriesEval ml_series(double alpha, double beta, double z, const SeriesControl& ctl);

// Spectral-integral evaluation for z < 0, 0 < alpha < 1.
Eval ml_negative_integral(double alpha, double beta, double z);

// Upper bound for int_cut^inf theta^k xi_mu(theta) dtheta, k in {0,1,...}:
// minimises e^{-s*cut} * sum_j s^j (j+k)!/(j! Gamma(mu(j+k)+1)) over s.
double xi_tail_bound(double mu, double cut, int k);

// Laplace transforms of the density by direct quadrature:
//   weighted=false:  int_0^inf xi_mu(theta) e^{-z theta} dtheta
//   weighted=true:   int_0^inf mu theta xi_mu(theta) e^{-z theta} dtheta
// These equal E_{mu,1}(-z) and E_{mu,mu}(-z); the quadrature route is kept
// independent of the Mittag-Leffler series so the two can cross-check.
Eval xi_laplace(double mu, double z, bool weighted, const SeriesControl& ctl = {});

} // namespace detail

} // namespace hfim

#endif
