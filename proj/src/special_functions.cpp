#include "hfim/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace hfim {

namespace {

constexpr double kMlRange = 50.0;       // documented |z| range for the series form
constexpr long double kEpsL = 5.42e-20; // ulp of the 64-bit long double mantissa
constexpr double kEstSafety = 64.0;     // calibrated against extended-precision runs

// Kahan-compensated accumulator in long double.
struct Accum {
  long double sum = 0.0L;
  long double comp = 0.0L;
  long double max_term = 0.0L;

  void add(long double t) {
    long double y = t - comp;
    long double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    max_term = std::max(max_term, fabsl(t));
  }
  double roundoff() const {
    return static_cast<double>(max_term * kEpsL) * kEstSafety;
  }
};

std::string fmt(const char* head, double a, double b, double c) {
  std::ostringstream os;
  os << head << " (args " << a << ", " << b << ", " << c << ")";
  return os.str();
}

} // namespace

const char* errc_name(errc c) {
  switch (c) {
    case errc::domain_error: return "domain_error";
    case errc::overflow: return "overflow";
    case errc::non_convergence: return "non_convergence";
    case errc::precision_loss: return "precision_loss";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::invalid_argument: return "invalid_argument";
    case errc::quadrature_failure: return "quadrature_failure";
    case errc::backend_disagreement: return "backend_disagreement";
    case errc::parse_error: return "parse_error";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

double gamma_fn(double x) {
  if (!(x > 0.0))
    raise(errc::domain_error, "gamma_fn: argument must be positive");
  if (x > 171.62)
    raise(errc::overflow, "gamma_fn: Gamma(x) overflows double for x > 171.62");
  return std::tgamma(x);
}

namespace detail {

SeriesEval ml_series(double alpha, double beta, double z, const SeriesControl& ctl) {
  SeriesEval out;
  Accum acc;
  int consecutive_small = 0;
  const long double lz = (z == 0.0) ? 0.0L : logl(fabsl(static_cast<long double>(z)));
  for (int k = 0; k < ctl.max_terms; ++k) {
    if (z == 0.0 && k > 0) {
      out.converged = true;
      break;
    }
    long double lt = (k == 0) ? -lgammal(static_cast<long double>(beta))
                              : k * lz - lgammal(static_cast<long double>(alpha) * k + beta);
    if (lt > 700.0L) {
      // term exceeds double range; the guard below reports the loss
      acc.max_term = std::numeric_limits<long double>::infinity();
      out.terms = k;
      break;
    }
    long double term = expl(lt);
    if (z < 0.0 && (k & 1)) term = -term;
    acc.add(term);
    out.terms = k + 1;
    bool small = fabsl(term) < ctl.rel_tol * fabsl(acc.sum);
    consecutive_small = small ? consecutive_small + 1 : 0;
    if (k >= 1 && consecutive_small >= 2) {
      out.converged = true;
      break;
    }
  }
  out.value = static_cast<double>(acc.sum);
  out.error = acc.roundoff() + ctl.rel_tol * std::abs(out.value);
  return out;
}

Eval ml_negative_integral(double alpha, double beta, double z) {
  // valid for z < 0, 0 < alpha < 1; the denominator has no real zeros there
  const double s1b = std::sin(M_PI * (1.0 - beta));
  const double s1ba = std::sin(M_PI * (1.0 - beta + alpha));
  const double ca = std::cos(alpha * M_PI);
  auto kernel = [&](double chi) -> double {
    if (chi <= 0.0) return 0.0;
    double e = std::pow(chi, 1.0 / alpha);
    if (e > 700.0) return 0.0;
    double num = chi * s1b - z * s1ba;
    double den = (chi - z * ca) * (chi - z * ca) + z * z * (1.0 - ca * ca);
    return std::pow(chi, (1.0 - beta) / alpha) * std::exp(-e) * num /
           (alpha * M_PI * den);
  };
  const double chimax = std::pow(745.0, alpha);
  boost::math::quadrature::tanh_sinh<double> integrator(12);
  double err1 = 0.0, err2 = 0.0, l1a = 0.0, l1b = 0.0;
  // split at 1 so the endpoint behaviour chi^{(1-beta)/alpha} sits at a
  // tanh-sinh endpoint
  double v = integrator.integrate(kernel, 0.0, std::min(1.0, chimax), 1e-13, &err1, &l1a);
  if (chimax > 1.0)
    v += integrator.integrate(kernel, 1.0, chimax, 1e-13, &err2, &l1b);
  double scale = std::max({l1a, l1b, std::abs(v)});
  return {v, (err1 + err2) * scale + 1e-14 * scale};
}

} // namespace detail

Eval mittag_leffler(double alpha, double beta, double z, const SeriesControl& ctl) {
  ctl.validate();
  if (!(alpha > 0.0 && alpha <= 2.0))
    raise(errc::domain_error, fmt("mittag_leffler: alpha must lie in (0,2]", alpha, beta, z));
  if (!(beta > 0.0))
    raise(errc::domain_error, fmt("mittag_leffler: beta must be positive", alpha, beta, z));
  if (!(std::abs(z) <= kMlRange))
    raise(errc::domain_error, fmt("mittag_leffler: |z| exceeds the reliable range 50", alpha, beta, z));

  detail::SeriesEval s = detail::ml_series(alpha, beta, z, ctl);
  const double budget = std::max(16.0 * ctl.rel_tol * std::abs(s.value), 1e-300);
  if (s.converged && s.error <= std::max(budget, 4.0 * ctl.rel_tol)) {
    // absolute fallback in the budget covers values that are legitimately ~0
    return {s.value, s.error};
  }

  if (z < 0.0 && alpha < 1.0) {
    Eval e = detail::ml_negative_integral(alpha, beta, z);
    if (e.error <= std::max(1e-11, 1e-10 * std::abs(e.value)))
      return e;
  }

  if (!s.converged)
    raise(errc::non_convergence,
          fmt("mittag_leffler: term cap reached before the stopping rule fired", alpha, beta, z));
  raise(errc::precision_loss,
        fmt("mittag_leffler: cancellation leaves fewer digits than requested", alpha, beta, z));
}

Eval wright_series(double mu, double theta, const SeriesControl& ctl) {
  ctl.validate();
  if (!(mu > 0.0 && mu < 1.0))
    raise(errc::domain_error, "wright_series: mu must lie in (0,1)");
  if (!(theta > 0.0))
    raise(errc::domain_error, "wright_series: theta must be positive");

  Accum acc;
  const long double lth = logl(static_cast<long double>(theta));
  int consecutive_small = 0;
  bool converged = false;
  for (int n = 1; n <= ctl.max_terms; ++n) {
    long double lt = (-n * static_cast<long double>(mu) - 1.0L) * lth +
                     lgammal(n * static_cast<long double>(mu) + 1.0L) - lgammal(n + 1.0L);
    if (lt > 700.0L) {
      acc.max_term = std::numeric_limits<long double>::infinity();
      break;
    }
    long double term = expl(lt) * sinl(n * static_cast<long double>(M_PI) * mu) / M_PI;
    if ((n & 1) == 0) term = -term;
    acc.add(term);
    bool small = fabsl(term) < ctl.rel_tol * std::max(fabsl(acc.sum), 1e-300L);
    consecutive_small = small ? consecutive_small + 1 : 0;
    if (n >= 4 && consecutive_small >= 2) {
      converged = true;
      break;
    }
  }
  double value = static_cast<double>(acc.sum);
  double error = acc.roundoff() + ctl.rel_tol * std::abs(value);
  if (!converged || !std::isfinite(error))
    raise(errc::non_convergence,
          "wright_series: terms fail to decay within max_terms (theta too small)");
  return {value, error};
}

namespace {

// Ascending form of xi_mu; exact near theta = 0, cancellation builds up in
// the tail. Never throws: reports an infinite estimate instead.
Eval xi_ascending(double mu, double theta, const SeriesControl& ctl) {
  Accum acc;
  const long double lth = theta > 0.0 ? logl(static_cast<long double>(theta)) : 0.0L;
  int consecutive_small = 0;
  bool converged = false;
  const int cap = std::max(ctl.max_terms, 400);
  for (int m = 1; m <= cap; ++m) {
    long double lt = (m - 1) * lth + lgammal(static_cast<long double>(mu) * m) - lgammal(static_cast<long double>(m));
    if (lt > 700.0L) return {0.0, std::numeric_limits<double>::infinity()};
    long double term = expl(lt) * sinl(m * static_cast<long double>(M_PI) * mu) / M_PI;
    if ((m & 1) == 0) term = -term;
    acc.add(term);
    bool small = fabsl(term) < ctl.rel_tol * std::max(fabsl(acc.sum), 1e-300L);
    consecutive_small = small ? consecutive_small + 1 : 0;
    if (m >= 4 && consecutive_small >= 2) {
      converged = true;
      break;
    }
  }
  if (!converged) return {0.0, std::numeric_limits<double>::infinity()};
  double value = static_cast<double>(acc.sum);
  return {value, acc.roundoff() + ctl.rel_tol * std::abs(value)};
}

Eval xi_composition(double mu, double theta, const SeriesControl& ctl) {
  double pref = std::pow(theta, -1.0 - 1.0 / mu) / mu;
  if (!std::isfinite(pref)) return {0.0, std::numeric_limits<double>::infinity()};
  double u = std::pow(theta, -1.0 / mu);
  try {
    Eval w = wright_series(mu, u, ctl);
    return {pref * w.value, pref * w.error};
  } catch (const Error&) {
    return {0.0, std::numeric_limits<double>::infinity()};
  }
}

} // namespace

Eval xi_density(double mu, double theta, const SeriesControl& ctl) {
  ctl.validate();
  if (!(mu > 0.0 && mu < 1.0))
    raise(errc::domain_error, "xi_density: mu must lie in (0,1)");
  if (!(theta > 0.0))
    raise(errc::domain_error, "xi_density: theta must be positive");

  Eval a = xi_ascending(mu, theta, ctl);
  Eval b = xi_composition(mu, theta, ctl);
  Eval best = (a.error <= b.error) ? a : b;
  if (!std::isfinite(best.error))
    raise(errc::non_convergence, "xi_density: no series route converges at this theta");
  return best;
}

namespace detail {

double xi_tail_bound(double mu, double cut, int k) {
  // int_cut^inf theta^k xi_mu <= e^{-s cut} int theta^k e^{s theta} xi_mu
  //                            = e^{-s cut} sum_j s^j (j+k)!/(j! Gamma(mu(j+k)+1)),
  // minimised over a log grid of s. Everything is evaluated in logs.
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 120; ++i) {
    double s = 0.05 * std::pow(50.0 / 0.05, i / 120.0);
    double ls = std::log(s);
    double lmax = -std::numeric_limits<double>::infinity();
    std::vector<double> lts;
    for (int j = 0; j < 4000; ++j) {
      double lt = j * ls + std::lgamma(j + k + 1.0) - std::lgamma(j + 1.0) -
                  std::lgamma(mu * (j + k) + 1.0);
      lts.push_back(lt);
      lmax = std::max(lmax, lt);
      if (j > 10 && lt < lts[lts.size() - 2] && lt < lmax - 46.0) break;
    }
    double acc = 0.0;
    for (double lt : lts) acc += std::exp(lt - lmax);
    double lbound = -s * cut + lmax + std::log(acc);
    if (lbound < 700.0) best = std::min(best, std::exp(lbound));
  }
  return best;
}

} // namespace detail

namespace {

// Adaptive outward panel quadrature of theta^k * xi_mu over [0, inf):
// extend unit panels while the Chernoff tail bound at the running edge
// exceeds the accumulated point-error estimates, then fold the tail bound
// into the error.
Eval xi_weighted_integral(double mu, int k, const SeriesControl& ctl,
                          const std::function<double(double)>& extra_factor) {
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745,
                               0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  double total = 0.0, point_err = 0.0;
  double edge = 0.0;
  double tail = detail::xi_tail_bound(mu, 0.0, k);
  for (int panel = 0; panel < 64; ++panel) {
    double lo = edge, hi = edge + 1.0;
    double acc = 0.0, err = 0.0;
    for (int pass = 0; pass < 2; ++pass) {   // two half-panels, 8 nodes each
      double a = lo + 0.5 * (hi - lo) * pass;
      double b = a + 0.5 * (hi - lo);
      double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (int i = 0; i < 8; ++i) {
        double th = mid + half * gx[i];
        Eval xi = xi_density(mu, th, ctl);
        double f = std::pow(th, k) * extra_factor(th);
        acc += half * gw[i] * f * xi.value;
        err += half * gw[i] * std::abs(f) * xi.error;
      }
    }
    total += acc;
    point_err += err;
    edge = hi;
    tail = detail::xi_tail_bound(mu, edge, k);
    if (tail <= std::max(point_err, 1e-10)) break;
  }
  return {total, point_err + tail};
}

} // namespace

Eval density_moment(double mu, int k, const SeriesControl& ctl) {
  ctl.validate();
  if (!(mu > 0.0 && mu < 1.0))
    raise(errc::domain_error, "density_moment: mu must lie in (0,1)");
  if (k < 0 || k > 4)
    raise(errc::domain_error, "density_moment: k must lie in 0..4");
  Eval r = xi_weighted_integral(mu, k, ctl, [](double) { return 1.0; });
  if (!std::isfinite(r.value) || r.error > 1e-4)
    raise(errc::quadrature_failure, "density_moment: refinement stalled");
  return r;
}

namespace detail {

Eval xi_laplace(double mu, double z, bool weighted, const SeriesControl& ctl) {
  // int xi e^{-z theta} (weighted=false) or int mu theta xi e^{-z theta}
  Eval r = xi_weighted_integral(mu, weighted ? 1 : 0, ctl,
                                [z](double th) { return std::exp(-z * th); });
  if (weighted) return {mu * r.value, mu * r.error};
  return r;
}

} // namespace detail

} // namespace hfim
