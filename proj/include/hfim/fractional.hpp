#ifndef HFIM_FRACTIONAL_HPP
#define HFIM_FRACTIONAL_HPP

#include <cstdint>

#include "hfim/errors.hpp"

namespace hfim {

// Truncation control for the infinite series used throughout (Mittag-Leffler,
// Wright-type densities, Gronwall kernels). A series is considered converged
// when a term drops below rel_tol * |partial sum| twice in a row; the double
// check matters because sin(n*pi*mu) factors can make isolated terms vanish.
struct SeriesControl {
  double rel_tol = 1e-12;
  int max_terms = 400;

  void validate() const {
    if (!(rel_tol > 0.0))
      raise(errc::invalid_argument, "SeriesControl: rel_tol must be > 0");
    if (max_terms < 1)
      raise(errc::invalid_argument, "SeriesControl: max_terms must be >= 1");
  }
};

// Order/type pair (mu, nu) of the two-parameter fractional derivative,
// with the derived weight parameter lambda = mu + nu - mu*nu in (0, 1].
// nu = 0 gives the Riemann-Liouville case (lambda = mu), nu = 1 the Caputo
// case (lambda = 1). lambda controls the t^(lambda-1) behaviour of solutions
// at the start of every impulse interval.
class FractionalOrder {
public:
  FractionalOrder(double mu, double nu) : mu_(mu), nu_(nu) {
    if (!(mu > 0.0) || !(mu < 1.0))
      raise(errc::invalid_argument, "FractionalOrder: mu must lie in (0,1)");
    if (!(nu >= 0.0 && nu <= 1.0))
      raise(errc::invalid_argument, "FractionalOrder: nu must lie in [0,1]");
  }

  double mu() const noexcept { return mu_; }
  double nu() const noexcept { return nu_; }
  double lambda() const noexcept { return mu_ + nu_ - mu_ * nu_; }

private:
  double mu_;
  double nu_;
};

} // namespace hfim

#endif
