#ifndef HFIM_QUADRATURE_HPP
#define HFIM_QUADRATURE_HPP

#include <optional>

#include "hfim/fractional.hpp"
#include "hfim/mesh.hpp"

namespace hfim {

// Regularized incomplete beta I_x(a,b) (continued fraction) and the
// unnormalised B_x(a,b) = int_0^x u^{a-1}(1-u)^{b-1} du.
double inc_beta_reg(double a, double b, double x);
double inc_beta(double a, double b, double x);

// Product integration of a power kernel against a sampled function:
//   int_{t0}^{min(t, t_end)} (t - s)^{rho-1} F(s) ds,   rho > 0, t > t0.
// The interpolant of F (weighted-linear, see SampledFunction) is integrated
// against the exact kernel moments panel by panel; both the kernel endpoint
// singularity at s = t and the weight singularity at s = t0 are carried by
// closed-form incomplete-beta moments, so the only error is interpolation
// of the weighted data.
Eigen::VectorXd power_convolution(double rho, const SampledFunction& f, double t);

// Riemann-Liouville integral I^gamma f(t) = (1/Gamma(gamma)) int_0^t (t-s)^{gamma-1} f(s) ds
// relative to the mesh origin. gamma in (0,1]; t must exceed the first node.
Eigen::VectorXd rl_integral(double gamma_ord, const SampledFunction& f, double t);

// Weakly singular convolution int (t-s)^{mu-1} F(s) ds with an optional
// accuracy check: when `error_budget` is set, the integral is re-evaluated on
// the half mesh (every other node) and the Richardson difference is reported;
// `warning` is set when it exceeds the budget.
struct ConvolutionResult {
  Eigen::VectorXd value;
  double error_estimate = 0.0;
  bool warning = false;
};
ConvolutionResult singular_convolution(double mu, const SampledFunction& f, double t,
                                       std::optional<double> error_budget = std::nullopt);

// Numerical two-parameter fractional derivative
//   D^{mu,nu} f = I^{nu(1-mu)} D I^{(1-nu)(1-mu)} f
// with the inner classical derivative taken by 3-point differences on the
// mesh. Diagnostic accuracy only; ill-conditioned near the interval start.
Eigen::VectorXd hilfer_derivative(const FractionalOrder& ord, const SampledFunction& f,
                                  double t);

namespace detail {

// 12-point Gauss-Legendre rule on [-1, 1].
extern const double kGauss12X[12];
extern const double kGauss12W[12];

// Per-panel weights of the exact power-kernel moments against the linear hat
// basis of the weighted data: contribution = w_left * G(p) + w_right * G(q)
// for the panel [p, q], kernel point t, weight origin t0 and exponents
// (rho, sigma). For the leading panel pass p = t0 and constant extension
// via w_left = 0 folded into w_right by the caller.
struct PanelWeights {
  double left = 0.0;
  double right = 0.0;
};
PanelWeights power_panel_weights(double rho, double sigma, double t, double t0,
                                 double p, double q);

// Leading-panel weight (constant extension of G on (t0, q]):
double power_leading_weight(double rho, double sigma, double t, double t0, double q);

// Apply the weighted-linear interpolant of f at an arbitrary point s.
Eigen::VectorXd interpolate(const SampledFunction& f, double s);

// Inner 3-point derivative of sampled data on the mesh nodes.
Eigen::MatrixXd nonuniform_derivative(const IntervalMesh& mesh, const Eigen::MatrixXd& values);

} // namespace detail

} // namespace hfim

#endif
