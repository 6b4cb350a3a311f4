#include "hfim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hfim/special_functions.hpp"

namespace hfim {

// ---------------------------------------------------------------------------
// meshes and samples
// ---------------------------------------------------------------------------

IntervalMesh IntervalMesh::graded(double t_start, double t_end, int n, double r) {
  if (!(t_end > t_start))
    raise(errc::invalid_argument, "IntervalMesh: t_end must exceed t_start");
  if (n < 2) raise(errc::invalid_argument, "IntervalMesh: need at least 2 nodes");
  if (!(r >= 1.0)) raise(errc::invalid_argument, "IntervalMesh: grading must be >= 1");
  IntervalMesh m;
  m.t_start = t_start;
  m.t_end = t_end;
  m.grading = r;
  m.nodes.resize(n);
  double len = t_end - t_start;
  for (int j = 0; j < n; ++j)
    m.nodes[j] = t_start + std::pow(double(j + 1) / n, r) * len;
  m.nodes.back() = t_end;
  return m;
}

void IntervalMesh::validate() const {
  if (nodes.empty()) raise(errc::invalid_argument, "IntervalMesh: empty node list");
  double prev = t_start;
  for (double x : nodes) {
    if (!(x > prev))
      raise(errc::invalid_argument, "IntervalMesh: nodes must be strictly increasing and exclude t_start");
    prev = x;
  }
  if (nodes.back() != t_end)
    raise(errc::invalid_argument, "IntervalMesh: last node must equal t_end");
}

void SampledFunction::validate() const {
  mesh.validate();
  if (values.cols() != mesh.size())
    raise(errc::dimension_mismatch, "SampledFunction: values/nodes length mismatch");
  if (!values.allFinite())
    raise(errc::invalid_argument, "SampledFunction: samples must be finite");
  if (!(singular_exponent > 0.0 && singular_exponent <= 1.0))
    raise(errc::invalid_argument, "SampledFunction: singular exponent must lie in (0,1]");
}

Eigen::VectorXd SampledFunction::weighted(int j) const {
  if (singular_exponent == 1.0) return values.col(j);
  double w = std::pow(mesh.nodes[j] - mesh.t_start, 1.0 - singular_exponent);
  return values.col(j) * w;
}

SampledFunction SampledFunction::constant(const IntervalMesh& m, const Eigen::VectorXd& c) {
  SampledFunction f;
  f.mesh = m;
  f.values = c * Eigen::RowVectorXd::Ones(m.size());
  return f;
}

// ---------------------------------------------------------------------------
// incomplete beta
// ---------------------------------------------------------------------------

namespace {

// Lentz continued fraction for I_x(a,b); standard form, converges for
// x < (a+1)/(a+b+2).
double betacf(double a, double b, double x) {
  constexpr int kMaxIt = 400;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIt; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 4e-16) return h;
  }
  raise(errc::non_convergence, "inc_beta: continued fraction failed to converge");
}

} // namespace

double inc_beta_reg(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    raise(errc::domain_error, "inc_beta: parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double lfront = a * std::log(x) + b * std::log1p(-x) + std::lgamma(a + b) -
                  std::lgamma(a) - std::lgamma(b);
  double front = std::exp(lfront);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double inc_beta(double a, double b, double x) {
  double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return inc_beta_reg(a, b, x) * std::exp(lbeta);
}

// ---------------------------------------------------------------------------
// exact power-kernel panel moments
// ---------------------------------------------------------------------------

namespace detail {

const double kGauss12X[12] = {
    -0.9815606342467192, -0.9041172563704749, -0.7699026741943047,
    -0.5873179542866175, -0.3678314989981802, -0.1252334085114689,
    0.1252334085114689,  0.3678314989981802,  0.5873179542866175,
    0.7699026741943047,  0.9041172563704749,  0.9815606342467192};
const double kGauss12W[12] = {
    0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
    0.2031674267230659, 0.2334925365383548, 0.2491470458134028,
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

PanelWeights power_panel_weights(double rho, double sigma, double t, double t0,
                                 double p, double q) {
  // int_p^q (t-s)^{rho-1} (s-t0)^{sigma-1} hat(s) ds in the normalised
  // variable u = (s-t0)/(t-t0):
  //   m_e = T^{rho+sigma-1+e} [inc_beta(sigma+e, rho)]_{u1}^{u2},  T = t-t0
  const double T = t - t0;
  const double u1 = (p - t0) / T, u2 = (q - t0) / T;
  const double m0 = inc_beta(sigma, rho, u2) - inc_beta(sigma, rho, u1);
  const double m1 = inc_beta(sigma + 1.0, rho, u2) - inc_beta(sigma + 1.0, rho, u1);
  const double scale = std::pow(T, rho + sigma - 1.0);
  const double du = u2 - u1;
  PanelWeights w;
  w.left = scale * (u2 * m0 - m1) / du;
  w.right = scale * (m1 - u1 * m0) / du;
  // the exact weights are nonnegative; clamp the roundoff residue so order
  // arguments downstream see a positive operator
  w.left = std::max(w.left, 0.0);
  w.right = std::max(w.right, 0.0);
  return w;
}

double power_leading_weight(double rho, double sigma, double t, double t0, double q) {
  const double T = t - t0;
  const double u2 = (q - t0) / T;
  return std::pow(T, rho + sigma - 1.0) * inc_beta(sigma, rho, u2);
}

Eigen::VectorXd interpolate(const SampledFunction& f, double s) {
  const auto& nodes = f.mesh.nodes;
  const double t0 = f.mesh.t_start;
  const double sig = f.singular_exponent;
  auto weight = [&](double x) {
    return sig == 1.0 ? 1.0 : std::pow(x - t0, 1.0 - sig);
  };
  auto unweight = [&](double x) {
    return sig == 1.0 ? 1.0 : std::pow(x - t0, sig - 1.0);
  };
  if (s <= nodes.front()) {
    // constant extension of the weighted data on the leading panel
    return f.values.col(0) * weight(nodes.front()) * unweight(s);
  }
  auto it = std::lower_bound(nodes.begin(), nodes.end(), s);
  if (it == nodes.end()) return f.values.col(f.mesh.size() - 1);
  int j = static_cast<int>(it - nodes.begin());
  if (nodes[j] == s) return f.values.col(j);
  double p = nodes[j - 1], q = nodes[j];
  Eigen::VectorXd gp = f.values.col(j - 1) * weight(p);
  Eigen::VectorXd gq = f.values.col(j) * weight(q);
  double a = (q - s) / (q - p);
  return (a * gp + (1.0 - a) * gq) * unweight(s);
}

Eigen::MatrixXd nonuniform_derivative(const IntervalMesh& mesh, const Eigen::MatrixXd& v) {
  const auto& x = mesh.nodes;
  const int n = mesh.size();
  Eigen::MatrixXd d(v.rows(), n);
  if (n == 1) {
    d.setZero();
    return d;
  }
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      d.col(0) = (v.col(1) - v.col(0)) / (x[1] - x[0]);
    } else if (i == n - 1) {
      d.col(i) = (v.col(i) - v.col(i - 1)) / (x[i] - x[i - 1]);
    } else {
      double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
      d.col(i) = (hl * hl * v.col(i + 1) + (hr * hr - hl * hl) * v.col(i) -
                  hr * hr * v.col(i - 1)) /
                 (hl * hr * (hl + hr));
    }
  }
  return d;
}

} // namespace detail

// ---------------------------------------------------------------------------
// convolutions
// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd power_convolution_impl(double rho, const SampledFunction& f, double t) {
  const auto& nodes = f.mesh.nodes;
  const double t0 = f.mesh.t_start;
  const double sig = f.singular_exponent;
  const int n = f.mesh.size();

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.dim());
  auto gval = [&](int j) { return f.weighted(j); };

  // leading panel (t0, nodes[0]] with constant weighted extension
  double q0 = std::min(nodes[0], t);
  Eigen::VectorXd g0 = gval(0);
  acc += detail::power_leading_weight(rho, sig, t, t0, q0) * g0;
  if (t <= nodes[0]) {
    return acc;
  }

  for (int j = 1; j < n; ++j) {
    double p = nodes[j - 1];
    if (p >= t) break;
    double q = std::min(nodes[j], t);
    Eigen::VectorXd gq;
    if (q == nodes[j]) {
      gq = gval(j);
    } else {
      // clip: weighted-linear value at the cut point
      double wp = sig == 1.0 ? 1.0 : std::pow(p - t0, 1.0 - sig);
      double wq = sig == 1.0 ? 1.0 : std::pow(nodes[j] - t0, 1.0 - sig);
      double a = (nodes[j] - q) / (nodes[j] - p);
      gq = a * (f.values.col(j - 1) * wp) + (1.0 - a) * (f.values.col(j) * wq);
    }
    auto w = detail::power_panel_weights(rho, sig, t, t0, p, q);
    acc += w.left * gval(j - 1) + w.right * gq;
  }
  return acc;
}

SampledFunction half_mesh(const SampledFunction& f) {
  SampledFunction h;
  h.singular_exponent = f.singular_exponent;
  h.mesh.t_start = f.mesh.t_start;
  h.mesh.t_end = f.mesh.t_end;
  h.mesh.grading = f.mesh.grading;
  std::vector<int> keep;
  for (int j = f.mesh.size() - 1; j >= 0; j -= 2) keep.push_back(j);
  std::reverse(keep.begin(), keep.end());
  h.mesh.nodes.reserve(keep.size());
  h.values.resize(f.dim(), static_cast<int>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) {
    h.mesh.nodes.push_back(f.mesh.nodes[keep[i]]);
    h.values.col(static_cast<int>(i)) = f.values.col(keep[i]);
  }
  return h;
}

} // namespace

Eigen::VectorXd power_convolution(double rho, const SampledFunction& f, double t) {
  f.validate();
  if (!(rho > 0.0)) raise(errc::domain_error, "power_convolution: rho must be positive");
  if (!(t > f.mesh.t_start))
    raise(errc::domain_error, "power_convolution: t must exceed the mesh origin");
  return power_convolution_impl(rho, f, t);
}

Eigen::VectorXd rl_integral(double gamma_ord, const SampledFunction& f, double t) {
  if (!(gamma_ord > 0.0 && gamma_ord <= 1.0))
    raise(errc::domain_error, "rl_integral: order must lie in (0,1]");
  f.validate();
  if (!(t > f.mesh.nodes.front()))
    raise(errc::domain_error, "rl_integral: t precedes the first node region");
  return power_convolution_impl(gamma_ord, f, t) / gamma_fn(gamma_ord);
}

ConvolutionResult singular_convolution(double mu, const SampledFunction& f, double t,
                                       std::optional<double> error_budget) {
  if (!(mu > 0.0 && mu < 1.0))
    raise(errc::domain_error, "singular_convolution: mu must lie in (0,1)");
  f.validate();
  if (!(t > f.mesh.t_start))
    raise(errc::domain_error, "singular_convolution: t must exceed the mesh origin");
  ConvolutionResult r;
  r.value = power_convolution_impl(mu, f, t);
  if (error_budget && f.mesh.size() >= 4) {
    Eigen::VectorXd coarse = power_convolution_impl(mu, half_mesh(f), t);
    r.error_estimate = (r.value - coarse).lpNorm<Eigen::Infinity>();
    r.warning = r.error_estimate > *error_budget;
  }
  return r;
}

Eigen::VectorXd hilfer_derivative(const FractionalOrder& ord, const SampledFunction& f,
                                  double t) {
  f.validate();
  const double inner = (1.0 - ord.nu()) * (1.0 - ord.mu());
  const double outer = ord.nu() * (1.0 - ord.mu());
  const int n = f.mesh.size();
  if (!(t >= f.mesh.nodes.front()))
    raise(errc::domain_error, "hilfer_derivative: t precedes the first node region");

  // u = I^{inner} f at the nodes (identity when the exponent vanishes)
  SampledFunction u;
  u.mesh = f.mesh;
  u.singular_exponent = 1.0;
  u.values.resize(f.dim(), n);
  if (inner == 0.0) {
    u.values = f.values;
  } else {
    for (int j = 0; j < n; ++j)
      u.values.col(j) = power_convolution_impl(inner, f, f.mesh.nodes[j]) / gamma_fn(inner);
  }

  SampledFunction du;
  du.mesh = f.mesh;
  du.singular_exponent = 1.0;
  du.values = detail::nonuniform_derivative(f.mesh, u.values);

  if (outer == 0.0) return detail::interpolate(du, t);
  return power_convolution_impl(outer, du, t) / gamma_fn(outer);
}

} // namespace hfim
