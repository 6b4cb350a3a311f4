#include "hfim/operator_family.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "hfim/quadrature.hpp"

namespace hfim {

namespace {

constexpr double kSeriesRange = 50.0;   // refuse matrix series beyond ||B|| t^mu > 50

double unit_double(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

} // namespace

void Generator::validate() const {
  if (A.rows() != A.cols() || A.rows() < 1)
    raise(errc::invalid_argument, "Generator: A must be square and nonempty");
  if (!A.allFinite())
    raise(errc::invalid_argument, "Generator: A must have finite entries");
  if (!(C >= 0.0))
    raise(errc::invalid_argument, "Generator: shift C must be >= 0");
}

Eigen::VectorXd semigroup_apply(const Generator& gen, double t, const Eigen::VectorXd& v) {
  gen.validate();
  if (!(t >= 0.0)) raise(errc::domain_error, "semigroup_apply: t must be >= 0");
  if (v.size() != gen.dim())
    raise(errc::dimension_mismatch, "semigroup_apply: vector dimension mismatch");
  Eigen::MatrixXd E = (-t * gen.A).exp();
  return std::exp(-gen.C * t) * (E * v);
}

OperatorFamily::OperatorFamily(const FractionalOrder& ord, Generator gen, Backend backend,
                               double horizon, SeriesControl ctl)
    : ord_(ord), gen_(std::move(gen)), backend_(backend), ctl_(ctl), horizon_(horizon) {
  gen_.validate();
  ctl_.validate();
  if (!(horizon > 0.0))
    raise(errc::invalid_argument, "OperatorFamily: horizon must be positive");
  B_ = gen_.shifted();
  const int n = gen_.dim();

  // pick the evaluation mode for the matrix Mittag-Leffler function
  if (B_.isApprox(B_.transpose(), 1e-12)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B_);
    V_ = es.eigenvectors();
    Vinv_ = V_.transpose();
    eigs_ = es.eigenvalues();
    mode_ = Mode::symmetric;
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(B_);
    double imag_norm = es.eigenvalues().imag().cwiseAbs().maxCoeff();
    double scale = std::max(1.0, B_.cwiseAbs().maxCoeff());
    bool ok = imag_norm <= 1e-10 * scale;
    if (ok) {
      Eigen::MatrixXd V = es.eigenvectors().real();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
      ok = lu.isInvertible() && lu.rcond() > 1e-10;
      if (ok) {
        V_ = V;
        Vinv_ = lu.inverse();
        eigs_ = es.eigenvalues().real();
        ok = (V_ * eigs_.asDiagonal() * Vinv_ - B_).cwiseAbs().maxCoeff() <=
             1e-9 * std::max(1.0, scale);
      }
    }
    mode_ = ok ? Mode::real_diag : Mode::series;
  }

  // grid supremum of ||e^{-Bt}||_2 on [0, horizon]; the bound constant is a
  // diagnostic estimate, not a proof
  double sup = 1.0;
  const int kGrid = 1024;
  for (int i = 0; i <= kGrid; ++i) {
    double t = horizon_ * i / kGrid;
    Eigen::MatrixXd E = semigroup(t);
    double nrm = E.jacobiSvd().singularValues()(0);
    sup = std::max(sup, nrm);
  }
  m_star_ = sup;
  (void)n;
}

const std::vector<double>& OperatorFamily::table_for(double beta) const {
  for (auto& kv : tables_)
    if (kv.first == beta) return kv.second;
  std::vector<double> c(static_cast<size_t>(ctl_.max_terms));
  for (int k = 0; k < ctl_.max_terms; ++k) {
    double lg = std::lgamma(ord_.mu() * k + beta);
    c[static_cast<size_t>(k)] = lg > 700.0 ? 0.0 : std::exp(-lg);
  }
  tables_.emplace_back(beta, std::move(c));
  return tables_.back().second;
}

double OperatorFamily::scalar_ml(double beta, double x, const std::vector<double>& c) const {
  // sum x^k / Gamma(mu k + beta) with the tabulated reciprocal gammas
  long double sum = 0.0L, comp = 0.0L, zp = 1.0L, mx = 0.0L;
  int consecutive_small = 0;
  bool converged = false;
  for (size_t k = 0; k < c.size(); ++k) {
    long double term = zp * c[k];
    long double y = term - comp;
    long double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    mx = std::max(mx, fabsl(term));
    bool small = fabsl(term) < ctl_.rel_tol * fabsl(sum);
    consecutive_small = small ? consecutive_small + 1 : 0;
    if (k >= 1 && consecutive_small >= 2) {
      converged = true;
      break;
    }
    zp *= x;
    if (fabsl(zp) > 1e280L) break;
  }
  double est = static_cast<double>(mx) * 3.5e-18 + ctl_.rel_tol * std::abs((double)sum);
  if (converged && est <= std::max(1e-12, 1e-10 * std::abs((double)sum)))
    return static_cast<double>(sum);
  // cancellation or cap: switch to the spectral integral (x < 0 only)
  if (x < 0.0 && ord_.mu() < 1.0) {
    Eval e = detail::ml_negative_integral(ord_.mu(), beta, x);
    return e.value;
  }
  if (!converged)
    raise(errc::non_convergence, "OperatorFamily: scalar series hit the term cap");
  return static_cast<double>(sum);
}

Eigen::MatrixXd OperatorFamily::eigen_ml(double beta, double z_scale) const {
  const auto& c = table_for(beta);
  Eigen::VectorXd d(eigs_.size());
  for (int i = 0; i < eigs_.size(); ++i)
    d(i) = scalar_ml(beta, -eigs_(i) * z_scale, c);
  return V_ * d.asDiagonal() * Vinv_;
}

Eigen::MatrixXd OperatorFamily::series_ml(double beta, double z_scale) const {
  const int n = dim();
  Eigen::MatrixXd Z = -B_ * z_scale;
  double zn = Z.norm();
  if (zn > kSeriesRange)
    raise(errc::domain_error,
          "OperatorFamily: ||A+CI|| t^mu exceeds the reliable series range 50");
  const auto& c = table_for(beta);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd zp = Eigen::MatrixXd::Identity(n, n);
  double mx = 0.0;
  int consecutive_small = 0;
  bool converged = false;
  for (size_t k = 0; k < c.size(); ++k) {
    Eigen::MatrixXd term = zp * c[k];
    sum += term;
    double tn = term.norm();
    mx = std::max(mx, tn);
    bool small = tn < ctl_.rel_tol * std::max(sum.norm(), 1e-300);
    consecutive_small = small ? consecutive_small + 1 : 0;
    if (k >= 1 && consecutive_small >= 2) {
      converged = true;
      break;
    }
    zp = zp * Z;
  }
  if (!converged)
    raise(errc::non_convergence, "OperatorFamily: matrix series hit the term cap");
  double est = mx * 2.3e-16 * 64.0;
  if (est > std::max(1e-9, 1e-7 * sum.norm()))
    raise(errc::precision_loss,
          "OperatorFamily: matrix series cancellation exceeds tolerance "
          "(non-diagonalizable generator with large spectrum)");
  return sum;
}

Eigen::MatrixXd OperatorFamily::matrix_ml(double beta, double t) const {
  double z_scale = std::pow(t, ord_.mu());
  if (mode_ == Mode::series) return series_ml(beta, z_scale);
  return eigen_ml(beta, z_scale);
}

Eigen::MatrixXd OperatorFamily::semigroup(double t) const {
  return (-t * B_).exp();
}

Eigen::MatrixXd OperatorFamily::p_closed(double t) const {
  return matrix_ml(ord_.mu(), t);
}

Eigen::MatrixXd OperatorFamily::p_density(double t) const {
  // int_0^inf mu theta xi(theta) e^{-B t^mu theta} dtheta, panel by panel,
  // stopping when the Chernoff tail bound drops below the accumulated
  // point-error estimates (see xi_density docs)
  const double mu = ord_.mu();
  const double zs = std::pow(t, mu);
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745,
                               0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  const int n = dim();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
  double point_err = 0.0;
  double edge = 0.0;
  SeriesControl ctl{1e-13, 800};
  for (int panel = 0; panel < 64; ++panel) {
    for (int half = 0; half < 2; ++half) {
      double a = edge + 0.5 * half, b = a + 0.5;
      double mid = 0.5 * (a + b), h = 0.5 * (b - a);
      for (int i = 0; i < 8; ++i) {
        double th = mid + h * gx[i];
        Eval xi = xi_density(mu, th, ctl);
        Eigen::MatrixXd R = (-zs * th * B_).exp();
        total += (h * gw[i] * mu * th * xi.value) * R;
        point_err += h * gw[i] * mu * th * xi.error * m_star_;
      }
    }
    edge += 1.0;
    double tail = mu * detail::xi_tail_bound(mu, edge, 1) * m_star_;
    if (tail <= std::max(point_err, 1e-9)) {
      point_err += tail;
      break;
    }
  }
  if (point_err > 1e-6)
    raise(errc::quadrature_failure, "OperatorFamily: density quadrature did not reach 1e-6");
  return total;
}

Eigen::MatrixXd OperatorFamily::p(double t) const {
  if (!(t > 0.0)) raise(errc::domain_error, "p_operator: t must be positive");
  return backend_ == Backend::closed_form ? p_closed(t) : p_density(t);
}

Eigen::MatrixXd OperatorFamily::s(double t) const {
  if (!(t > 0.0)) raise(errc::domain_error, "s_operator: t must be positive");
  const double lam = ord_.lambda();
  if (backend_ == Backend::closed_form)
    return std::pow(t, lam - 1.0) * matrix_ml(lam, t);
  // density route: I^{nu(1-mu)} applied to s^{mu-1} P*(s), with the density
  // P sampled on a graded mesh (the integrand behaves like s^{mu-1} at 0,
  // which the weighted product integration absorbs exactly)
  const double g = ord_.nu() * (1.0 - ord_.mu());
  if (g == 0.0) return std::pow(t, ord_.mu() - 1.0) * p_density(t);
  const int n = dim();
  const int m = 96;
  SampledFunction f;
  f.mesh = IntervalMesh::graded(0.0, t, m, 3.0);
  f.singular_exponent = ord_.mu();
  f.values.resize(n * n, m);
  for (int j = 0; j < m; ++j) {
    double sj = f.mesh.nodes[j];
    Eigen::MatrixXd Pj = std::pow(sj, ord_.mu() - 1.0) * p_density(sj);
    f.values.col(j) = Eigen::Map<Eigen::VectorXd>(Pj.data(), n * n);
  }
  Eigen::VectorXd flat = power_convolution(g, f, t) / gamma_fn(g);
  return Eigen::Map<Eigen::MatrixXd>(flat.data(), n, n);
}

Eigen::MatrixXd OperatorFamily::ml_kernel(double tau) const {
  return std::pow(tau, ord_.mu() - 1.0) * matrix_ml(ord_.mu(), tau);
}

Eigen::MatrixXd p_operator_checked(const OperatorFamily& fam, double t, double tol) {
  Eigen::MatrixXd a = fam.p_closed(t);
  Eigen::MatrixXd b = fam.p_density(t);
  double diff = (a - b).cwiseAbs().maxCoeff();
  if (diff > tol)
    raise(errc::backend_disagreement,
          "p_operator: closed-form and density backends disagree beyond tolerance");
  return fam.backend() == OperatorFamily::Backend::closed_form ? a : b;
}

BoundCheckReport operator_bound_check(const OperatorFamily& fam,
                                      const std::vector<double>& times,
                                      int random_vectors, std::uint64_t seed) {
  const int n = fam.dim();
  const double mu = fam.ord().mu();
  const double lam = fam.ord().lambda();
  BoundCheckReport rep;
  rep.m_star = fam.bound_constant();

  std::vector<Eigen::VectorXd> vs;
  for (int i = 0; i < n; ++i) vs.push_back(Eigen::VectorXd::Unit(n, i));
  std::mt19937_64 rng(seed);
  for (int i = 0; i < random_vectors; ++i) {
    Eigen::VectorXd v(n);
    for (int j = 0; j < n; ++j) v(j) = 2.0 * unit_double(rng) - 1.0;
    double nv = v.norm();
    if (nv > 1e-12) vs.push_back(v / nv);
  }

  const double gl = gamma_fn(lam), gm = gamma_fn(mu);
  for (double t : times) {
    if (!(t > 0.0)) raise(errc::domain_error, "operator_bound_check: times must be positive");
    Eigen::MatrixXd S = fam.s(t), P = fam.p(t);
    double s_cap = rep.m_star * std::pow(t, lam - 1.0) / gl;
    double p_cap = rep.m_star / gm;
    for (size_t vi = 0; vi < vs.size(); ++vi) {
      double rs = (S * vs[vi]).norm() / s_cap;
      double rp = (P * vs[vi]).norm() / p_cap;
      rep.max_ratio_s = std::max(rep.max_ratio_s, rs);
      rep.max_ratio_p = std::max(rep.max_ratio_p, rp);
      if (rs > 1.0 + 1e-12 || rp > 1.0 + 1e-12)
        rep.violations.push_back({t, static_cast<int>(vi), rs, rp});
    }
  }
  return rep;
}

} // namespace hfim
