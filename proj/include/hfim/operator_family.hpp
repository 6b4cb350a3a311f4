#ifndef HFIM_OPERATOR_FAMILY_HPP
#define HFIM_OPERATOR_FAMILY_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "hfim/fractional.hpp"
#include "hfim/special_functions.hpp"

namespace hfim {

// Matrix generator of the problem: -A generates the underlying semigroup
// Q(t) = e^{-At}; the nonnegative shift C turns it into the perturbed
// R(t) = e^{-Ct} Q(t) = e^{-(A+CI)t} used by the monotone construction.
struct Generator {
  Eigen::MatrixXd A;
  double C = 0.0;

  int dim() const { return static_cast<int>(A.rows()); }
  Eigen::MatrixXd shifted() const {
    return A + C * Eigen::MatrixXd::Identity(A.rows(), A.cols());
  }
  void validate() const;
};

// e^{-Ct} e^{-At} v by scaling-and-squaring matrix exponential.
Eigen::VectorXd semigroup_apply(const Generator& gen, double t, const Eigen::VectorXd& v);

// Solution-operator families for the shifted generator B = A + CI:
//   P*(t) = E_{mu,mu}(-B t^mu)
//   S*(t) = t^{lambda-1} E_{mu,lambda}(-B t^mu)
// with two interchangeable backends. closed_form evaluates the matrix
// Mittag-Leffler function (eigendecomposition when B has a well-conditioned
// real eigenbasis, the global matrix power series otherwise);
// density_quadrature integrates mu theta xi_mu(theta) e^{-B t^mu theta}
// dtheta, which follows the subordination formula directly and serves as an
// independent cross-check of the closed form.
class OperatorFamily {
public:
  enum class Backend { closed_form, density_quadrature };

  OperatorFamily(const FractionalOrder& ord, Generator gen, Backend backend,
                 double horizon, SeriesControl ctl = SeriesControl{1e-13, 2000});

  const FractionalOrder& ord() const { return ord_; }
  const Generator& gen() const { return gen_; }
  Backend backend() const { return backend_; }
  int dim() const { return gen_.dim(); }
  double bound_constant() const { return m_star_; }   // M* >= 1

  // P*(t), t > 0 (backend-selected)
  Eigen::MatrixXd p(double t) const;
  // S*(t), t > 0 (backend-selected)
  Eigen::MatrixXd s(double t) const;

  // closed-form kernel K(tau) = tau^{mu-1} P*(tau) of the mild convolution
  Eigen::MatrixXd ml_kernel(double tau) const;

  // E_{mu,beta}(-B t^mu) through the closed-form machinery
  Eigen::MatrixXd matrix_ml(double beta, double t) const;

  // e^{-Bt} by scaling-and-squaring (kept independent of the eigen path so
  // the density backend cross-checks the closed form end to end)
  Eigen::MatrixXd semigroup(double t) const;

  Eigen::MatrixXd p_density(double t) const;
  Eigen::MatrixXd p_closed(double t) const;

private:
  enum class Mode { symmetric, real_diag, series };

  Eigen::MatrixXd eigen_ml(double beta, double z_scale) const;
  Eigen::MatrixXd series_ml(double beta, double z_scale) const;
  double scalar_ml(double beta, double x, const std::vector<double>& table) const;
  const std::vector<double>& table_for(double beta) const;

  FractionalOrder ord_;
  Generator gen_;
  Backend backend_;
  SeriesControl ctl_;
  Eigen::MatrixXd B_;
  Mode mode_;
  Eigen::MatrixXd V_, Vinv_;       // real eigenbasis when available
  Eigen::VectorXd eigs_;
  double m_star_ = 1.0;
  double horizon_ = 1.0;
  mutable std::vector<std::pair<double, std::vector<double>>> tables_;  // (beta, 1/Gamma(mu k + beta))
};

// Cross-check of the two backends at one time; raises backend_disagreement
// beyond `tol` (entrywise).
Eigen::MatrixXd p_operator_checked(const OperatorFamily& fam, double t, double tol = 1e-5);

// Norm-bound diagnostics: checks Lemma-style bounds
//   ||S*(t) v|| <= M* t^{lambda-1}/Gamma(lambda) ||v||
//   ||P*(t) v|| <= M*/Gamma(mu) ||v||
// over the given times and a sample of unit vectors (canonical plus seeded
// random); reports ratios and records entries exceeding 1.
struct BoundCheckEntry {
  double t;
  int vector_index;
  double ratio_s;
  double ratio_p;
};
struct BoundCheckReport {
  double m_star;
  double max_ratio_s = 0.0;
  double max_ratio_p = 0.0;
  std::vector<BoundCheckEntry> violations;  // entries with ratio > 1
  bool clean() const { return violations.empty(); }
};
BoundCheckReport operator_bound_check(const OperatorFamily& fam,
                                      const std::vector<double>& times,
                                      int random_vectors = 8,
                                      std::uint64_t seed = 2024);

} // namespace hfim

#endif
