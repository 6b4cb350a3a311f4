#ifndef HFIM_PROBLEM_HPP
#define HFIM_PROBLEM_HPP

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hfim/mesh.hpp"
#include "hfim/operator_family.hpp"

namespace hfim {

struct Impulse {
  double time;
  // state jump map phi_k; applied to the pre-impulse value x(t_k)
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> map;
};

struct MeshParams {
  int nodes_per_interval = 256;
  double grading = 0.0;   // 0 = auto: max(2, ceil(1/lambda))

  double effective_grading(double lambda) const {
    if (grading >= 1.0) return grading;
    return std::max(2.0, std::ceil(1.0 / lambda));
  }
};

// The initial value problem on [0, T]:
//   D^{mu,nu} x(t) + A x(t) = g(t, x(t)),   t != t_k
//   jump phi_k at each interior impulse time t_k
//   weighted initial datum I^{1-lambda} x(0+) = x0.
// The shift C >= 0 in `gen` selects the equivalent formulation solved
// internally: D^{mu,nu} x + (A+CI) x = g(t,x) + C x; solutions coincide for
// every admissible C, and C makes g(t,x)+Cx increasing when chosen per the
// monotonicity condition.
struct ImpulsiveProblem {
  FractionalOrder ord;
  Generator gen;
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> g;
  std::vector<Impulse> impulses;
  Eigen::VectorXd x0;
  double horizon = 1.0;
  MeshParams mesh;

  int dim() const { return gen.dim(); }
  void validate() const;

  // [0,t_1], (t_1,t_2], ..., (t_l, T]
  std::vector<std::pair<double, double>> intervals() const;
};

// Piecewise trajectory in the PC_{1-lambda} representation: per impulse
// interval, samples of the weighted function w(t) = (t - t_k)^{1-lambda} x(t)
// on a graded mesh. Raw values are reconstructed on demand; the value "at"
// an interval start is never stored unweighted (it diverges when lambda < 1).
class WeightedTrajectory {
public:
  WeightedTrajectory() = default;
  WeightedTrajectory(std::vector<IntervalMesh> meshes, double lambda, int dim);

  static WeightedTrajectory zeros(const ImpulsiveProblem& p);
  // build from a raw function of time (finite at the nodes)
  static WeightedTrajectory from_raw(
      const ImpulsiveProblem& p,
      const std::function<Eigen::VectorXd(double)>& raw);
  // build from a function giving the weighted value directly
  static WeightedTrajectory from_weighted(
      const ImpulsiveProblem& p,
      const std::function<Eigen::VectorXd(double)>& w);

  int intervals() const { return static_cast<int>(meshes_.size()); }
  const IntervalMesh& mesh(int k) const { return meshes_[k]; }
  double lambda() const { return lambda_; }
  int dim() const { return dim_; }

  const Eigen::MatrixXd& weighted(int k) const { return w_[k]; }
  Eigen::MatrixXd& weighted(int k) { return w_[k]; }

  Eigen::VectorXd raw(int k, int node) const;
  double node_weight(int k, int node) const;   // (t - t_k)^{1-lambda}

  // sup over nodes of the weighted infinity norm (the PC_{1-lambda} norm of
  // the piecewise interpolant, evaluated on the grid)
  double pc_norm() const;
  double pc_distance(const WeightedTrajectory& other) const;

  // componentwise x <= other at every node (order is weight-invariant per
  // node); returns the worst violation max(this - other) clipped at 0
  double order_violation(const WeightedTrajectory& other) const;

  bool same_layout(const WeightedTrajectory& other) const;

private:
  std::vector<IntervalMesh> meshes_;
  std::vector<Eigen::MatrixXd> w_;   // dim x nodes, weighted samples
  double lambda_ = 1.0;
  int dim_ = 0;
};

// meshes induced by the problem's impulse structure and mesh parameters
std::vector<IntervalMesh> problem_meshes(const ImpulsiveProblem& p);

} // namespace hfim

#endif
