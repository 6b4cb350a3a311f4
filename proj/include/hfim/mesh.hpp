#ifndef HFIM_MESH_HPP
#define HFIM_MESH_HPP

#include <vector>

#include <Eigen/Core>

#include "hfim/errors.hpp"

namespace hfim {

// Sample grid on one interval (t_start, t_end]. Nodes exclude t_start, where
// the functions of interest may be singular, and always include t_end.
// Node j sits at t_start + ((j+1)/N)^r (t_end - t_start): grading r >= 1
// clusters nodes at the left end.
struct IntervalMesh {
  double t_start = 0.0;
  double t_end = 1.0;
  double grading = 1.0;
  std::vector<double> nodes;

  static IntervalMesh graded(double t_start, double t_end, int n, double r);

  int size() const { return static_cast<int>(nodes.size()); }
  double length() const { return t_end - t_start; }
  void validate() const;
};

// Vector-valued samples on a mesh. The function is represented as
//   F(s) = (s - t_start)^{sigma-1} G(s)
// with G continuous on [t_start, t_end] and interpolated linearly between
// nodes; `values` stores the raw F at the nodes. sigma = 1 is the plain
// piecewise-linear case. On the leading panel (t_start, nodes[0]] G is
// extended as the constant G(nodes[0]).
struct SampledFunction {
  IntervalMesh mesh;
  Eigen::MatrixXd values;      // dim x nodes, column j = F(nodes[j])
  double singular_exponent = 1.0;

  int dim() const { return static_cast<int>(values.rows()); }
  void validate() const;

  // weighted sample G(nodes[j]) = F_j * (nodes[j]-t_start)^{1-sigma}
  Eigen::VectorXd weighted(int j) const;

  static SampledFunction constant(const IntervalMesh& mesh, const Eigen::VectorXd& c);
};

} // namespace hfim

#endif
