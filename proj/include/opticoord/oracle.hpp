// Centralized ground truth for the coordination target: solves
//   minimize sum_i f_i(y)  subject to  y in Omega_0 = intersection_i Omega_i
// by projected gradient descent. The unique minimizer y* is the reference
// every simulation metric is measured against.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "opticoord/convex.hpp"
#include "opticoord/graph.hpp"

namespace opticoord {

struct CentralProblem {
  CentralProblem(std::vector<LocalObjective> objectives, std::vector<ConvexSet> sets);

  std::vector<LocalObjective> objectives;
  std::vector<ConvexSet> sets;
  ConvexSet omega0;  // intersection of the local sets
  int q = 0;

  Eigen::VectorXd total_gradient(const Eigen::VectorXd& y) const;
  double total_value(const Eigen::VectorXd& y) const;

  // 1 / sum_i lbar_i; requires every objective to declare a gradient
  // Lipschitz bound.
  double default_step() const;
};

// Componentwise [max_i lo_i, min_i hi_i]; whole-space factors are treated
// as infinite boxes. Throws std::invalid_argument when some component
// comes out empty.
ConvexSet intersect_boxes(const std::vector<ConvexSet>& sets);

struct SolveResult {
  Eigen::VectorXd y_star;
  double kkt_residual = 0.0;
  long iterations = 0;
  bool converged = false;
};

// Fixed-step projected gradient y <- P_{Omega_0}(y - step * grad) until the
// fixed-point residual drops below tol. Throws std::runtime_error when
// max_iter is exhausted (message carries the last residual).
SolveResult solve(const CentralProblem& problem, double step, double tol, long max_iter,
                  const Eigen::VectorXd& y_init);

// Defaults: step = default_step(), tol = 1e-9, max_iter = 1e6, start at the
// projection of the origin onto Omega_0.
SolveResult solve(const CentralProblem& problem);

// ||y - P_{Omega_0}(y - sum grad f_i(y))||; zero exactly at y*.
double kkt_residual(const CentralProblem& problem, const Eigen::VectorXd& y);

// For connected graphs, (L (x) I_q) y ~= 0 and "all blocks of y equal" must
// be simultaneously true or simultaneously false; returns that equivalence.
bool check_consensus_equivalence(const WeightedGraph& graph, const Eigen::VectorXd& y_stack, int q);

}  // namespace opticoord
