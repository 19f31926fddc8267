// Distributed optimal-signal generator: each agent runs the projected
// primal-dual flow
//
//   r_i_dot = -2 r_i + 2 P_{Omega_i}(r_i - grad f_i(r_i)
//             - sum_j a_ij (r_i - r_j) - sum_j a_ij (v_i - v_j))
//   v_i_dot = r_i
//
// whose r-components converge to the common constrained minimizer of
// sum_i f_i over the intersection of the local sets, for any initial
// condition on a connected graph.

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "opticoord/convex.hpp"
#include "opticoord/graph.hpp"

namespace opticoord {

struct GeneratorState {
  std::vector<Eigen::VectorXd> r;  // primal estimates, one per agent
  std::vector<Eigen::VectorXd> v;  // integral states, one per agent
};

struct GeneratorProblem {
  GeneratorProblem(const WeightedGraph& graph, std::vector<LocalObjective> objectives,
                   std::vector<ConvexSet> sets);

  LaplacianMatrix laplacian;
  std::vector<LocalObjective> objectives;
  std::vector<ConvexSet> sets;
  int n_agents = 0;
  int q = 0;
};

GeneratorState generator_rhs(const GeneratorState& state, const LaplacianMatrix& laplacian,
                             const std::vector<LocalObjective>& objectives,
                             const std::vector<ConvexSet>& sets);

// Allocation-free single-agent flavor over stacked (qN) r and v snapshots;
// used by the closed-loop simulation. scratch must have dimension q.
void generator_rhs_agent(int i, const GeneratorProblem& problem,
                         const Eigen::Ref<const Eigen::VectorXd>& stacked_r,
                         const Eigen::Ref<const Eigen::VectorXd>& stacked_v,
                         Eigen::Ref<Eigen::VectorXd> r_dot, Eigen::Ref<Eigen::VectorXd> v_dot,
                         Eigen::Ref<Eigen::VectorXd> scratch);

// max over agent pairs of ||r_i - r_j||.
double consensus_residual(const Eigen::Ref<const Eigen::VectorXd>& stacked_r, int n_agents, int q);

struct GeneratorRun {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> r_snapshots;  // stacked qN
  std::vector<Eigen::VectorXd> v_snapshots;  // stacked qN
  std::vector<double> consensus;             // per snapshot
  std::vector<double> distance_to_ystar;     // empty when y_star not supplied

  const Eigen::VectorXd& terminal_r() const { return r_snapshots.back(); }
  double terminal_consensus() const { return consensus.back(); }
};

// Fixed-step RK4 on the stacked generator flow. Throws DivergenceError when
// any entry exceeds 1e9 in magnitude or turns non-finite.
GeneratorRun run_generator(const GeneratorProblem& problem, const Eigen::VectorXd& r0,
                           const Eigen::VectorXd& v0, double t_end, double dt, int record_every,
                           const std::optional<Eigen::VectorXd>& y_star = std::nullopt);

}  // namespace opticoord
