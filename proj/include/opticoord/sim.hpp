// Closed-loop simulation: every agent couples its plant, disturbance
// exosystem, internal-model compensator, adaptive NN controller, and its
// slice of the distributed optimal-signal generator into one flat ODE,
// integrated with fixed-step RK4.
//
// The flat state vector is laid out agent by agent; within an agent the
// order is x (plant, n*q), omega (exosystem), eta (internal model), W
// (NN weights, column-major n_w*q), theta, r, v. Agents only couple through
// the generator's neighbor sums, which read a gathered snapshot of all r
// and v blocks, so the per-agent derivative work is embarrassingly parallel:
// the OpenMP path and the serial reference path produce bitwise-identical
// derivatives.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "opticoord/controller.hpp"
#include "opticoord/generator.hpp"
#include "opticoord/oracle.hpp"
#include "opticoord/ode.hpp"
#include "opticoord/plant.hpp"
#include "opticoord/scenario.hpp"

namespace opticoord {

struct AgentLayout {
  Eigen::Index x = 0;      // plant state offset (n*q entries)
  Eigen::Index omega = 0;  // exosystem state offset (m entries)
  Eigen::Index eta = 0;    // internal-model state offset
  Eigen::Index w = 0;      // NN weight offset (n_w*q entries, column-major)
  Eigen::Index theta = 0;  // damping gain offset (1 entry)
  Eigen::Index r = 0;      // generator primal offset (q entries)
  Eigen::Index v = 0;      // generator integral offset (q entries)
  Eigen::Index begin = 0, end = 0;  // the agent's whole slice
  int n = 0, q = 0, m = 0, eta_dim = 0, n_w = 0;
};

struct StateLayout {
  std::vector<AgentLayout> agents;
  Eigen::Index dim = 0;
};

// Everything one agent needs at derivative time, plus scratch sized once at
// construction so the hot path never allocates. Each agent owns its scratch,
// which is what makes the parallel loop race-free.
struct AgentRuntime {
  AgentSpec spec;
  StabilizerCoeffs stabilizer;
  RbfNetwork net;
  GainFunction gain;
  InternalModel im;
  Eigen::MatrixXd w_prior;  // n_w x q
  double theta_prior = 0.0;
  double ell = 0.01;
  Eigen::VectorXd r0, v0;

  mutable Eigen::VectorXd sigma;     // n_w
  mutable Eigen::VectorXd zeta_buf;  // q
  mutable Eigen::VectorXd u;         // q
  mutable Eigen::VectorXd d;         // q
  mutable Eigen::VectorXd scratch_q; // q
};

struct AgentMetrics {
  double y = 0.0;          // first output component
  double r = 0.0;          // first generator component
  double coord_err = 0.0;  // ||y - y*||
  double gen_err = 0.0;    // ||r - y*||
  double track_err = 0.0;  // ||y - r||
  double nn_err = 0.0;     // feedforward approximation error (signed for q=1)
  double e_id = 0.0;       // internal-model error -Psi eta + d (signed for q=1)
  double theta = 0.0;
  double w_fro = 0.0;      // Frobenius norm of W
  double state_inf = 0.0;  // sup-norm of the agent's whole state slice
};

struct MetricRecord {
  double t = 0.0;
  std::vector<AgentMetrics> agents;
  double consensus = 0.0;  // max pairwise ||r_i - r_j||

  double max_coord_err() const;
  double max_track_err() const;
  double max_abs_e_id() const;
  double max_abs_nn_err() const;
  double max_state_inf() const;
};

struct Trajectory {
  std::vector<MetricRecord> records;
  double dt = 0.0;
  double t_end = 0.0;
  int record_every = 1;
  double runtime_seconds = 0.0;

  std::size_t size() const { return records.size(); }
  // Sup of `pick` over the records with t >= (1 - fraction) * t_end.
  double terminal_sup(double fraction, double (MetricRecord::*pick)() const) const;
};

class ClosedLoopSystem {
 public:
  // Builds all runtimes and solves the centralized problem for y*.
  // Construction does not validate the scenario beyond what the builders
  // enforce; call Scenario::validate() first (the CLI does, unless forced).
  explicit ClosedLoopSystem(const Scenario& scenario);

  int n_agents() const { return static_cast<int>(agents_.size()); }
  const StateLayout& layout() const { return layout_; }
  Eigen::Index state_dim() const { return layout_.dim; }
  const AgentRuntime& agent(int i) const { return agents_[static_cast<std::size_t>(i)]; }
  const Eigen::VectorXd& y_star() const { return y_star_; }
  const SolveResult& oracle_result() const { return oracle_; }
  const GeneratorProblem& generator_problem() const { return problem_; }
  const IntegrationParams& integration() const { return integration_; }

  // x(0): plant at x0, exosystem at w0, generator at (r0, v0); eta, W and
  // theta start at zero / their priors.
  Eigen::VectorXd initial_state() const;

  // OpenMP-parallel across agents when compiled with OpenMP; otherwise
  // identical to rhs_serial.
  void rhs(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dxdt) const;
  // Serial reference implementation for equivalence tests and benchmarks.
  void rhs_serial(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dxdt) const;

  // Control input the agent applies at this state (recomputed, not stored).
  Eigen::VectorXd control_input(int i, const Eigen::VectorXd& x) const;

  MetricRecord metrics(double t, const Eigen::VectorXd& x) const;

  // Fixed-step RK4 with a divergence guard; records metrics at t = 0 and
  // after every record_every-th step. Throws DivergenceError naming the
  // agent and subsystem whose slice first misbehaved.
  Trajectory integrate() const { return integrate(integration_.t_end, integration_.dt,
                                                  integration_.record_every); }
  Trajectory integrate(double t_end, double dt, int record_every) const;

 private:
  void agent_rhs(int i, double t, const Eigen::VectorXd& x, Eigen::VectorXd& dxdt) const;
  void check_finite(double t, const Eigen::VectorXd& x) const;

  std::vector<AgentRuntime> agents_;
  StateLayout layout_;
  GeneratorProblem problem_;
  IntegrationParams integration_;
  SolveResult oracle_;
  Eigen::VectorXd y_star_;
  mutable Eigen::VectorXd stacked_r_, stacked_v_;
};

}  // namespace opticoord
