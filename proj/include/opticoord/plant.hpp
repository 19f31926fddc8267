// Agent dynamics in integrator-chain (normal) form:
//
//   x^(n) = g([x], mu) + b*u + d(t),   y = x,
//
// where [x] = col(x, x', ..., x^(n-1)) is the stacked state (n blocks of
// dimension q), g is an unknown-to-the-controller nonlinearity with
// uncertainty vector mu, and d is the exosystem output.

#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "opticoord/convex.hpp"
#include "opticoord/exosystem.hpp"

namespace opticoord {

// Writes g([x], mu) into `out` (dimension q); must not allocate.
using NonlinearityFn = std::function<void(const Eigen::Ref<const Eigen::VectorXd>& x_stack,
                                          const Eigen::VectorXd& mu, Eigen::Ref<Eigen::VectorXd> out)>;

// Controlled Van der Pol oscillator (n=2, q=1):
//   g = -(1+mu_1)*x + (1+mu_2)*(mu_3 - x^2)*x'.
// Reads mu entries 1..3 (0-based 0..2); extra entries are ignored.
double vanderpol_g(const Eigen::Ref<const Eigen::VectorXd>& x_stack, const Eigen::VectorXd& mu);

// Single-link flexible-joint manipulator reduced to chain form (n=4, q=1).
struct FlexJointParams {
  double j1 = 1.0;      // link inertia
  double j2 = 1.0;      // motor inertia
  double m = 1.0;       // total mass
  double g_grav = 9.8;  // gravitational acceleration
  double l = 1.0;       // effective length (uncertainty already applied)
  double k = 1.0;       // joint spring constant

  double b() const { return k / (j1 * j2); }  // input gain of the chain form
};

//   g = -x'' * ((MgL/J1) cos x + k/J1 + k/J2) + (MgL/J1) * (x'^2 - k/J2) * sin x.
double flexjoint_g(const Eigen::Ref<const Eigen::VectorXd>& x_stack, const FlexJointParams& p);

NonlinearityFn zero_nonlinearity();
NonlinearityFn vanderpol_nonlinearity();
NonlinearityFn flexjoint_nonlinearity(FlexJointParams p);  // mu is unused; L is baked into p

class AgentSpec {
 public:
  AgentSpec(std::string kind, int n, int q, NonlinearityFn g, Eigen::VectorXd mu,
            Eigen::MatrixXd b, bool b_known, ExosystemSpec exosystem, LocalObjective objective,
            ConvexSet constraint, Eigen::VectorXd x0);

  const std::string& kind() const { return kind_; }
  int n() const { return n_; }
  int q() const { return q_; }
  int state_dim() const { return n_ * q_; }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::MatrixXd& b() const { return b_; }
  // When true the scenario declares b known to the controller, which then
  // premultiplies its commanded input by b^{-1}; otherwise the control law
  // is applied as-is (the usual normalization is b = I).
  bool b_known() const { return b_known_; }
  const Eigen::MatrixXd& b_inverse() const { return b_inv_; }
  const ExosystemSpec& exosystem() const { return exosystem_; }
  const LocalObjective& objective() const { return objective_; }
  const ConvexSet& constraint() const { return constraint_; }
  const Eigen::VectorXd& x0() const { return x0_; }

  void eval_g(const Eigen::Ref<const Eigen::VectorXd>& x_stack, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd g(const Eigen::VectorXd& x_stack) const;

 private:
  std::string kind_;
  int n_, q_;
  NonlinearityFn g_;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd b_, b_inv_;
  bool b_known_;
  ExosystemSpec exosystem_;
  LocalObjective objective_;
  ConvexSet constraint_;
  Eigen::VectorXd x0_;
};

// Chain form: block j of the derivative is block j+1 of the state for
// j < n-1, and the last block is g([x], mu) + b*u + d.
Eigen::VectorXd plant_rhs(const AgentSpec& spec, const Eigen::VectorXd& x_stack,
                          const Eigen::VectorXd& u, const Eigen::VectorXd& d);

// Allocation-free flavor for the simulation hot path.
void plant_rhs_into(const AgentSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x_stack,
                    const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                    Eigen::Ref<Eigen::VectorXd> out);

}  // namespace opticoord
