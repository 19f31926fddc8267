#include "opticoord/plant.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace opticoord {

double vanderpol_g(const Eigen::Ref<const Eigen::VectorXd>& x_stack, const Eigen::VectorXd& mu) {
  if (x_stack.size() != 2) throw std::invalid_argument("vanderpol_g: state must be (x, x')");
  if (mu.size() < 3) throw std::invalid_argument("vanderpol_g: mu must have at least 3 entries");
  const double x = x_stack(0), xd = x_stack(1);
  return -(1.0 + mu(0)) * x + (1.0 + mu(1)) * (mu(2) - x * x) * xd;
}

double flexjoint_g(const Eigen::Ref<const Eigen::VectorXd>& x_stack, const FlexJointParams& p) {
  if (x_stack.size() != 4) throw std::invalid_argument("flexjoint_g: state must be (x, x', x'', x''')");
  const double x = x_stack(0), xd = x_stack(1), xdd = x_stack(2);
  const double mgl_j1 = p.m * p.g_grav * p.l / p.j1;
  return -xdd * (mgl_j1 * std::cos(x) + p.k / p.j1 + p.k / p.j2) +
         mgl_j1 * (xd * xd - p.k / p.j2) * std::sin(x);
}

NonlinearityFn zero_nonlinearity() {
  return [](const Eigen::Ref<const Eigen::VectorXd>&, const Eigen::VectorXd&,
            Eigen::Ref<Eigen::VectorXd> out) { out.setZero(); };
}

NonlinearityFn vanderpol_nonlinearity() {
  return [](const Eigen::Ref<const Eigen::VectorXd>& x_stack, const Eigen::VectorXd& mu,
            Eigen::Ref<Eigen::VectorXd> out) { out(0) = vanderpol_g(x_stack, mu); };
}

NonlinearityFn flexjoint_nonlinearity(FlexJointParams p) {
  return [p](const Eigen::Ref<const Eigen::VectorXd>& x_stack, const Eigen::VectorXd&,
             Eigen::Ref<Eigen::VectorXd> out) { out(0) = flexjoint_g(x_stack, p); };
}

AgentSpec::AgentSpec(std::string kind, int n, int q, NonlinearityFn g, Eigen::VectorXd mu,
                     Eigen::MatrixXd b, bool b_known, ExosystemSpec exosystem,
                     LocalObjective objective, ConvexSet constraint, Eigen::VectorXd x0)
    : kind_(std::move(kind)), n_(n), q_(q), g_(std::move(g)), mu_(std::move(mu)),
      b_(std::move(b)), b_known_(b_known), exosystem_(std::move(exosystem)),
      objective_(std::move(objective)), constraint_(std::move(constraint)), x0_(std::move(x0)) {
  if (n_ < 2) throw std::invalid_argument("AgentSpec: order n must be >= 2");
  if (q_ < 1) throw std::invalid_argument("AgentSpec: output dimension q must be >= 1");
  if (!g_) throw std::invalid_argument("AgentSpec: nonlinearity must be callable");
  if (b_.rows() != q_ || b_.cols() != q_) throw std::invalid_argument("AgentSpec: b must be q x q");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b_);
  if (!lu.isInvertible()) throw std::invalid_argument("AgentSpec: b must be invertible");
  b_inv_ = lu.inverse();
  if (exosystem_.output_dim() != q_)
    throw std::invalid_argument("AgentSpec: disturbance dimension must equal q");
  if (objective_.dimension() != q_)
    throw std::invalid_argument("AgentSpec: objective dimension must equal q");
  if (constraint_.dimension() != q_)
    throw std::invalid_argument("AgentSpec: constraint dimension must equal q");
  if (x0_.size() != n_ * q_)
    throw std::invalid_argument("AgentSpec: x0 must have dimension n*q");
}

void AgentSpec::eval_g(const Eigen::Ref<const Eigen::VectorXd>& x_stack,
                       Eigen::Ref<Eigen::VectorXd> out) const {
  g_(x_stack, mu_, out);
}

Eigen::VectorXd AgentSpec::g(const Eigen::VectorXd& x_stack) const {
  Eigen::VectorXd out(q_);
  eval_g(x_stack, out);
  return out;
}

Eigen::VectorXd plant_rhs(const AgentSpec& spec, const Eigen::VectorXd& x_stack,
                          const Eigen::VectorXd& u, const Eigen::VectorXd& d) {
  Eigen::VectorXd out(spec.state_dim());
  plant_rhs_into(spec, x_stack, u, d, out);
  return out;
}

void plant_rhs_into(const AgentSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x_stack,
                    const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                    Eigen::Ref<Eigen::VectorXd> out) {
  const int q = spec.q();
  const int dim = spec.state_dim();
  if (x_stack.size() != dim || out.size() != dim || u.size() != q || d.size() != q)
    throw std::invalid_argument("plant_rhs: dimension mismatch");
  out.head(dim - q) = x_stack.tail(dim - q);
  auto last = out.tail(q);
  spec.eval_g(x_stack, last);
  last.noalias() += spec.b() * u;
  last += d;
}

}  // namespace opticoord
