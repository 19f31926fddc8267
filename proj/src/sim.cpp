#include "opticoord/sim.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace opticoord {

namespace {

constexpr double kGuard = 1e9;

double sup_over(const std::vector<MetricRecord>& records, double t_from,
                double (MetricRecord::*pick)() const) {
  double sup = 0.0;
  for (const MetricRecord& rec : records) {
    if (rec.t >= t_from) sup = std::max(sup, (rec.*pick)());
  }
  return sup;
}

}  // namespace

double MetricRecord::max_coord_err() const {
  double m = 0.0;
  for (const AgentMetrics& a : agents) m = std::max(m, a.coord_err);
  return m;
}

double MetricRecord::max_track_err() const {
  double m = 0.0;
  for (const AgentMetrics& a : agents) m = std::max(m, a.track_err);
  return m;
}

double MetricRecord::max_abs_e_id() const {
  double m = 0.0;
  for (const AgentMetrics& a : agents) m = std::max(m, std::abs(a.e_id));
  return m;
}

double MetricRecord::max_abs_nn_err() const {
  double m = 0.0;
  for (const AgentMetrics& a : agents) m = std::max(m, std::abs(a.nn_err));
  return m;
}

double MetricRecord::max_state_inf() const {
  double m = 0.0;
  for (const AgentMetrics& a : agents) m = std::max(m, a.state_inf);
  return m;
}

double Trajectory::terminal_sup(double fraction, double (MetricRecord::*pick)() const) const {
  return sup_over(records, (1.0 - fraction) * t_end, pick);
}

ClosedLoopSystem::ClosedLoopSystem(const Scenario& scenario)
    : problem_(scenario.build_generator_problem()), integration_(scenario.integration()) {
  const int n_agents = scenario.n_agents();
  Eigen::Index offset = 0;
  for (int i = 0; i < n_agents; ++i) {
    const AgentScenario& cfg = scenario.agents()[static_cast<std::size_t>(i)];
    AgentRuntime rt{scenario.build_agent_spec(i),
                    scenario.build_stabilizer(i),
                    scenario.build_rbf(i),
                    scenario.build_gain(i),
                    scenario.build_internal_model(i),
                    Eigen::MatrixXd::Zero(cfg.controller.rbf.n_w, cfg.plant.q),
                    cfg.controller.theta0,
                    cfg.controller.ell,
                    cfg.generator.r0,
                    cfg.generator.v0,
                    {},
                    {},
                    {},
                    {},
                    {}};
    const int q = rt.spec.q();
    rt.sigma.resize(rt.net.n_w());
    rt.zeta_buf.resize(q);
    rt.u.resize(q);
    rt.d.resize(q);
    rt.scratch_q.resize(q);

    AgentLayout lay;
    lay.n = rt.spec.n();
    lay.q = q;
    lay.m = rt.spec.exosystem().state_dim();
    lay.eta_dim = rt.im.state_dim();
    lay.n_w = rt.net.n_w();
    lay.begin = offset;
    lay.x = offset;
    offset += lay.n * q;
    lay.omega = offset;
    offset += lay.m;
    lay.eta = offset;
    offset += lay.eta_dim;
    lay.w = offset;
    offset += static_cast<Eigen::Index>(lay.n_w) * q;
    lay.theta = offset;
    offset += 1;
    lay.r = offset;
    offset += q;
    lay.v = offset;
    offset += q;
    lay.end = offset;

    layout_.agents.push_back(lay);
    agents_.push_back(std::move(rt));
  }
  layout_.dim = offset;
  stacked_r_.resize(static_cast<Eigen::Index>(n_agents) * problem_.q);
  stacked_v_.resize(stacked_r_.size());

  CentralProblem central(problem_.objectives, problem_.sets);
  oracle_ = solve(central);
  y_star_ = oracle_.y_star;
}

Eigen::VectorXd ClosedLoopSystem::initial_state() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(layout_.dim);
  for (int i = 0; i < n_agents(); ++i) {
    const AgentRuntime& a = agents_[static_cast<std::size_t>(i)];
    const AgentLayout& lay = layout_.agents[static_cast<std::size_t>(i)];
    x.segment(lay.x, a.spec.state_dim()) = a.spec.x0();
    x.segment(lay.omega, lay.m) = a.spec.exosystem().w0();
    // eta stays zero.
    Eigen::Map<Eigen::MatrixXd>(x.data() + lay.w, lay.n_w, lay.q) = a.w_prior;
    x[lay.theta] = a.theta_prior;
    x.segment(lay.r, lay.q) = a.r0;
    x.segment(lay.v, lay.q) = a.v0;
  }
  return x;
}

void ClosedLoopSystem::agent_rhs(int i, double t, const Eigen::VectorXd& x,
                                 Eigen::VectorXd& dxdt) const {
  (void)t;  // the closed loop is time-invariant; the exosystem carries time
  const AgentRuntime& a = agents_[static_cast<std::size_t>(i)];
  const AgentLayout& lay = layout_.agents[static_cast<std::size_t>(i)];
  const int q = lay.q;

  const auto xs = x.segment(lay.x, static_cast<Eigen::Index>(lay.n) * q);
  const auto omega = x.segment(lay.omega, lay.m);
  const auto eta = x.segment(lay.eta, lay.eta_dim);
  const Eigen::Map<const Eigen::MatrixXd> W(x.data() + lay.w, lay.n_w, q);
  const double theta = x[lay.theta];
  const auto r = x.segment(lay.r, q);

  // Disturbance and the controller's observable signals.
  a.d.noalias() = a.spec.exosystem().D() * omega;
  a.net.activations_into(r, a.sigma);
  zeta_into(xs, r, a.stabilizer, a.zeta_buf);
  const double rho = a.gain(a.zeta_buf);

  // u = -W^T sigma(r) - theta rho(zeta) zeta - Psi eta
  a.u.noalias() = -W.transpose() * a.sigma;
  a.u.noalias() -= a.im.psi * eta;
  a.u -= (theta * rho) * a.zeta_buf;
  if (a.spec.b_known()) {
    a.scratch_q.noalias() = a.spec.b_inverse() * a.u;
    a.u = a.scratch_q;
  }

  // Plant and exosystem.
  plant_rhs_into(a.spec, xs, a.u, a.d, dxdt.segment(lay.x, static_cast<Eigen::Index>(lay.n) * q));
  dxdt.segment(lay.omega, lay.m).noalias() = a.spec.exosystem().S() * omega;

  // Internal model driven by the same applied input.
  auto eta_dot = dxdt.segment(lay.eta, lay.eta_dim);
  eta_dot.noalias() = a.im.F * eta;
  eta_dot.noalias() += a.im.G * a.u;

  // Adaptive laws.
  Eigen::Map<Eigen::MatrixXd> w_dot(dxdt.data() + lay.w, lay.n_w, q);
  w_dot = -a.ell * (W - a.w_prior);
  w_dot.noalias() += a.sigma * a.zeta_buf.transpose();
  dxdt[lay.theta] = -a.ell * (theta - a.theta_prior) + rho * a.zeta_buf.squaredNorm();

  // Generator slice (reads the gathered r/v snapshots).
  generator_rhs_agent(i, problem_, stacked_r_, stacked_v_, dxdt.segment(lay.r, q),
                      dxdt.segment(lay.v, q), a.scratch_q);
}

void ClosedLoopSystem::rhs_serial(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dxdt) const {
  dxdt.resize(layout_.dim);
  for (int i = 0; i < n_agents(); ++i) {
    const AgentLayout& lay = layout_.agents[static_cast<std::size_t>(i)];
    stacked_r_.segment(static_cast<Eigen::Index>(i) * problem_.q, problem_.q) =
        x.segment(lay.r, lay.q);
    stacked_v_.segment(static_cast<Eigen::Index>(i) * problem_.q, problem_.q) =
        x.segment(lay.v, lay.q);
  }
  for (int i = 0; i < n_agents(); ++i) agent_rhs(i, t, x, dxdt);
}

void ClosedLoopSystem::rhs(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dxdt) const {
  dxdt.resize(layout_.dim);
  const int n = n_agents();
  for (int i = 0; i < n; ++i) {
    const AgentLayout& lay = layout_.agents[static_cast<std::size_t>(i)];
    stacked_r_.segment(static_cast<Eigen::Index>(i) * problem_.q, problem_.q) =
        x.segment(lay.r, lay.q);
    stacked_v_.segment(static_cast<Eigen::Index>(i) * problem_.q, problem_.q) =
        x.segment(lay.v, lay.q);
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) agent_rhs(i, t, x, dxdt);
#else
  for (int i = 0; i < n; ++i) agent_rhs(i, t, x, dxdt);
#endif
}

Eigen::VectorXd ClosedLoopSystem::control_input(int i, const Eigen::VectorXd& x) const {
  const AgentRuntime& a = agents_[static_cast<std::size_t>(i)];
  const AgentLayout& lay = layout_.agents[static_cast<std::size_t>(i)];
  const auto xs = x.segment(lay.x, static_cast<Eigen::Index>(lay.n) * lay.q);
  const auto eta = x.segment(lay.eta, lay.eta_dim);
  const Eigen::Map<const Eigen::MatrixXd> W(x.data() + lay.w, lay.n_w, lay.q);
  const auto r = x.segment(lay.r, lay.q);

  const Eigen::VectorXd sigma = a.net.activations(r);
  const Eigen::VectorXd z = zeta(xs, r, a.stabilizer);
  Eigen::VectorXd u = -W.transpose() * sigma - x[lay.theta] * a.gain(z) * z - a.im.psi * eta;
  if (a.spec.b_known()) u = a.spec.b_inverse() * u;
  return u;
}

MetricRecord ClosedLoopSystem::metrics(double t, const Eigen::VectorXd& x) const {
  MetricRecord rec;
  rec.t = t;
  rec.agents.reserve(static_cast<std::size_t>(n_agents()));
  for (int i = 0; i < n_agents(); ++i) {
    const AgentRuntime& a = agents_[static_cast<std::size_t>(i)];
    const AgentLayout& lay = layout_.agents[static_cast<std::size_t>(i)];
    const auto y = x.segment(lay.x, lay.q);
    const auto r = x.segment(lay.r, lay.q);
    const auto omega = x.segment(lay.omega, lay.m);
    const auto eta = x.segment(lay.eta, lay.eta_dim);
    const Eigen::Map<const Eigen::MatrixXd> W(x.data() + lay.w, lay.n_w, lay.q);

    stacked_r_.segment(static_cast<Eigen::Index>(i) * problem_.q, problem_.q) = r;

    AgentMetrics m;
    m.y = y[0];
    m.r = r[0];
    m.coord_err = (y - y_star_).norm();
    m.gen_err = (r - y_star_).norm();
    m.track_err = (y - r).norm();
    const Eigen::VectorXd nn = nn_approximation_error(a.spec, a.net, W, r);
    const Eigen::VectorXd e_id = a.spec.exosystem().D() * omega - a.im.psi * eta;
    m.nn_err = lay.q == 1 ? nn[0] : nn.norm();
    m.e_id = lay.q == 1 ? e_id[0] : e_id.norm();
    m.theta = x[lay.theta];
    m.w_fro = W.norm();
    m.state_inf = x.segment(lay.begin, lay.end - lay.begin).lpNorm<Eigen::Infinity>();
    rec.agents.push_back(m);
  }
  rec.consensus = consensus_residual(stacked_r_, n_agents(), problem_.q);
  return rec;
}

void ClosedLoopSystem::check_finite(double t, const Eigen::VectorXd& x) const {
  if (x.allFinite() && x.lpNorm<Eigen::Infinity>() <= kGuard) return;
  for (int i = 0; i < n_agents(); ++i) {
    const AgentLayout& lay = layout_.agents[static_cast<std::size_t>(i)];
    struct Slice {
      Eigen::Index begin, len;
      const char* name;
    };
    const Slice slices[] = {
        {lay.x, static_cast<Eigen::Index>(lay.n) * lay.q, "plant state"},
        {lay.omega, lay.m, "exosystem state"},
        {lay.eta, lay.eta_dim, "internal model state"},
        {lay.w, static_cast<Eigen::Index>(lay.n_w) * lay.q, "NN weights"},
        {lay.theta, 1, "damping gain"},
        {lay.r, lay.q, "generator state r"},
        {lay.v, lay.q, "generator state v"},
    };
    for (const Slice& s : slices) {
      const auto seg = x.segment(s.begin, s.len);
      if (!seg.allFinite() || seg.lpNorm<Eigen::Infinity>() > kGuard) {
        throw DivergenceError(t, "agent " + std::to_string(i + 1) + " " + s.name);
      }
    }
  }
  throw DivergenceError(t, "unknown slice");
}

Trajectory ClosedLoopSystem::integrate(double t_end, double dt, int record_every) const {
  if (record_every < 1) throw std::invalid_argument("integrate: record_every must be >= 1");
  const std::int64_t steps = step_count(t_end, dt);

  Trajectory traj;
  traj.dt = dt;
  traj.t_end = t_end;
  traj.record_every = record_every;
  traj.records.reserve(static_cast<std::size_t>(steps / record_every) + 2);

  const auto started = std::chrono::steady_clock::now();
  Eigen::VectorXd x = initial_state();
  Rk4Workspace ws;
  ws.resize(layout_.dim);
  auto rhs_fn = [this](double t, const Eigen::VectorXd& s, Eigen::VectorXd& out) {
    rhs(t, s, out);
  };

  traj.records.push_back(metrics(0.0, x));
  for (std::int64_t step = 1; step <= steps; ++step) {
    rk4_step(rhs_fn, static_cast<double>(step - 1) * dt, dt, x, ws);
    const double t = static_cast<double>(step) * dt;
    check_finite(t, x);
    if (step % record_every == 0) traj.records.push_back(metrics(t, x));
  }
  traj.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return traj;
}

}  // namespace opticoord
