#include "opticoord/generator.hpp"

#include <stdexcept>

#include "opticoord/ode.hpp"

namespace opticoord {

GeneratorProblem::GeneratorProblem(const WeightedGraph& graph, std::vector<LocalObjective> objs,
                                   std::vector<ConvexSet> constraint_sets)
    : laplacian(LaplacianMatrix(graph)), objectives(std::move(objs)), sets(std::move(constraint_sets)) {
  n_agents = graph.size();
  if (static_cast<int>(objectives.size()) != n_agents ||
      static_cast<int>(sets.size()) != n_agents)
    throw std::invalid_argument("GeneratorProblem: need one objective and one set per node");
  q = objectives.front().dimension();
  for (int i = 0; i < n_agents; ++i) {
    if (objectives[i].dimension() != q || sets[i].dimension() != q)
      throw std::invalid_argument("GeneratorProblem: all objectives/sets must share dimension q");
  }
}

GeneratorState generator_rhs(const GeneratorState& state, const LaplacianMatrix& laplacian,
                             const std::vector<LocalObjective>& objectives,
                             const std::vector<ConvexSet>& sets) {
  const int n = laplacian.size();
  if (static_cast<int>(state.r.size()) != n || static_cast<int>(state.v.size()) != n ||
      static_cast<int>(objectives.size()) != n || static_cast<int>(sets.size()) != n)
    throw std::invalid_argument("generator_rhs: need N entries of each argument");

  GeneratorState deriv;
  deriv.r.resize(n);
  deriv.v.resize(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd arg = state.r[i] - objectives[i].gradient(state.r[i]) -
                          laplacian.neighbor_sum(i, state.r) -
                          laplacian.neighbor_sum(i, state.v);
    sets[i].project_in_place(arg);
    deriv.r[i] = -2.0 * state.r[i] + 2.0 * arg;
    deriv.v[i] = state.r[i];
  }
  return deriv;
}

void generator_rhs_agent(int i, const GeneratorProblem& problem,
                         const Eigen::Ref<const Eigen::VectorXd>& stacked_r,
                         const Eigen::Ref<const Eigen::VectorXd>& stacked_v,
                         Eigen::Ref<Eigen::VectorXd> r_dot, Eigen::Ref<Eigen::VectorXd> v_dot,
                         Eigen::Ref<Eigen::VectorXd> scratch) {
  const int q = problem.q;
  const auto r_i = stacked_r.segment(static_cast<Eigen::Index>(i) * q, q);

  // Projection argument r_i - grad f_i(r_i) - sum_j a_ij (r_i - r_j)
  //                     - sum_j a_ij (v_i - v_j), assembled in place.
  problem.laplacian.neighbor_sum_stacked(i, stacked_r, q, scratch);
  scratch = r_i - scratch;
  scratch -= problem.objectives[static_cast<std::size_t>(i)].gradient(r_i);
  {
    // v neighbor sum reuses r_dot as a temporary before it is overwritten.
    problem.laplacian.neighbor_sum_stacked(i, stacked_v, q, r_dot);
    scratch -= r_dot;
  }
  problem.sets[static_cast<std::size_t>(i)].project_in_place(scratch);

  r_dot = -2.0 * r_i + 2.0 * scratch;
  v_dot = r_i;
}

double consensus_residual(const Eigen::Ref<const Eigen::VectorXd>& stacked_r, int n_agents, int q) {
  if (stacked_r.size() != static_cast<Eigen::Index>(n_agents) * q)
    throw std::invalid_argument("consensus_residual: stacked vector must have dimension q*N");
  double worst = 0.0;
  for (int i = 0; i < n_agents; ++i)
    for (int j = i + 1; j < n_agents; ++j)
      worst = std::max(worst, (stacked_r.segment(static_cast<Eigen::Index>(i) * q, q) -
                               stacked_r.segment(static_cast<Eigen::Index>(j) * q, q))
                                  .norm());
  return worst;
}

GeneratorRun run_generator(const GeneratorProblem& problem, const Eigen::VectorXd& r0,
                           const Eigen::VectorXd& v0, double t_end, double dt, int record_every,
                           const std::optional<Eigen::VectorXd>& y_star) {
  const int n = problem.n_agents;
  const int q = problem.q;
  const Eigen::Index qn = static_cast<Eigen::Index>(q) * n;
  if (r0.size() != qn || v0.size() != qn)
    throw std::invalid_argument("run_generator: r0 and v0 must have dimension q*N");
  if (record_every < 1) throw std::invalid_argument("run_generator: record_every must be >= 1");
  if (y_star && y_star->size() != q)
    throw std::invalid_argument("run_generator: y_star must have dimension q");

  Eigen::VectorXd x(2 * qn);
  x.head(qn) = r0;
  x.tail(qn) = v0;

  auto rhs = [&problem, qn, n, q](double, const Eigen::VectorXd& state, Eigen::VectorXd& dxdt) {
    const auto stacked_r = state.head(qn);
    const auto stacked_v = state.tail(qn);
    Eigen::VectorXd scratch(q);
    for (int i = 0; i < n; ++i) {
      const Eigen::Index off = static_cast<Eigen::Index>(i) * q;
      generator_rhs_agent(i, problem, stacked_r, stacked_v, dxdt.segment(off, q),
                          dxdt.segment(qn + off, q), scratch);
    }
  };

  GeneratorRun run;
  auto record = [&](double t) {
    run.times.push_back(t);
    run.r_snapshots.emplace_back(x.head(qn));
    run.v_snapshots.emplace_back(x.tail(qn));
    run.consensus.push_back(consensus_residual(x.head(qn), n, q));
    if (y_star) {
      double worst = 0.0;
      for (int i = 0; i < n; ++i)
        worst = std::max(worst, (x.segment(static_cast<Eigen::Index>(i) * q, q) - *y_star).norm());
      run.distance_to_ystar.push_back(worst);
    }
  };

  const std::int64_t steps = step_count(t_end, dt);
  Rk4Workspace ws;
  record(0.0);
  for (std::int64_t s = 1; s <= steps; ++s) {
    rk4_step(rhs, (s - 1) * dt, dt, x, ws);
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e9) {
      Eigen::Index worst;
      x.cwiseAbs().maxCoeff(&worst);
      const int agent = static_cast<int>((worst % qn) / q) + 1;
      const char* part = worst < qn ? "generator state r" : "generator state v";
      throw DivergenceError(s * dt, "agent " + std::to_string(agent) + ", " + part);
    }
    if (s % record_every == 0) record(s * dt);
  }
  return run;
}

}  // namespace opticoord
