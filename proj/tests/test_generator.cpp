#include <doctest.h>

#include <cmath>
#include <random>

#include "opticoord/generator.hpp"
#include "opticoord/ode.hpp"

using namespace opticoord;

namespace {

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

// Quadratic (y - c)^2 as a LocalObjective (scalar).
LocalObjective quad1(double c) {
  return LocalObjective::quadratic(2.0 * Eigen::MatrixXd::Identity(1, 1), vec1(c));
}

GeneratorProblem single_agent_problem() {
  const WeightedGraph g(Eigen::MatrixXd::Zero(1, 1));
  std::vector<LocalObjective> objectives;
  objectives.push_back(quad1(8.0));
  std::vector<ConvexSet> sets;
  sets.push_back(ConvexSet::whole_space(1));
  return GeneratorProblem(g, std::move(objectives), std::move(sets));
}

GeneratorProblem benchmark_problem() {
  const WeightedGraph g =
      WeightedGraph::from_edges(4, {{1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {1, 3, 1.0}});
  std::vector<LocalObjective> objectives;
  std::vector<ConvexSet> sets;
  for (int i = 1; i <= 4; ++i) {
    objectives.push_back(LocalObjective::example1(i));
    sets.push_back(ConvexSet::interval(-3.0 + i, 1.0 + i));
  }
  return GeneratorProblem(g, std::move(objectives), std::move(sets));
}

}  // namespace

TEST_CASE("single unconstrained agent follows the closed-form flow") {
  // With f(r) = (r - 8)^2 and no projection the flow collapses to
  // r' = -2 grad f = -4 (r - 8), so r(t) = 8 (1 - e^{-4t}) from r(0) = 0.
  const GeneratorProblem problem = single_agent_problem();
  const GeneratorRun run =
      run_generator(problem, vec1(0.0), vec1(0.0), 0.5, 1e-4, 500);

  REQUIRE(run.times.size() >= 2);
  CHECK(run.times.back() == doctest::Approx(0.5));
  // Frozen closed form: 8 (1 - e^{-2}) = 6.917317734107098.
  CHECK(run.terminal_r()(0) == doctest::Approx(6.917317734107098).epsilon(1e-9));
  CHECK(run.terminal_consensus() == doctest::Approx(0.0));
}

TEST_CASE("projection pins the flow at an active bound") {
  // Same objective but constrained to [0, 5]: equilibrium at the bound.
  const WeightedGraph g(Eigen::MatrixXd::Zero(1, 1));
  std::vector<LocalObjective> objectives;
  objectives.push_back(quad1(8.0));
  std::vector<ConvexSet> sets;
  sets.push_back(ConvexSet::interval(0.0, 5.0));
  const GeneratorProblem problem(g, std::move(objectives), std::move(sets));

  const GeneratorRun run = run_generator(problem, vec1(1.0), vec1(0.0), 10.0, 1e-3, 1000);
  CHECK(run.terminal_r()(0) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("stacked per-agent flavor matches the vector-of-vectors reference") {
  const GeneratorProblem problem = benchmark_problem();
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> dist(-3.0, 6.0);

  for (int trial = 0; trial < 200; ++trial) {
    GeneratorState state;
    Eigen::VectorXd stacked_r(4), stacked_v(4);
    for (int i = 0; i < 4; ++i) {
      const double ri = dist(rng), vi = dist(rng);
      state.r.push_back(vec1(ri));
      state.v.push_back(vec1(vi));
      stacked_r(i) = ri;
      stacked_v(i) = vi;
    }

    const GeneratorState ref =
        generator_rhs(state, problem.laplacian, problem.objectives, problem.sets);

    Eigen::VectorXd r_dot(1), v_dot(1), scratch(1);
    for (int i = 0; i < 4; ++i) {
      generator_rhs_agent(i, problem, stacked_r, stacked_v, r_dot, v_dot, scratch);
      CHECK(r_dot(0) == doctest::Approx(ref.r[i](0)).epsilon(1e-14));
      CHECK(v_dot(0) == doctest::Approx(ref.v[i](0)).epsilon(1e-14));
    }
  }
}

TEST_CASE("generator flow equations hold at a hand-checked point") {
  // Agent 1 of the benchmark at r = (1, 2, 3, 4), v = 0:
  // neighbor sum over edges {1-2, 1-3} is (1-2) + (1-3) = -3;
  // grad f_1(1) = 2 (1 - 8) = -14; projection argument 1 + 14 + 3 = 18,
  // clipped to Omega_1 = [-2, 2] gives 2; r_dot = -2*1 + 2*2 = 2.
  const GeneratorProblem problem = benchmark_problem();
  Eigen::VectorXd r(4), v = Eigen::VectorXd::Zero(4);
  r << 1, 2, 3, 4;
  Eigen::VectorXd r_dot(1), v_dot(1), scratch(1);
  generator_rhs_agent(0, problem, r, v, r_dot, v_dot, scratch);
  CHECK(r_dot(0) == doctest::Approx(2.0));
  CHECK(v_dot(0) == doctest::Approx(1.0));  // v_i' = r_i
}

TEST_CASE("benchmark generator reaches constrained consensus at y* = 2") {
  const GeneratorProblem problem = benchmark_problem();
  Eigen::VectorXd r0(4), v0 = Eigen::VectorXd::Zero(4);
  r0 << 1.0, 1.5, 2.5, 0.5;  // inside the respective intervals

  const GeneratorRun run =
      run_generator(problem, r0, v0, 100.0, 1e-3, 1000, vec1(2.0).eval());

  CHECK(run.terminal_consensus() < 1e-3);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(run.terminal_r()(i) - 2.0) < 1e-3);
  REQUIRE(!run.distance_to_ystar.empty());
  CHECK(run.distance_to_ystar.back() < 1e-3);
  // Distance decreases from start to finish.
  CHECK(run.distance_to_ystar.back() < run.distance_to_ystar.front());
}

TEST_CASE("run_generator records at the requested cadence") {
  const GeneratorProblem problem = single_agent_problem();
  const GeneratorRun run = run_generator(problem, vec1(0.0), vec1(0.0), 1.0, 0.01, 10);
  // 100 steps, snapshot at step 0 and every 10th: 11 rows.
  CHECK(run.times.size() == 11);
  CHECK(run.times.front() == doctest::Approx(0.0));
  CHECK(run.times.back() == doctest::Approx(1.0));
  CHECK(run.r_snapshots.size() == 11);
  CHECK(run.v_snapshots.size() == 11);
  CHECK(run.consensus.size() == 11);
  CHECK(run.distance_to_ystar.empty());
}

TEST_CASE("consensus_residual is the max pairwise distance") {
  Eigen::VectorXd stacked(4);
  stacked << 1, 2, 4, 2.5;
  CHECK(consensus_residual(stacked, 4, 1) == doctest::Approx(3.0));

  // q = 2: two agents at (0,0) and (3,4).
  Eigen::VectorXd wide(4);
  wide << 0, 0, 3, 4;
  CHECK(consensus_residual(wide, 2, 2) == doctest::Approx(5.0));

  CHECK(consensus_residual(vec1(3.0), 1, 1) == doctest::Approx(0.0));
}

TEST_CASE("divergent flows raise DivergenceError") {
  // A concave "objective" (negative-definite quadratic disguised as custom
  // gradients) blows the flow up; the guard must fire.
  const WeightedGraph g(Eigen::MatrixXd::Zero(1, 1));
  std::vector<LocalObjective> objectives;
  objectives.push_back(LocalObjective(
      1, [](const Eigen::VectorXd& y) { return -y(0) * y(0); },
      [](const Eigen::VectorXd& y) { return Eigen::VectorXd::Constant(1, -2.0 * y(0)); }));
  std::vector<ConvexSet> sets;
  sets.push_back(ConvexSet::whole_space(1));
  const GeneratorProblem problem(g, std::move(objectives), std::move(sets));

  CHECK_THROWS_AS(run_generator(problem, vec1(1.0), vec1(0.0), 50.0, 1e-2, 100), DivergenceError);
}
