// Compares the OpenMP-parallel derivative evaluation against the serial
// reference on ring networks of oscillator agents of increasing size.
// Both paths must produce bitwise-identical derivatives; the table reports
// the per-evaluation cost and the speedup.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "opticoord/scenario.hpp"
#include "opticoord/sim.hpp"

using namespace opticoord;

namespace {

// Ring of n oscillator agents with quadratic objectives spread over [0, 4]
// and a shared box constraint; built programmatically to scale past the
// benchmark's four agents.
Scenario ring_scenario(int n) {
  nlohmann::json j;
  j["name"] = "ring" + std::to_string(n);
  j["seed"] = 42;
  nlohmann::json edges = nlohmann::json::array();
  for (int i = 1; i <= n; ++i) {
    edges.push_back({i, i % n + 1, 1.0});
  }
  j["graph"] = {{"n_nodes", n}, {"edges", edges}};
  j["integration"] = {{"dt", 1e-3}, {"t_end", 1.0}, {"record_every", 100}};
  nlohmann::json agents = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    nlohmann::json a;
    a["plant"] = {{"kind", "vanderpol"}};
    a["objective"] = {{"kind", "quadratic"},
                      {"Q", {{2.0}}},
                      {"center", {4.0 * i / std::max(1, n - 1)}}};
    a["constraint"] = {{"kind", "interval"}, {"lo", -5.0}, {"hi", 5.0}};
    a["disturbance"] = {{"kind", "example1"}, {"index", 1 + i % 4}};
    agents.push_back(a);
  }
  j["agents"] = agents;
  return Scenario::from_json(j);
}

double time_evals(const ClosedLoopSystem& system, bool parallel, int evals,
                  const std::vector<Eigen::VectorXd>& states, Eigen::VectorXd& sink) {
  Eigen::VectorXd dxdt(system.state_dim());
  const auto start = std::chrono::steady_clock::now();
  for (int e = 0; e < evals; ++e) {
    const Eigen::VectorXd& x = states[e % states.size()];
    if (parallel) {
      system.rhs(0.0, x, dxdt);
    } else {
      system.rhs_serial(0.0, x, dxdt);
    }
    sink += dxdt;  // defeat dead-code elimination
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled; both columns run the serial path\n");
#endif
  std::printf("%8s %10s %14s %14s %9s %9s\n", "agents", "state dim", "serial us/eval",
              "openmp us/eval", "speedup", "bitwise");

  for (int n : {4, 16, 64, 256}) {
    const Scenario scenario = ring_scenario(n);
    const ClosedLoopSystem system{scenario};

    // A few random but fixed evaluation points.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    std::vector<Eigen::VectorXd> states(4, Eigen::VectorXd(system.state_dim()));
    for (auto& x : states)
      for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = dist(rng);

    // Equivalence check before timing.
    Eigen::VectorXd a(system.state_dim()), b(system.state_dim());
    bool bitwise = true;
    for (const auto& x : states) {
      system.rhs(0.0, x, a);
      system.rhs_serial(0.0, x, b);
      for (Eigen::Index k = 0; k < a.size(); ++k) bitwise &= a[k] == b[k];
    }

    const int evals = n >= 64 ? 200 : 1000;
    Eigen::VectorXd sink = Eigen::VectorXd::Zero(system.state_dim());
    // Warm-up, then timed passes.
    time_evals(system, true, 10, states, sink);
    time_evals(system, false, 10, states, sink);
    const double t_ser = time_evals(system, false, evals, states, sink);
    const double t_par = time_evals(system, true, evals, states, sink);

    std::printf("%8d %10lld %14.2f %14.2f %9.2f %9s\n", n,
                static_cast<long long>(system.state_dim()), 1e6 * t_ser / evals,
                1e6 * t_par / evals, t_ser / t_par, bitwise ? "yes" : "NO");
    if (!bitwise) return 1;
  }
  return 0;
}
