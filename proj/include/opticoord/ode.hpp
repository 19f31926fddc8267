// Classical fixed-step fourth-order Runge-Kutta. Fixed stepping keeps runs
// deterministic, which the acceptance metrics rely on; stiff/adaptive
// solvers are out of scope.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace opticoord {

// Raised when a trajectory leaves the |entry| <= 1e9 guard band or turns
// non-finite; `where` names the offending agent and subsystem when known.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double t, std::string where)
      : std::runtime_error("state diverged at t = " + std::to_string(t) + " (" + where + ")"),
        t_(t), where_(std::move(where)) {}

  double time() const { return t_; }
  const std::string& where() const { return where_; }

 private:
  double t_;
  std::string where_;
};

struct Rk4Workspace {
  Eigen::VectorXd k1, k2, k3, k4, xtmp;

  void resize(Eigen::Index n) {
    if (k1.size() == n) return;
    k1.resize(n);
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    xtmp.resize(n);
  }
};

// One RK4 step in place. rhs must have signature
//   void(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dxdt).
template <class Rhs>
void rk4_step(Rhs&& rhs, double t, double dt, Eigen::VectorXd& x, Rk4Workspace& ws) {
  ws.resize(x.size());
  rhs(t, x, ws.k1);
  ws.xtmp = x + (0.5 * dt) * ws.k1;
  rhs(t + 0.5 * dt, ws.xtmp, ws.k2);
  ws.xtmp = x + (0.5 * dt) * ws.k2;
  rhs(t + 0.5 * dt, ws.xtmp, ws.k3);
  ws.xtmp = x + dt * ws.k3;
  rhs(t + dt, ws.xtmp, ws.k4);
  x += (dt / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
}

// Number of RK4 steps covering [0, t_end]; tolerant of t_end/dt landing a
// hair under an integer in floating point.
inline std::int64_t step_count(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= dt)) throw std::invalid_argument("step_count: need 0 < dt <= t_end");
  return static_cast<std::int64_t>(std::floor(t_end / dt + 1e-9));
}

}  // namespace opticoord
