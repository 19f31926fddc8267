// Per-agent adaptive control law:
//
//   u     = -W^T sigma(r) - theta * rho(zeta) * zeta - Psi eta
//   W_dot     = -ell (W - W0) + sigma(r) zeta^T
//   theta_dot = -ell (theta - theta0) + rho(zeta) ||zeta||^2
//
// with the filtered tracking error zeta = k_1 (x - r) + sum_{j=2}^{n-1}
// k_j x^(j-1) + x^(n-1). The Gaussian RBF vector sigma(r) approximates the
// unknown feedforward input; the internal-model term -Psi eta rejects the
// disturbance (see exosystem.hpp).

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "opticoord/exosystem.hpp"
#include "opticoord/plant.hpp"

namespace opticoord {

// True iff every root of c_0 + c_1 s + ... + c_{d-1} s^{d-1} + s^d has real
// part <= -1e-9 (roots via companion-matrix eigenvalues).
bool hurwitz_check(const std::vector<double>& monic_ascending_coeffs);

// Stabilizer gains (k_1, ..., k_{n-1}); these are precisely the ascending
// non-leading coefficients of p(lambda) = lambda^{n-1} + k_{n-1}
// lambda^{n-2} + ... + k_1, which must be Hurwitz.
class StabilizerCoeffs {
 public:
  explicit StabilizerCoeffs(std::vector<double> k);

  // Binomial defaults: coefficients of (lambda + 1)^{n-1}, e.g. (1, 3, 3)
  // for n = 4.
  static StabilizerCoeffs binomial(int n);

  const std::vector<double>& k() const { return k_; }
  int order() const { return static_cast<int>(k_.size()) + 1; }  // plant order n

 private:
  std::vector<double> k_;
};

// zeta = k_1 (x - r) + sum_{j=2}^{n-1} k_j x^(j-1) + x^(n-1), where x_stack
// holds n blocks of dimension q = dim(r).
Eigen::VectorXd zeta(const Eigen::VectorXd& x_stack, const Eigen::VectorXd& r,
                     const StabilizerCoeffs& coeffs);
void zeta_into(const Eigen::Ref<const Eigen::VectorXd>& x_stack,
               const Eigen::Ref<const Eigen::VectorXd>& r, const StabilizerCoeffs& coeffs,
               Eigen::Ref<Eigen::VectorXd> out);

// Gaussian radial basis functions sigma_j(r) = exp(-||r - c_j||^2 / kappa^2).
class RbfNetwork {
 public:
  // centers: one column per neuron (q x n_w).
  RbfNetwork(Eigen::MatrixXd centers, double width);

  // Uniform grid of n_w centers over [lo, hi] (q = 1). width <= 0 selects
  // the default 1.5 * grid spacing.
  static RbfNetwork grid1d(int n_w, double lo, double hi, double width = -1.0);
  // Tensor grid over a box for q > 1, counts per axis; same width default.
  static RbfNetwork tensor_grid(const std::vector<int>& counts, const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi, double width = -1.0);

  int n_w() const { return static_cast<int>(centers_.cols()); }
  int q() const { return static_cast<int>(centers_.rows()); }
  double width() const { return width_; }
  const Eigen::MatrixXd& centers() const { return centers_; }

  Eigen::VectorXd activations(const Eigen::VectorXd& r) const;
  void activations_into(const Eigen::Ref<const Eigen::VectorXd>& r,
                        Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  Eigen::MatrixXd centers_;
  double width_;
};

inline Eigen::VectorXd rbf_activations(const RbfNetwork& net, const Eigen::VectorXd& r) {
  return net.activations(r);
}

// Nonlinear damping gain rho; the stability argument needs rho >= 1, which
// the built-in quartic satisfies.
class GainFunction {
 public:
  static GainFunction quartic();  // rho(s) = ||s||^4 + 1
  static GainFunction custom(std::string name,
                             std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)> rho);

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& zeta) const { return rho_(zeta); }
  const std::string& name() const { return name_; }

 private:
  GainFunction(std::string name, std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)> rho)
      : name_(std::move(name)), rho_(std::move(rho)) {}

  std::string name_;
  std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)> rho_;
};

// NN weights and damping gain together with their priors and the shared
// leakage rate ell > 0.
struct AdaptiveState {
  Eigen::MatrixXd W;   // n_w x q
  double theta = 0.0;
  Eigen::MatrixXd W0;  // n_w x q prior
  double theta0 = 0.0;
  double ell = 0.01;

  static AdaptiveState zeros(int n_w, int q, double ell);
};

// u = -W^T sigma(r) - theta rho(zeta) zeta - Psi eta.
Eigen::VectorXd control(const AdaptiveState& adaptive, const RbfNetwork& net,
                        const GainFunction& gain, const Eigen::VectorXd& zeta,
                        const Eigen::VectorXd& r, const InternalModel& im,
                        const Eigen::VectorXd& eta);

// (W_dot, theta_dot) per the adaptive laws above.
std::pair<Eigen::MatrixXd, double> adaptive_rhs(const AdaptiveState& adaptive,
                                                const RbfNetwork& net, const GainFunction& gain,
                                                const Eigen::VectorXd& zeta,
                                                const Eigen::VectorXd& r);

// Realized approximation error of the feedforward target:
//   eps = g(col(r, 0, ..., 0), mu) - W^T sigma(r).
// Simulator-side diagnostic only; it uses the true g and mu, which the
// controller never sees.
Eigen::VectorXd nn_approximation_error(const AgentSpec& plant, const RbfNetwork& net,
                                       const Eigen::MatrixXd& W, const Eigen::VectorXd& r);

}  // namespace opticoord
