#include <doctest.h>

#include <cmath>

#include "opticoord/controller.hpp"

using namespace opticoord;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

InternalModel benchmark_im() {
  Eigen::MatrixXd f(2, 2);
  f << -2, 1, -1, 0;
  Eigen::MatrixXd g(2, 1);
  g << -2, 0;
  return internal_model_from_matrices(f, g, 1);
}

}  // namespace

TEST_CASE("hurwitz_check classifies polynomials by their roots") {
  CHECK(hurwitz_check({2.0, 3.0}));        // s^2 + 3s + 2: roots -1, -2
  CHECK(hurwitz_check({1.0}));             // s + 1
  CHECK(hurwitz_check({1.0, 3.0, 3.0}));   // (s + 1)^3
  CHECK_FALSE(hurwitz_check({-1.0}));      // s - 1
  CHECK_FALSE(hurwitz_check({1.0, 0.0}));  // s^2 + 1: imaginary axis
  CHECK_FALSE(hurwitz_check({-2.0, 1.0})); // root at +1
}

TEST_CASE("stabilizer coefficients validate and default to binomials") {
  const StabilizerCoeffs k({1.0, 3.0, 3.0});
  CHECK(k.order() == 4);

  CHECK_THROWS_AS(StabilizerCoeffs({-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(StabilizerCoeffs({}), std::invalid_argument);

  const StabilizerCoeffs b4 = StabilizerCoeffs::binomial(4);
  REQUIRE(b4.k().size() == 3);
  CHECK(b4.k()[0] == doctest::Approx(1.0));
  CHECK(b4.k()[1] == doctest::Approx(3.0));
  CHECK(b4.k()[2] == doctest::Approx(3.0));

  const StabilizerCoeffs b2 = StabilizerCoeffs::binomial(2);
  REQUIRE(b2.k().size() == 1);
  CHECK(b2.k()[0] == doctest::Approx(1.0));
}

TEST_CASE("zeta combines tracking error and higher derivatives") {
  // n = 4, k = (1, 3, 3), x = (1, 2, 3, 4), r = 0.5:
  // zeta = 1*(1 - 0.5) + 3*2 + 3*3 + 4 = 19.5.
  const StabilizerCoeffs k({1.0, 3.0, 3.0});
  CHECK(zeta(vec({1, 2, 3, 4}), vec({0.5}), k)(0) == doctest::Approx(19.5));

  // n = 2 degenerates to zeta = k_1 (x - r) + x'.
  const StabilizerCoeffs k2({1.0});
  CHECK(zeta(vec({1.5, -0.25}), vec({2.0}), k2)(0) == doctest::Approx(-0.75));

  Eigen::VectorXd out(1);
  zeta_into(vec({1, 2, 3, 4}), vec({0.5}), k, out);
  CHECK(out(0) == doctest::Approx(19.5));
}

TEST_CASE("zeta handles q = 2 blocks") {
  const StabilizerCoeffs k({2.0});
  // x = ((1,2),(3,4)), r = (0,1): zeta = 2*((1,2)-(0,1)) + (3,4) = (5, 6).
  const Eigen::VectorXd z = zeta(vec({1, 2, 3, 4}), vec({0, 1}), k);
  CHECK(z(0) == doctest::Approx(5.0));
  CHECK(z(1) == doctest::Approx(6.0));
}

TEST_CASE("RBF grid centers and activations") {
  // 21 centers on [-5, 5]: spacing 0.5, centers 0.5*(j - 11) for j = 1..21.
  const RbfNetwork net = RbfNetwork::grid1d(21, -5.0, 5.0);
  CHECK(net.n_w() == 21);
  CHECK(net.q() == 1);
  CHECK(net.centers()(0, 0) == doctest::Approx(-5.0));
  CHECK(net.centers()(0, 10) == doctest::Approx(0.0));
  CHECK(net.centers()(0, 20) == doctest::Approx(5.0));
  CHECK(net.width() == doctest::Approx(0.75));  // default 1.5 * spacing

  // Activation is exp(-dist^2 / kappa^2): 1 at a center, e^{-1} at
  // distance kappa.
  const Eigen::VectorXd sigma = net.activations(vec({0.0}));
  CHECK(sigma(10) == doctest::Approx(1.0));
  const Eigen::VectorXd at_width = net.activations(vec({0.75}));
  CHECK(at_width(10) == doctest::Approx(std::exp(-1.0)));

  Eigen::VectorXd out(21);
  net.activations_into(vec({0.75}), out);
  CHECK((out - at_width).norm() == doctest::Approx(0.0));
}

TEST_CASE("RBF constructors validate their arguments") {
  CHECK_THROWS_AS(RbfNetwork::grid1d(0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(RbfNetwork::grid1d(5, 2.0, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(RbfNetwork(Eigen::MatrixXd::Zero(1, 3), 0.0), std::invalid_argument);

  // A single neuron sits at the interval midpoint.
  const RbfNetwork lone = RbfNetwork::grid1d(1, -1.0, 3.0);
  CHECK(lone.centers()(0, 0) == doctest::Approx(1.0));

  // Tensor grid over a 2-D box.
  const RbfNetwork grid = RbfNetwork::tensor_grid({3, 3}, vec({-1, -1}), vec({1, 1}));
  CHECK(grid.n_w() == 9);
  CHECK(grid.q() == 2);
  CHECK(grid.activations(vec({0, 0})).size() == 9);
}

TEST_CASE("quartic damping gain") {
  const GainFunction rho = GainFunction::quartic();
  CHECK(rho.name() == "quartic");
  CHECK(rho(vec({0.0})) == doctest::Approx(1.0));
  CHECK(rho(vec({1.0})) == doctest::Approx(2.0));
  CHECK(rho(vec({3, 4})) == doctest::Approx(626.0));  // 5^4 + 1
}

TEST_CASE("control law arithmetic on a tiny network") {
  // Two neurons with centers at 0 and at the query point r = 1 so that
  // sigma = (exp(-1/kappa^2), 1) with kappa = 1: sigma = (e^{-1}, 1).
  Eigen::MatrixXd centers(1, 2);
  centers << 0.0, 1.0;
  const RbfNetwork net(centers, 1.0);

  AdaptiveState adaptive = AdaptiveState::zeros(2, 1, 0.1);
  adaptive.W(0, 0) = 2.0;
  adaptive.W(1, 0) = -1.0;
  adaptive.theta = 0.5;

  const InternalModel im = benchmark_im();
  Eigen::VectorXd eta = vec({0.4, 9.0});
  const Eigen::VectorXd z = vec({1.0});

  // u = -(2 e^{-1} - 1) - 0.5 * (1 + 1) * 1 - 0.4.
  const Eigen::VectorXd u = control(adaptive, net, GainFunction::quartic(), z, vec({1.0}), im, eta);
  CHECK(u(0) == doctest::Approx(-(2.0 * std::exp(-1.0) - 1.0) - 1.0 - 0.4).epsilon(1e-12));
}

TEST_CASE("adaptive laws with leakage toward the prior") {
  Eigen::MatrixXd centers(1, 2);
  centers << 0.0, 1.0;
  const RbfNetwork net(centers, 1.0);

  AdaptiveState adaptive = AdaptiveState::zeros(2, 1, 0.5);
  adaptive.W(0, 0) = 1.0;
  adaptive.W0(1, 0) = 2.0;
  adaptive.theta = 3.0;
  adaptive.theta0 = 1.0;

  const Eigen::VectorXd z = vec({1.0});
  const auto [w_dot, theta_dot] = adaptive_rhs(adaptive, net, GainFunction::quartic(), z, vec({1.0}));

  // W_dot = -0.5 (W - W0) + sigma zeta^T with sigma = (e^{-1}, 1).
  CHECK(w_dot(0, 0) == doctest::Approx(-0.5 * 1.0 + std::exp(-1.0)).epsilon(1e-12));
  CHECK(w_dot(1, 0) == doctest::Approx(-0.5 * (0.0 - 2.0) + 1.0).epsilon(1e-12));

  // theta_dot = -0.5 (3 - 1) + rho(zeta) |zeta|^2 = -1 + 2 = 1.
  CHECK(theta_dot == doctest::Approx(1.0));

  // At the prior with zeta = 0 nothing moves.
  AdaptiveState at_rest = AdaptiveState::zeros(2, 1, 0.5);
  const auto [w0_dot, theta0_dot] =
      adaptive_rhs(at_rest, net, GainFunction::quartic(), vec({0.0}), vec({1.0}));
  CHECK(w0_dot.norm() == doctest::Approx(0.0));
  CHECK(theta0_dot == doctest::Approx(0.0));
}

TEST_CASE("nn_approximation_error measures the feedforward target") {
  // Chain plant with g = 0: the target is zero, so the error is -W^T sigma.
  AgentSpec spec("chain", 2, 1, zero_nonlinearity(), Eigen::VectorXd(),
                 Eigen::MatrixXd::Identity(1, 1), false, ExosystemSpec::none(1),
                 LocalObjective::example1(1), ConvexSet::whole_space(1), Eigen::VectorXd::Zero(2));
  Eigen::MatrixXd centers(1, 1);
  centers << 2.0;
  const RbfNetwork net(centers, 1.0);
  Eigen::MatrixXd w(1, 1);
  w << 1.5;
  CHECK(nn_approximation_error(spec, net, w, vec({2.0}))(0) == doctest::Approx(-1.5));

  // Van der Pol at rest point r: target g((r, 0), mu) = -(1 + mu_1) r.
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(4);
  mu(0) = 0.25;
  AgentSpec vdp("vanderpol", 2, 1, vanderpol_nonlinearity(), mu, Eigen::MatrixXd::Identity(1, 1),
                false, ExosystemSpec::none(1), LocalObjective::example1(1),
                ConvexSet::whole_space(1), Eigen::VectorXd::Zero(2));
  Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(1, 1);
  CHECK(nn_approximation_error(vdp, net, w0, vec({2.0}))(0) == doctest::Approx(-1.25 * 2.0));
}
