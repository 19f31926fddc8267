#include <doctest.h>

#include <cmath>

#include "opticoord/plant.hpp"

using namespace opticoord;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

AgentSpec chain_spec(int n, Eigen::MatrixXd b, bool b_known) {
  return AgentSpec("chain", n, 1, zero_nonlinearity(), Eigen::VectorXd(), std::move(b), b_known,
                   ExosystemSpec::none(1), LocalObjective::example1(1), ConvexSet::whole_space(1),
                   Eigen::VectorXd::Zero(n));
}

}  // namespace

TEST_CASE("Van der Pol nonlinearity closed-form values") {
  // mu = 0: g = -x + (0 - x^2) x'.
  CHECK(vanderpol_g(vec({1, 1}), Eigen::VectorXd::Zero(3)) == doctest::Approx(-2.0));
  CHECK(vanderpol_g(vec({1, 0}), Eigen::VectorXd::Zero(3)) == doctest::Approx(-1.0));

  // Frozen against an independent evaluation: mu = (0.1, -0.2, 0.3),
  // x = (0.7, -1.1): -(1.1)(0.7) + (0.8)(0.3 - 0.49)(-1.1) = -0.6028.
  Eigen::VectorXd mu = vec({0.1, -0.2, 0.3});
  CHECK(vanderpol_g(vec({0.7, -1.1}), mu) == doctest::Approx(-0.6028).epsilon(1e-12));
}

TEST_CASE("flexible-joint nonlinearity closed-form values") {
  FlexJointParams p;  // all ones, g_grav = 9.8

  // At the origin every term carries a factor of x'' or sin x.
  CHECK(flexjoint_g(vec({0, 0, 0, 0}), p) == doctest::Approx(0.0));

  // At x = pi/2 with zero derivatives: (MgL/J1)(x'^2 - k/J2) sin x = -9.8.
  CHECK(flexjoint_g(vec({M_PI / 2, 0, 0, 0}), p) == doctest::Approx(-9.8).epsilon(1e-12));

  // Frozen general point: x = (0.3, 0.2, 0.1, anything).
  CHECK(flexjoint_g(vec({0.3, 0.2, 0.1, 7.0}), p) == doctest::Approx(-3.91648386361298).epsilon(1e-9));

  // Chain-form input gain b = k / (J1 J2).
  FlexJointParams scaled;
  scaled.j1 = 2.0;
  scaled.j2 = 0.5;
  scaled.k = 3.0;
  CHECK(scaled.b() == doctest::Approx(3.0));
}

TEST_CASE("plant_rhs shifts the chain and drives the last block") {
  const AgentSpec spec = chain_spec(2, Eigen::MatrixXd::Identity(1, 1), false);
  // x = (1, 2), u = 3, d = 4: derivative (2, 0 + 3 + 4) = (2, 7).
  const Eigen::VectorXd dx = plant_rhs(spec, vec({1, 2}), vec({3}), vec({4}));
  CHECK(dx(0) == doctest::Approx(2.0));
  CHECK(dx(1) == doctest::Approx(7.0));

  Eigen::VectorXd out(2);
  plant_rhs_into(spec, vec({1, 2}), vec({3}), vec({4}), out);
  CHECK((out - dx).norm() == doctest::Approx(0.0));
}

TEST_CASE("input gain b scales the control channel only") {
  Eigen::MatrixXd b(1, 1);
  b << 2.5;
  const AgentSpec spec = chain_spec(2, b, true);
  const Eigen::VectorXd dx = plant_rhs(spec, vec({0, 0}), vec({2}), vec({0}));
  CHECK(dx(1) == doctest::Approx(5.0));
  CHECK(spec.b_inverse()(0, 0) == doctest::Approx(0.4));
}

TEST_CASE("vanderpol agent rhs composes g, b, u, and d") {
  const Eigen::VectorXd mu = vec({0.1, -0.2, 0.3, 0.0});
  AgentSpec spec("vanderpol", 2, 1, vanderpol_nonlinearity(), mu,
                 Eigen::MatrixXd::Identity(1, 1), false, ExosystemSpec::none(1),
                 LocalObjective::example1(2), ConvexSet::interval(-1, 3), vec({0.7, -1.1}));
  const Eigen::VectorXd dx = plant_rhs(spec, vec({0.7, -1.1}), vec({0.5}), vec({-0.25}));
  CHECK(dx(0) == doctest::Approx(-1.1));
  CHECK(dx(1) == doctest::Approx(-0.6028 + 0.5 - 0.25).epsilon(1e-12));

  // eval_g / g agree.
  Eigen::VectorXd g_out(1);
  spec.eval_g(vec({0.7, -1.1}), g_out);
  CHECK(g_out(0) == doctest::Approx(spec.g(vec({0.7, -1.1}))(0)));
}

TEST_CASE("flexjoint agent spec with n = 4") {
  FlexJointParams p;
  p.l = 1.2;  // length uncertainty already applied
  AgentSpec spec("flexjoint", 4, 1, flexjoint_nonlinearity(p), Eigen::VectorXd::Zero(5),
                 Eigen::MatrixXd::Identity(1, 1) * p.b(), false, ExosystemSpec::none(1),
                 LocalObjective::example1(1), ConvexSet::whole_space(1), vec({0.6, 0, 0, 0}));
  CHECK(spec.state_dim() == 4);
  const Eigen::VectorXd dx = plant_rhs(spec, vec({0.6, 0, 0, 0}), vec({0}), vec({0}));
  CHECK(dx(0) == doctest::Approx(0.0));
  CHECK(dx(1) == doctest::Approx(0.0));
  CHECK(dx(2) == doctest::Approx(0.0));
  // Last block is pure g at zero input: (MgL/J1)(0 - k/J2) sin(0.6).
  CHECK(dx(3) == doctest::Approx(spec.g(vec({0.6, 0, 0, 0}))(0)));
}

TEST_CASE("spec construction validates dimensions") {
  // x0 of the wrong length.
  CHECK_THROWS_AS(AgentSpec("chain", 2, 1, zero_nonlinearity(), Eigen::VectorXd(),
                            Eigen::MatrixXd::Identity(1, 1), false, ExosystemSpec::none(1),
                            LocalObjective::example1(1), ConvexSet::whole_space(1),
                            Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);
  // Singular b with b_known.
  CHECK_THROWS_AS(AgentSpec("chain", 2, 1, zero_nonlinearity(), Eigen::VectorXd(),
                            Eigen::MatrixXd::Zero(1, 1), true, ExosystemSpec::none(1),
                            LocalObjective::example1(1), ConvexSet::whole_space(1),
                            Eigen::VectorXd::Zero(2)),
                  std::invalid_argument);
}
