// Scenario configuration: loading, seeded resolution of unspecified values,
// validation, canonical serialization, and the two compiled-in presets
// ("example1": Van der Pol oscillators, "example2": flexible-joint
// manipulators).
//
// A scenario file is JSON. Loading RESOLVES it: every field the file omits
// is filled in, with the random ones (mu, x0, w0, r0, v0) drawn from the
// scenario seed in a fixed documented order. to_json() emits the resolved
// form, which reloads to an identical scenario (hash-equal round trip).

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "opticoord/controller.hpp"
#include "opticoord/generator.hpp"
#include "opticoord/graph.hpp"
#include "opticoord/plant.hpp"

namespace opticoord {

struct GraphConfig {
  int n_nodes = 0;
  std::vector<Edge> edges;
};

struct IntegrationParams {
  double dt = 1e-3;
  double t_end = 100.0;
  int record_every = 100;
};

struct PlantConfig {
  std::string kind;  // "vanderpol" | "flexjoint" | "chain"
  int n = 2;
  int q = 1;
  Eigen::VectorXd mu;  // resolved uncertainty draws
  Eigen::VectorXd x0;  // resolved initial plant state (n*q)
  Eigen::MatrixXd b;   // q x q input gain
  bool b_known = false;
  // Flexible-joint parameters; the effective length is l0 scaled by the
  // length uncertainty, l = (1 + mu[3]) * l0.
  double j1 = 1.0, j2 = 1.0, m = 1.0, g_grav = 9.8, l0 = 1.0, k_spring = 1.0;
};

struct ObjectiveConfig {
  std::string kind;  // "example1-f1".."example1-f4" | "quadratic"
  Eigen::MatrixXd quadratic_q;
  Eigen::VectorXd quadratic_center;
};

struct ConstraintConfig {
  std::string kind;  // "interval" | "box" | "ball" | "none"
  Eigen::VectorXd lo, hi;  // interval/box
  Eigen::VectorXd center;  // ball
  double radius = 0.0;     // ball
};

struct DisturbanceConfig {
  Eigen::MatrixXd S;
  Eigen::MatrixXd D;
  Eigen::VectorXd w0;  // resolved
  bool allow_decaying_modes = false;
};

struct RbfConfig {
  int n_w = 21;
  double lo = -5.0;
  double hi = 5.0;
  double kappa = 1.62;  // resolved (default 1.5 * grid spacing)
};

struct ControllerConfig {
  std::vector<double> k;  // resolved (default: binomial coefficients)
  double ell = 0.01;
  std::string rho = "quartic";
  RbfConfig rbf;
  std::string w0_prior = "zero";
  double theta0 = 0.0;
};

struct InternalModelConfig {
  Eigen::MatrixXd F, G;  // resolved (designed from poles when not given)
};

struct GeneratorConfig {
  Eigen::VectorXd r0, v0;  // resolved
};

struct AgentScenario {
  PlantConfig plant;
  ObjectiveConfig objective;
  ConstraintConfig constraint;
  DisturbanceConfig disturbance;
  ControllerConfig controller;
  InternalModelConfig internal_model;
  GeneratorConfig generator;
};

class Scenario {
 public:
  // Parses and resolves. Throws std::invalid_argument with a field path on
  // malformed input.
  static Scenario from_json(const nlohmann::json& j);
  // Reads a file; throws IoError (see io.hpp) when unreadable.
  static Scenario load(const std::string& path);

  static bool is_preset(const std::string& name);
  static Scenario preset(const std::string& name);
  static std::vector<std::string> preset_names();

  const std::string& name() const { return name_; }
  std::uint64_t seed() const { return seed_; }
  const GraphConfig& graph() const { return graph_; }
  const IntegrationParams& integration() const { return integration_; }
  IntegrationParams& integration() { return integration_; }
  int n_agents() const { return static_cast<int>(agents_.size()); }
  const std::vector<AgentScenario>& agents() const { return agents_; }
  std::vector<AgentScenario>& agents() { return agents_; }

  // Canonical resolved form; reloading it yields an identical scenario.
  nlohmann::json to_json() const;
  // FNV-1a over the canonical (sorted-key, unindented) JSON text.
  std::uint64_t config_hash() const;

  // Collects every validation failure (empty result = valid): graph
  // connectivity, Hurwitz stabilizer and internal-model checks, objective
  // bound sampling, nonempty constraint intersection, integration sanity.
  std::vector<std::string> validate() const;

  // Typed builders (throw on inconsistent configuration).
  WeightedGraph build_graph() const;
  AgentSpec build_agent_spec(int i) const;
  StabilizerCoeffs build_stabilizer(int i) const;
  RbfNetwork build_rbf(int i) const;
  GainFunction build_gain(int i) const;
  InternalModel build_internal_model(int i) const;
  GeneratorProblem build_generator_problem() const;

 private:
  Scenario() = default;

  std::string name_ = "scenario";
  std::uint64_t seed_ = 1;
  GraphConfig graph_;
  IntegrationParams integration_;
  std::vector<AgentScenario> agents_;
};

std::uint64_t fnv1a(const std::string& text);

}  // namespace opticoord
