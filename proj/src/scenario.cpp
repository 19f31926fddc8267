#include "opticoord/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "opticoord/io.hpp"
#include "opticoord/oracle.hpp"

namespace opticoord {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw std::invalid_argument(where + ": " + message);
}

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a JSON object");
}

// Strict key checking so that typos ("el" for "ell") surface as load errors
// instead of silently falling back to defaults.
void expect_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (allowed.count(it.key()) == 0) fail(where, "unknown key '" + it.key() + "'");
  }
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

double opt_number(const json& j, const char* key, double def, const std::string& where) {
  const json* v = find(j, key);
  return v ? as_number(*v, where + "." + key) : def;
}

int opt_int(const json& j, const char* key, int def, const std::string& where) {
  const json* v = find(j, key);
  return v ? as_int(*v, where + "." + key) : def;
}

bool opt_bool(const json& j, const char* key, bool def, const std::string& where) {
  const json* v = find(j, key);
  if (!v) return def;
  if (!v->is_boolean()) fail(where + "." + key, "expected a boolean");
  return v->get<bool>();
}

std::string req_string(const json& j, const char* key, const std::string& where) {
  const json* v = find(j, key);
  if (!v || !v->is_string()) fail(where, std::string("missing string field '") + key + "'");
  return v->get<std::string>();
}

Eigen::VectorXd vec_from_json(const json& a, const std::string& where) {
  if (!a.is_array()) fail(where, "expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(a.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = as_number(a[static_cast<std::size_t>(i)], where);
  }
  return out;
}

Eigen::MatrixXd mat_from_json(const json& a, const std::string& where) {
  if (!a.is_array() || a.empty()) fail(where, "expected a nonempty array of rows");
  const std::size_t rows = a.size();
  if (!a[0].is_array() || a[0].empty()) fail(where, "expected rows to be arrays of numbers");
  const std::size_t cols = a[0].size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!a[i].is_array() || a[i].size() != cols) fail(where, "ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = as_number(a[i][j], where);
    }
  }
  return out;
}

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

// Sequential draws from the scenario seed. For every agent, in order, the
// unresolved fields consume draws as: mu, x0, w0, r0, v0. Explicit fields
// consume nothing (which shifts the draws that follow them); the resolved
// echo written next to every run is the stable, draw-free form.
class Drawer {
 public:
  explicit Drawer(std::uint64_t seed) : rng_(seed) {}

  Eigen::VectorXd uniform(int n, double a, double b) {
    std::uniform_real_distribution<double> dist(a, b);
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = dist(rng_);
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

int default_mu_count(const std::string& kind) {
  if (kind == "vanderpol") return 4;
  if (kind == "flexjoint") return 5;
  return 0;
}

// Named disturbance families; `index` selects the per-agent exosystem and
// the output row D is built from the last uncertainty draw.
void expand_disturbance(const std::string& kind, int index, const Eigen::VectorXd& mu,
                        Eigen::MatrixXd& S, Eigen::MatrixXd& D, const std::string& where) {
  if (kind == "example1") {
    if (index < 1) fail(where, "index must be >= 1");
    if (mu.size() < 4) fail(where, "disturbance kind 'example1' needs mu[3]");
    S.setZero(2, 2);
    S(0, 1) = 1.0;
    S(1, 0) = -static_cast<double>(index);
    D.setZero(1, 2);
    D(0, 0) = 1.0 + mu[3];
    return;
  }
  if (kind == "example2") {
    if (mu.size() < 5) fail(where, "disturbance kind 'example2' needs mu[4]");
    const double scale = 1.0 + mu[4];
    switch (index) {
      case 1:
        S.setZero(1, 1);
        D = Eigen::MatrixXd::Constant(1, 1, scale);
        return;
      case 2:
        S = Eigen::MatrixXd::Constant(1, 1, 1.0);
        D = Eigen::MatrixXd::Constant(1, 1, scale);
        return;
      case 3:
        S.setZero(2, 2);
        S(0, 1) = 1.0;
        S(1, 0) = -1.0;
        D.setZero(1, 2);
        D(0, 0) = scale;
        return;
      case 4:
        S.setZero(3, 3);
        S(0, 0) = 1.0;
        S(1, 2) = 2.0;
        S(2, 1) = -2.0;
        D.setZero(1, 3);
        D(0, 0) = 1.0;
        D(0, 1) = scale;
        return;
      default:
        fail(where, "disturbance kind 'example2' supports index 1..4");
    }
  }
  fail(where, "unknown disturbance kind '" + kind + "'");
}

std::vector<std::complex<double>> parse_poles(const json& a, const std::string& where) {
  if (!a.is_array() || a.empty()) fail(where, "expected a nonempty array of poles");
  std::vector<std::complex<double>> poles;
  for (const auto& p : a) {
    if (p.is_number()) {
      poles.emplace_back(p.get<double>(), 0.0);
    } else if (p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number()) {
      poles.emplace_back(p[0].get<double>(), p[1].get<double>());
    } else {
      fail(where, "poles must be numbers or [re, im] pairs");
    }
  }
  return poles;
}

LocalObjective build_objective(const ObjectiveConfig& cfg, int q, const std::string& where) {
  if (cfg.kind.rfind("example1-f", 0) == 0) {
    if (q != 1) fail(where, "objective kind '" + cfg.kind + "' is one-dimensional");
    const std::string tail = cfg.kind.substr(10);
    if (tail.size() != 1 || tail[0] < '1' || tail[0] > '4') {
      fail(where, "unknown objective kind '" + cfg.kind + "'");
    }
    return LocalObjective::example1(tail[0] - '0');
  }
  if (cfg.kind == "quadratic") {
    if (cfg.quadratic_q.rows() != q || cfg.quadratic_center.size() != q) {
      fail(where, "quadratic objective needs Q (q x q) and center (q)");
    }
    return LocalObjective::quadratic(cfg.quadratic_q, cfg.quadratic_center);
  }
  fail(where, "unknown objective kind '" + cfg.kind + "'");
}

ConvexSet build_constraint(const ConstraintConfig& cfg, int q, const std::string& where) {
  if (cfg.kind == "none") return ConvexSet::whole_space(q);
  if (cfg.kind == "interval") {
    if (q != 1) fail(where, "interval constraints are one-dimensional; use a box");
    return ConvexSet::interval(cfg.lo[0], cfg.hi[0]);
  }
  if (cfg.kind == "box") {
    if (cfg.lo.size() != q || cfg.hi.size() != q) fail(where, "box bounds must have dimension q");
    return ConvexSet::box(cfg.lo, cfg.hi);
  }
  if (cfg.kind == "ball") {
    if (cfg.center.size() != q) fail(where, "ball center must have dimension q");
    return ConvexSet::ball(cfg.center, cfg.radius);
  }
  fail(where, "unknown constraint kind '" + cfg.kind + "'");
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= static_cast<std::uint64_t>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  expect_object(j, "scenario");
  expect_keys(j, {"name", "seed", "graph", "integration", "agents"}, "scenario");

  Scenario s;
  if (const json* v = find(j, "name")) {
    if (!v->is_string()) fail("scenario.name", "expected a string");
    s.name_ = v->get<std::string>();
  }
  if (const json* v = find(j, "seed")) {
    if (!v->is_number_integer()) fail("scenario.seed", "expected an integer");
    s.seed_ = v->get<std::uint64_t>();
  }

  const json* graph = find(j, "graph");
  if (!graph) fail("scenario", "missing 'graph'");
  expect_object(*graph, "scenario.graph");
  expect_keys(*graph, {"n_nodes", "edges"}, "scenario.graph");
  s.graph_.n_nodes = opt_int(*graph, "n_nodes", 0, "scenario.graph");
  if (s.graph_.n_nodes <= 0) fail("scenario.graph.n_nodes", "expected a positive integer");
  if (const json* edges = find(*graph, "edges")) {
    if (!edges->is_array()) fail("scenario.graph.edges", "expected an array");
    for (const auto& e : *edges) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3) {
        fail("scenario.graph.edges", "each edge is [i, j] or [i, j, w]");
      }
      Edge edge;
      edge.i = as_int(e[0], "scenario.graph.edges");
      edge.j = as_int(e[1], "scenario.graph.edges");
      edge.w = e.size() == 3 ? as_number(e[2], "scenario.graph.edges") : 1.0;
      if (edge.i < 1 || edge.i > s.graph_.n_nodes || edge.j < 1 || edge.j > s.graph_.n_nodes) {
        fail("scenario.graph.edges", "node index out of range 1..n_nodes");
      }
      if (edge.i == edge.j) fail("scenario.graph.edges", "self loops are not allowed");
      if (!(edge.w > 0.0)) fail("scenario.graph.edges", "edge weight must be positive");
      s.graph_.edges.push_back(edge);
    }
  }

  if (const json* integ = find(j, "integration")) {
    expect_object(*integ, "scenario.integration");
    expect_keys(*integ, {"dt", "t_end", "record_every"}, "scenario.integration");
    s.integration_.dt = opt_number(*integ, "dt", s.integration_.dt, "scenario.integration");
    s.integration_.t_end = opt_number(*integ, "t_end", s.integration_.t_end, "scenario.integration");
    s.integration_.record_every =
        opt_int(*integ, "record_every", s.integration_.record_every, "scenario.integration");
  }

  const json* agents = find(j, "agents");
  if (!agents || !agents->is_array() || agents->empty()) {
    fail("scenario", "missing nonempty 'agents' array");
  }

  Drawer draw(s.seed_);
  int agent_no = 0;
  for (const auto& ja : *agents) {
    ++agent_no;
    const std::string where = "scenario.agents[" + std::to_string(agent_no) + "]";
    expect_object(ja, where);
    expect_keys(ja,
                {"plant", "objective", "constraint", "disturbance", "controller", "internal_model",
                 "generator"},
                where);
    AgentScenario a;

    // --- plant ---------------------------------------------------------
    const json* plant = find(ja, "plant");
    if (!plant) fail(where, "missing 'plant'");
    expect_object(*plant, where + ".plant");
    expect_keys(*plant, {"kind", "n", "q", "mu", "x0", "b", "b_known", "flexjoint"},
                where + ".plant");
    a.plant.kind = req_string(*plant, "kind", where + ".plant");
    if (a.plant.kind == "vanderpol") {
      a.plant.n = opt_int(*plant, "n", 2, where + ".plant");
      a.plant.q = opt_int(*plant, "q", 1, where + ".plant");
      if (a.plant.n != 2 || a.plant.q != 1) {
        fail(where + ".plant", "vanderpol plants have n = 2, q = 1");
      }
    } else if (a.plant.kind == "flexjoint") {
      a.plant.n = opt_int(*plant, "n", 4, where + ".plant");
      a.plant.q = opt_int(*plant, "q", 1, where + ".plant");
      if (a.plant.n != 4 || a.plant.q != 1) {
        fail(where + ".plant", "flexjoint plants have n = 4, q = 1");
      }
    } else if (a.plant.kind == "chain") {
      a.plant.n = opt_int(*plant, "n", 0, where + ".plant");
      a.plant.q = opt_int(*plant, "q", 1, where + ".plant");
      if (a.plant.n < 2 || a.plant.q < 1) {
        fail(where + ".plant", "chain plants need n >= 2 and q >= 1");
      }
    } else {
      fail(where + ".plant.kind", "unknown plant kind '" + a.plant.kind + "'");
    }
    if (const json* fj = find(*plant, "flexjoint")) {
      if (a.plant.kind != "flexjoint") {
        fail(where + ".plant", "'flexjoint' parameters on a non-flexjoint plant");
      }
      expect_object(*fj, where + ".plant.flexjoint");
      expect_keys(*fj, {"j1", "j2", "m", "g_grav", "l0", "k"}, where + ".plant.flexjoint");
      a.plant.j1 = opt_number(*fj, "j1", 1.0, where + ".plant.flexjoint");
      a.plant.j2 = opt_number(*fj, "j2", 1.0, where + ".plant.flexjoint");
      a.plant.m = opt_number(*fj, "m", 1.0, where + ".plant.flexjoint");
      a.plant.g_grav = opt_number(*fj, "g_grav", 9.8, where + ".plant.flexjoint");
      a.plant.l0 = opt_number(*fj, "l0", 1.0, where + ".plant.flexjoint");
      a.plant.k_spring = opt_number(*fj, "k", 1.0, where + ".plant.flexjoint");
      if (a.plant.j1 <= 0 || a.plant.j2 <= 0 || a.plant.m <= 0 || a.plant.l0 <= 0 ||
          a.plant.k_spring <= 0) {
        fail(where + ".plant.flexjoint", "inertias, mass, length and stiffness must be positive");
      }
    }

    // Seeded resolution, draw order: mu, x0, (w0 below), r0, v0.
    if (const json* mu = find(*plant, "mu")) {
      a.plant.mu = vec_from_json(*mu, where + ".plant.mu");
    } else {
      a.plant.mu = draw.uniform(default_mu_count(a.plant.kind), -0.5, 0.5);
    }
    if (a.plant.kind == "vanderpol" && a.plant.mu.size() < 3) {
      fail(where + ".plant.mu", "vanderpol needs at least 3 uncertainty entries");
    }
    if (a.plant.kind == "flexjoint" && a.plant.mu.size() < 4) {
      fail(where + ".plant.mu", "flexjoint needs at least 4 uncertainty entries");
    }
    if (const json* x0 = find(*plant, "x0")) {
      a.plant.x0 = vec_from_json(*x0, where + ".plant.x0");
      if (a.plant.x0.size() != a.plant.n * a.plant.q) {
        fail(where + ".plant.x0", "expected n*q entries");
      }
    } else {
      a.plant.x0 = draw.uniform(a.plant.n * a.plant.q, -1.0, 1.0);
    }
    if (const json* b = find(*plant, "b")) {
      if (a.plant.kind == "flexjoint") {
        fail(where + ".plant.b", "flexjoint derives b = k / (j1 * j2); remove the explicit b");
      }
      a.plant.b = mat_from_json(*b, where + ".plant.b");
      if (a.plant.b.rows() != a.plant.q || a.plant.b.cols() != a.plant.q) {
        fail(where + ".plant.b", "expected a q x q matrix");
      }
    } else if (a.plant.kind == "flexjoint") {
      a.plant.b = Eigen::MatrixXd::Constant(
          1, 1, a.plant.k_spring / (a.plant.j1 * a.plant.j2));
    } else {
      a.plant.b = Eigen::MatrixXd::Identity(a.plant.q, a.plant.q);
    }
    a.plant.b_known = opt_bool(*plant, "b_known", false, where + ".plant");

    // --- objective / constraint ----------------------------------------
    const json* objective = find(ja, "objective");
    if (!objective) fail(where, "missing 'objective'");
    expect_object(*objective, where + ".objective");
    expect_keys(*objective, {"kind", "Q", "center"}, where + ".objective");
    a.objective.kind = req_string(*objective, "kind", where + ".objective");
    if (a.objective.kind == "quadratic") {
      const json* qm = find(*objective, "Q");
      const json* c = find(*objective, "center");
      if (!qm || !c) fail(where + ".objective", "quadratic objectives need 'Q' and 'center'");
      a.objective.quadratic_q = mat_from_json(*qm, where + ".objective.Q");
      a.objective.quadratic_center = vec_from_json(*c, where + ".objective.center");
    }

    if (const json* constraint = find(ja, "constraint")) {
      expect_object(*constraint, where + ".constraint");
      expect_keys(*constraint, {"kind", "lo", "hi", "center", "radius"}, where + ".constraint");
      a.constraint.kind = req_string(*constraint, "kind", where + ".constraint");
      auto bound = [&](const char* key) -> Eigen::VectorXd {
        const json* v = find(*constraint, key);
        if (!v) fail(where + ".constraint", std::string("missing '") + key + "'");
        if (v->is_number()) return Eigen::VectorXd::Constant(1, v->get<double>());
        return vec_from_json(*v, where + ".constraint." + key);
      };
      if (a.constraint.kind == "interval" || a.constraint.kind == "box") {
        a.constraint.lo = bound("lo");
        a.constraint.hi = bound("hi");
      } else if (a.constraint.kind == "ball") {
        const json* c = find(*constraint, "center");
        if (!c) fail(where + ".constraint", "ball needs 'center' and 'radius'");
        a.constraint.center = vec_from_json(*c, where + ".constraint.center");
        a.constraint.radius = opt_number(*constraint, "radius", -1.0, where + ".constraint");
        if (a.constraint.radius <= 0) fail(where + ".constraint.radius", "expected a positive number");
      } else if (a.constraint.kind != "none") {
        fail(where + ".constraint.kind", "unknown constraint kind '" + a.constraint.kind + "'");
      }
    } else {
      a.constraint.kind = "none";
    }

    // --- disturbance (may consume the w0 draw) --------------------------
    const json* dist = find(ja, "disturbance");
    const json* w0_field = nullptr;
    if (dist) {
      expect_object(*dist, where + ".disturbance");
      expect_keys(*dist, {"kind", "index", "S", "D", "w0", "allow_decaying_modes"},
                  where + ".disturbance");
      a.disturbance.allow_decaying_modes =
          opt_bool(*dist, "allow_decaying_modes", false, where + ".disturbance");
      w0_field = find(*dist, "w0");
      if (const json* sm = find(*dist, "S")) {
        a.disturbance.S = mat_from_json(*sm, where + ".disturbance.S");
        const json* dm = find(*dist, "D");
        if (!dm) fail(where + ".disturbance", "explicit S needs an explicit D");
        a.disturbance.D = mat_from_json(*dm, where + ".disturbance.D");
      } else {
        const std::string kind = req_string(*dist, "kind", where + ".disturbance");
        if (kind == "none") {
          a.disturbance.S = Eigen::MatrixXd::Zero(1, 1);
          a.disturbance.D = Eigen::MatrixXd::Zero(a.plant.q, 1);
        } else {
          const int index = opt_int(*dist, "index", agent_no, where + ".disturbance");
          expand_disturbance(kind, index, a.plant.mu, a.disturbance.S, a.disturbance.D,
                             where + ".disturbance");
        }
      }
      if (a.disturbance.S.rows() != a.disturbance.S.cols()) {
        fail(where + ".disturbance.S", "expected a square matrix");
      }
      if (a.disturbance.D.cols() != a.disturbance.S.rows() ||
          a.disturbance.D.rows() != a.plant.q) {
        fail(where + ".disturbance.D", "expected a q x dim(S) matrix");
      }
    } else {
      a.disturbance.S = Eigen::MatrixXd::Zero(1, 1);
      a.disturbance.D = Eigen::MatrixXd::Zero(a.plant.q, 1);
    }
    const int exo_dim = static_cast<int>(a.disturbance.S.rows());
    if (w0_field) {
      a.disturbance.w0 = vec_from_json(*w0_field, where + ".disturbance.w0");
      if (a.disturbance.w0.size() != exo_dim) {
        fail(where + ".disturbance.w0", "expected dim(S) entries");
      }
    } else if (dist) {
      a.disturbance.w0 = draw.uniform(exo_dim, -1.0, 1.0);
    } else {
      a.disturbance.w0 = Eigen::VectorXd::Zero(exo_dim);
    }

    // --- controller ------------------------------------------------------
    a.controller.rbf.kappa = -1.0;
    if (const json* ctrl = find(ja, "controller")) {
      expect_object(*ctrl, where + ".controller");
      expect_keys(*ctrl, {"k", "ell", "rho", "rbf", "W0", "theta0"}, where + ".controller");
      if (const json* k = find(*ctrl, "k")) {
        const Eigen::VectorXd kv = vec_from_json(*k, where + ".controller.k");
        a.controller.k.assign(kv.data(), kv.data() + kv.size());
      }
      a.controller.ell = opt_number(*ctrl, "ell", 0.01, where + ".controller");
      if (const json* rho = find(*ctrl, "rho")) {
        if (!rho->is_string()) fail(where + ".controller.rho", "expected a string");
        a.controller.rho = rho->get<std::string>();
      }
      if (a.controller.rho != "quartic") {
        fail(where + ".controller.rho", "unknown gain function '" + a.controller.rho + "'");
      }
      if (const json* w0p = find(*ctrl, "W0")) {
        if (!w0p->is_string() || w0p->get<std::string>() != "zero") {
          fail(where + ".controller.W0", "only the 'zero' prior is supported");
        }
      }
      a.controller.theta0 = opt_number(*ctrl, "theta0", 0.0, where + ".controller");
      if (const json* rbf = find(*ctrl, "rbf")) {
        expect_object(*rbf, where + ".controller.rbf");
        expect_keys(*rbf, {"n_w", "lo", "hi", "kappa"}, where + ".controller.rbf");
        a.controller.rbf.n_w = opt_int(*rbf, "n_w", 21, where + ".controller.rbf");
        a.controller.rbf.lo = opt_number(*rbf, "lo", -5.0, where + ".controller.rbf");
        a.controller.rbf.hi = opt_number(*rbf, "hi", 5.0, where + ".controller.rbf");
        a.controller.rbf.kappa = opt_number(*rbf, "kappa", -1.0, where + ".controller.rbf");
      }
    }
    if (a.controller.k.empty()) a.controller.k = StabilizerCoeffs::binomial(a.plant.n).k();
    if (static_cast<int>(a.controller.k.size()) != a.plant.n - 1) {
      fail(where + ".controller.k", "expected n - 1 stabilizer gains");
    }
    if (a.controller.rbf.n_w < 1) fail(where + ".controller.rbf.n_w", "expected n_w >= 1");
    if (a.controller.rbf.hi <= a.controller.rbf.lo && a.controller.rbf.n_w > 1) {
      fail(where + ".controller.rbf", "center grid needs lo < hi");
    }
    if (a.controller.rbf.kappa <= 0) {
      if (a.controller.rbf.n_w < 2) {
        fail(where + ".controller.rbf", "kappa is required when n_w == 1");
      }
      const double spacing =
          (a.controller.rbf.hi - a.controller.rbf.lo) / (a.controller.rbf.n_w - 1);
      a.controller.rbf.kappa = 1.5 * spacing;
    }

    // --- internal model ---------------------------------------------------
    const json* im = find(ja, "internal_model");
    if (im) {
      expect_object(*im, where + ".internal_model");
      expect_keys(*im, {"F", "G", "poles"}, where + ".internal_model");
    }
    if (im && find(*im, "F")) {
      a.internal_model.F = mat_from_json(*find(*im, "F"), where + ".internal_model.F");
      const json* g = find(*im, "G");
      if (!g) fail(where + ".internal_model", "explicit F needs an explicit G");
      a.internal_model.G = mat_from_json(*g, where + ".internal_model.G");
    } else {
      // Design from the exosystem's minimal polynomial; default poles are an
      // n_p-fold -2.
      std::vector<double> coeffs;
      try {
        coeffs = minimal_polynomial(a.disturbance.S);
      } catch (const std::exception& e) {
        fail(where + ".internal_model", std::string("cannot design from S: ") + e.what());
      }
      std::vector<std::complex<double>> poles;
      if (im && find(*im, "poles")) {
        poles = parse_poles(*find(*im, "poles"), where + ".internal_model.poles");
      } else {
        poles.assign(coeffs.size(), std::complex<double>(-2.0, 0.0));
      }
      try {
        const InternalModel designed = design_G(build_ssg(coeffs, a.plant.q), poles);
        a.internal_model.F = designed.F;
        a.internal_model.G = designed.G;
      } catch (const std::exception& e) {
        fail(where + ".internal_model", e.what());
      }
    }

    // --- generator initial conditions -------------------------------------
    const json* gen = find(ja, "generator");
    if (gen) {
      expect_object(*gen, where + ".generator");
      expect_keys(*gen, {"r0", "v0"}, where + ".generator");
    }
    if (gen && find(*gen, "r0")) {
      a.generator.r0 = vec_from_json(*find(*gen, "r0"), where + ".generator.r0");
      if (a.generator.r0.size() != a.plant.q) fail(where + ".generator.r0", "expected q entries");
    } else {
      a.generator.r0 = draw.uniform(a.plant.q, -1.0, 1.0);
    }
    if (gen && find(*gen, "v0")) {
      a.generator.v0 = vec_from_json(*find(*gen, "v0"), where + ".generator.v0");
      if (a.generator.v0.size() != a.plant.q) fail(where + ".generator.v0", "expected q entries");
    } else {
      a.generator.v0 = draw.uniform(a.plant.q, -1.0, 1.0);
    }

    s.agents_.push_back(std::move(a));
  }

  return s;
}

Scenario Scenario::load(const std::string& path) {
  if (is_preset(path)) return preset(path);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("parse error in '" + path + "': " + e.what());
  }
  return from_json(j);
}

nlohmann::json Scenario::to_json() const {
  json j;
  j["name"] = name_;
  j["seed"] = seed_;
  j["graph"]["n_nodes"] = graph_.n_nodes;
  {
    json edges = json::array();
    for (const Edge& e : graph_.edges) edges.push_back(json::array({e.i, e.j, e.w}));
    j["graph"]["edges"] = edges;
  }
  j["integration"] = {{"dt", integration_.dt},
                      {"t_end", integration_.t_end},
                      {"record_every", integration_.record_every}};

  json agents = json::array();
  for (const AgentScenario& a : agents_) {
    json ja;
    json& plant = ja["plant"];
    plant["kind"] = a.plant.kind;
    plant["n"] = a.plant.n;
    plant["q"] = a.plant.q;
    plant["mu"] = vec_to_json(a.plant.mu);
    plant["x0"] = vec_to_json(a.plant.x0);
    plant["b_known"] = a.plant.b_known;
    if (a.plant.kind == "flexjoint") {
      plant["flexjoint"] = {{"j1", a.plant.j1}, {"j2", a.plant.j2},   {"m", a.plant.m},
                            {"g_grav", a.plant.g_grav}, {"l0", a.plant.l0}, {"k", a.plant.k_spring}};
    } else {
      plant["b"] = mat_to_json(a.plant.b);
    }

    json& objective = ja["objective"];
    objective["kind"] = a.objective.kind;
    if (a.objective.kind == "quadratic") {
      objective["Q"] = mat_to_json(a.objective.quadratic_q);
      objective["center"] = vec_to_json(a.objective.quadratic_center);
    }

    json& constraint = ja["constraint"];
    constraint["kind"] = a.constraint.kind;
    if (a.constraint.kind == "interval") {
      constraint["lo"] = a.constraint.lo[0];
      constraint["hi"] = a.constraint.hi[0];
    } else if (a.constraint.kind == "box") {
      constraint["lo"] = vec_to_json(a.constraint.lo);
      constraint["hi"] = vec_to_json(a.constraint.hi);
    } else if (a.constraint.kind == "ball") {
      constraint["center"] = vec_to_json(a.constraint.center);
      constraint["radius"] = a.constraint.radius;
    }

    json& dist = ja["disturbance"];
    dist["S"] = mat_to_json(a.disturbance.S);
    dist["D"] = mat_to_json(a.disturbance.D);
    dist["w0"] = vec_to_json(a.disturbance.w0);
    if (a.disturbance.allow_decaying_modes) dist["allow_decaying_modes"] = true;

    json& ctrl = ja["controller"];
    ctrl["k"] = a.controller.k;
    ctrl["ell"] = a.controller.ell;
    ctrl["rho"] = a.controller.rho;
    ctrl["rbf"] = {{"n_w", a.controller.rbf.n_w},
                   {"lo", a.controller.rbf.lo},
                   {"hi", a.controller.rbf.hi},
                   {"kappa", a.controller.rbf.kappa}};
    ctrl["W0"] = a.controller.w0_prior;
    ctrl["theta0"] = a.controller.theta0;

    ja["internal_model"] = {{"F", mat_to_json(a.internal_model.F)},
                            {"G", mat_to_json(a.internal_model.G)}};
    ja["generator"] = {{"r0", vec_to_json(a.generator.r0)},
                       {"v0", vec_to_json(a.generator.v0)}};
    agents.push_back(ja);
  }
  j["agents"] = agents;
  return j;
}

std::uint64_t Scenario::config_hash() const { return fnv1a(to_json().dump()); }

std::vector<std::string> Scenario::validate() const {
  std::vector<std::string> issues;

  if (graph_.n_nodes != n_agents()) {
    issues.push_back("graph has " + std::to_string(graph_.n_nodes) + " nodes for " +
                     std::to_string(n_agents()) + " agents");
  }
  try {
    const WeightedGraph g = build_graph();
    if (!is_connected(g)) issues.push_back("graph not connected");
  } catch (const std::exception& e) {
    issues.push_back(std::string("graph: ") + e.what());
  }

  if (!(integration_.dt > 0)) issues.push_back("integration: dt must be positive");
  if (!(integration_.t_end >= integration_.dt)) {
    issues.push_back("integration: t_end must be at least dt");
  }
  if (integration_.record_every < 1) issues.push_back("integration: record_every must be >= 1");

  std::vector<ConvexSet> sets;
  bool sets_ok = true;
  for (int i = 0; i < n_agents(); ++i) {
    const std::string prefix = "agent " + std::to_string(i + 1) + ": ";
    const AgentScenario& a = agents_[static_cast<std::size_t>(i)];

    if (!hurwitz_check(a.controller.k)) {
      issues.push_back(prefix + "stabilizing polynomial not Hurwitz");
    }
    if (!(a.controller.ell > 0)) issues.push_back(prefix + "leakage rate ell must be positive");

    try {
      const AgentSpec spec = build_agent_spec(i);
      sets.push_back(spec.constraint());
      const Assumption1Report report =
          check_assumption1(spec.objective(), spec.constraint(), 200, 0x5eedu + i);
      if (!report.pass()) {
        issues.push_back(prefix +
                         "objective sampling violates the declared convexity/Lipschitz bounds");
      }
    } catch (const std::exception& e) {
      sets_ok = false;
      issues.push_back(prefix + e.what());
    }

    try {
      (void)build_internal_model(i);
    } catch (const std::exception& e) {
      issues.push_back(prefix + "internal model " + e.what());
    }
    try {
      (void)build_rbf(i);
    } catch (const std::exception& e) {
      issues.push_back(prefix + "rbf " + e.what());
    }
  }

  if (sets_ok && !sets.empty()) {
    try {
      (void)intersect_boxes(sets);
    } catch (const std::exception& e) {
      issues.push_back(std::string("constraint intersection Omega_0 is empty (") + e.what() + ")");
    }
  }

  return issues;
}

WeightedGraph Scenario::build_graph() const {
  return WeightedGraph::from_edges(graph_.n_nodes, graph_.edges);
}

AgentSpec Scenario::build_agent_spec(int i) const {
  const AgentScenario& a = agents_.at(static_cast<std::size_t>(i));
  NonlinearityFn g;
  if (a.plant.kind == "vanderpol") {
    g = vanderpol_nonlinearity();
  } else if (a.plant.kind == "flexjoint") {
    FlexJointParams p;
    p.j1 = a.plant.j1;
    p.j2 = a.plant.j2;
    p.m = a.plant.m;
    p.g_grav = a.plant.g_grav;
    p.l = (1.0 + a.plant.mu[3]) * a.plant.l0;
    p.k = a.plant.k_spring;
    g = flexjoint_nonlinearity(p);
  } else {
    g = zero_nonlinearity();
  }
  ExosystemSpec exo(a.disturbance.S, a.disturbance.D, a.disturbance.w0,
                    a.disturbance.allow_decaying_modes);
  const std::string where = "agent " + std::to_string(i + 1);
  LocalObjective obj = build_objective(a.objective, a.plant.q, where + ".objective");
  ConvexSet set = build_constraint(a.constraint, a.plant.q, where + ".constraint");
  return AgentSpec(a.plant.kind, a.plant.n, a.plant.q, std::move(g), a.plant.mu, a.plant.b,
                   a.plant.b_known, std::move(exo), std::move(obj), std::move(set), a.plant.x0);
}

StabilizerCoeffs Scenario::build_stabilizer(int i) const {
  return StabilizerCoeffs(agents_.at(static_cast<std::size_t>(i)).controller.k);
}

RbfNetwork Scenario::build_rbf(int i) const {
  const AgentScenario& a = agents_.at(static_cast<std::size_t>(i));
  if (a.plant.q == 1) {
    return RbfNetwork::grid1d(a.controller.rbf.n_w, a.controller.rbf.lo, a.controller.rbf.hi,
                              a.controller.rbf.kappa);
  }
  const std::vector<int> counts(static_cast<std::size_t>(a.plant.q), a.controller.rbf.n_w);
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(a.plant.q, a.controller.rbf.lo);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(a.plant.q, a.controller.rbf.hi);
  return RbfNetwork::tensor_grid(counts, lo, hi, a.controller.rbf.kappa);
}

GainFunction Scenario::build_gain(int i) const {
  (void)i;  // only the quartic gain is configurable from files
  return GainFunction::quartic();
}

InternalModel Scenario::build_internal_model(int i) const {
  const AgentScenario& a = agents_.at(static_cast<std::size_t>(i));
  return internal_model_from_matrices(a.internal_model.F, a.internal_model.G, a.plant.q);
}

GeneratorProblem Scenario::build_generator_problem() const {
  std::vector<LocalObjective> objectives;
  std::vector<ConvexSet> sets;
  for (int i = 0; i < n_agents(); ++i) {
    const AgentScenario& a = agents_[static_cast<std::size_t>(i)];
    const std::string where = "agent " + std::to_string(i + 1);
    objectives.push_back(build_objective(a.objective, a.plant.q, where + ".objective"));
    sets.push_back(build_constraint(a.constraint, a.plant.q, where + ".constraint"));
  }
  return GeneratorProblem(build_graph(), std::move(objectives), std::move(sets));
}

namespace {

json preset_example1() {
  json agents = json::array();
  for (int i = 1; i <= 4; ++i) {
    json a;
    a["plant"] = {{"kind", "vanderpol"}, {"n", 2}, {"q", 1}};
    a["objective"] = {{"kind", "example1-f" + std::to_string(i)}};
    a["constraint"] = {{"kind", "interval"}, {"lo", -3.0 + i}, {"hi", 1.0 + i}};
    a["disturbance"] = {{"kind", "example1"}, {"index", i}};
    a["controller"] = {{"k", json::array({1.0})},
                       {"ell", 0.01},
                       {"rho", "quartic"},
                       {"rbf", {{"n_w", 21}, {"lo", -5.0}, {"hi", 5.0}, {"kappa", 1.62}}},
                       {"theta0", 0.0}};
    a["internal_model"] = {{"F", {{-2.0 * i, 1.0}, {-1.0 * i, 0.0}}},
                           {"G", {{-2.0 * i}, {0.0}}}};
    agents.push_back(a);
  }
  json j;
  j["name"] = "example1";
  j["seed"] = 1;
  j["graph"] = {{"n_nodes", 4},
                {"edges", {{1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {1, 3, 1.0}}}};
  j["integration"] = {{"dt", 1e-3}, {"t_end", 100.0}, {"record_every", 100}};
  j["agents"] = agents;
  return j;
}

json preset_example2() {
  // Exosystem initial conditions zero out the modes each agent's verbatim
  // compensator (F_i, G_i) does not replicate: agent 2's F models polynomial
  // ramps rather than the e^t mode of S_2 = [1], and agent 4's F models only
  // the 2 rad/s oscillation, so the growing first mode of S_4 starts at 0.
  const std::vector<std::vector<double>> w0 = {{0.5}, {0.0}, {0.6, -0.3}, {0.0, 0.7, 0.2}};
  const std::vector<double> y0 = {0.6, -0.4, 0.2, -0.8};
  const std::vector<json> f = {json{{-1.0}}, json{{-4.0, 1.0}, {-4.0, 0.0}},
                               json{{-2.0, 1.0}, {-1.0, 0.0}}, json{{-4.0, 2.0}, {-2.0, 0.0}}};
  const std::vector<json> g = {json{{-1.0}}, json{{-4.0}, {-4.0}}, json{{-2.0}, {0.0}},
                               json{{-4.0}, {0.0}}};

  json agents = json::array();
  for (int i = 1; i <= 4; ++i) {
    json a;
    a["plant"] = {{"kind", "flexjoint"},
                  {"n", 4},
                  {"q", 1},
                  {"x0", json::array({y0[i - 1], 0.0, 0.0, 0.0})},
                  {"flexjoint",
                   {{"j1", 1.0}, {"j2", 1.0}, {"m", 1.0}, {"g_grav", 9.8}, {"l0", 1.0}, {"k", 1.0}}}};
    a["objective"] = {{"kind", "example1-f" + std::to_string(i)}};
    a["constraint"] = {{"kind", "interval"}, {"lo", -3.0 + i}, {"hi", 1.0 + i}};
    a["disturbance"] = {{"kind", "example2"}, {"index", i}, {"w0", w0[i - 1]}};
    a["controller"] = {{"k", json::array({1.0, 3.0, 3.0})},
                       {"ell", 0.01},
                       {"rho", "quartic"},
                       {"rbf", {{"n_w", 21}, {"lo", -5.0}, {"hi", 5.0}, {"kappa", 1.62}}},
                       {"theta0", 0.0}};
    a["internal_model"] = {{"F", f[i - 1]}, {"G", g[i - 1]}};
    agents.push_back(a);
  }
  json j;
  j["name"] = "example2";
  j["seed"] = 2;
  j["graph"] = {{"n_nodes", 4},
                {"edges", {{1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {1, 3, 1.0}}}};
  j["integration"] = {{"dt", 1e-3}, {"t_end", 200.0}, {"record_every", 100}};
  j["agents"] = agents;
  return j;
}

}  // namespace

bool Scenario::is_preset(const std::string& name) {
  return name == "example1" || name == "example2";
}

Scenario Scenario::preset(const std::string& name) {
  if (name == "example1") return from_json(preset_example1());
  if (name == "example2") return from_json(preset_example2());
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::vector<std::string> Scenario::preset_names() { return {"example1", "example2"}; }

}  // namespace opticoord
