#include "opticoord/oracle.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace opticoord {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ConvexSet intersect_boxes(const std::vector<ConvexSet>& sets) {
  if (sets.empty()) throw std::invalid_argument("intersect_boxes: need at least one set");
  const int q = sets.front().dimension();
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(q, -kInf);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(q, kInf);
  bool all_whole = true;
  for (const auto& s : sets) {
    if (s.dimension() != q)
      throw std::invalid_argument("intersect_boxes: sets must share one dimension");
    if (s.kind() == SetKind::WholeSpace) continue;
    if (s.kind() != SetKind::Box)
      throw std::invalid_argument("intersect_boxes: only boxes and whole-space sets intersect");
    all_whole = false;
    lo = lo.cwiseMax(s.lower());
    hi = hi.cwiseMin(s.upper());
  }
  if (all_whole) return ConvexSet::whole_space(q);
  for (int k = 0; k < q; ++k) {
    if (lo(k) > hi(k)) {
      std::ostringstream msg;
      msg << "intersect_boxes: empty intersection in component " << k + 1 << " ([" << lo(k)
          << ", " << hi(k) << "])";
      throw std::invalid_argument(msg.str());
    }
  }
  return ConvexSet::box(std::move(lo), std::move(hi));
}

CentralProblem::CentralProblem(std::vector<LocalObjective> objs, std::vector<ConvexSet> cs)
    : objectives(std::move(objs)), sets(std::move(cs)), omega0(intersect_boxes(sets)) {
  if (objectives.empty() || objectives.size() != sets.size())
    throw std::invalid_argument("CentralProblem: need matching nonempty objective/set lists");
  q = objectives.front().dimension();
  for (const auto& f : objectives)
    if (f.dimension() != q)
      throw std::invalid_argument("CentralProblem: objectives must share one dimension");
}

Eigen::VectorXd CentralProblem::total_gradient(const Eigen::VectorXd& y) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(q);
  for (const auto& f : objectives) g += f.gradient(y);
  return g;
}

double CentralProblem::total_value(const Eigen::VectorXd& y) const {
  double v = 0.0;
  for (const auto& f : objectives) v += f.value(y);
  return v;
}

double CentralProblem::default_step() const {
  double sum = 0.0;
  for (const auto& f : objectives) {
    if (!f.gradient_lipschitz_ub())
      throw std::invalid_argument(
          "CentralProblem: default step needs a gradient Lipschitz bound on every objective");
    sum += *f.gradient_lipschitz_ub();
  }
  return 1.0 / sum;
}

SolveResult solve(const CentralProblem& problem, double step, double tol, long max_iter,
                  const Eigen::VectorXd& y_init) {
  if (!(step > 0.0)) throw std::invalid_argument("solve: step must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("solve: tol must be positive");
  if (y_init.size() != problem.q) throw std::invalid_argument("solve: y_init dimension mismatch");

  Eigen::VectorXd y = problem.omega0.project(y_init);
  double residual = kInf;
  for (long it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd next = problem.omega0.project(y - step * problem.total_gradient(y));
    residual = (next - y).norm();
    y = std::move(next);
    if (residual <= tol) {
      SolveResult out;
      out.y_star = std::move(y);
      out.kkt_residual = kkt_residual(problem, out.y_star);
      out.iterations = it;
      out.converged = true;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "solve: projected gradient did not reach tol " << tol << " within " << max_iter
      << " iterations (last residual " << residual << ")";
  throw std::runtime_error(msg.str());
}

SolveResult solve(const CentralProblem& problem) {
  return solve(problem, problem.default_step(), 1e-9, 1000000,
               Eigen::VectorXd::Zero(problem.q));
}

double kkt_residual(const CentralProblem& problem, const Eigen::VectorXd& y) {
  return (y - problem.omega0.project(y - problem.total_gradient(y))).norm();
}

bool check_consensus_equivalence(const WeightedGraph& graph, const Eigen::VectorXd& y_stack,
                                 int q) {
  const int n = graph.size();
  if (q < 1 || y_stack.size() != static_cast<Eigen::Index>(n) * q)
    throw std::invalid_argument("check_consensus_equivalence: stack must have dimension q*N");
  const LaplacianMatrix lap(graph);

  double product_norm = 0.0;
  Eigen::VectorXd row(q);
  for (int i = 0; i < n; ++i) {
    lap.neighbor_sum_stacked(i, y_stack, q, row);
    product_norm = std::max(product_norm, row.cwiseAbs().maxCoeff());
  }

  double block_spread = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      block_spread = std::max(block_spread,
                              (y_stack.segment(static_cast<Eigen::Index>(i) * q, q) -
                               y_stack.segment(static_cast<Eigen::Index>(j) * q, q))
                                  .cwiseAbs()
                                  .maxCoeff());

  const double scale = std::max(1.0, y_stack.cwiseAbs().maxCoeff());
  const bool product_zero = product_norm <= 1e-9 * scale;
  const bool blocks_equal = block_spread <= 1e-6 * scale;
  return product_zero == blocks_equal;
}

}  // namespace opticoord
