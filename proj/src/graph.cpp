#include "opticoord/graph.hpp"

#include <stdexcept>
#include <string>

namespace opticoord {

WeightedGraph::WeightedGraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols() || weights_.rows() < 1)
    throw std::invalid_argument("WeightedGraph: weight matrix must be square and nonempty");
  const int n = static_cast<int>(weights_.rows());
  for (int i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0)
      throw std::invalid_argument("WeightedGraph: nonzero diagonal at node " + std::to_string(i + 1));
    for (int j = 0; j < n; ++j) {
      if (weights_(i, j) < 0.0)
        throw std::invalid_argument("WeightedGraph: negative weight on edge (" +
                                    std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      if (weights_(i, j) != weights_(j, i))
        throw std::invalid_argument("WeightedGraph: asymmetric weights on edge (" +
                                    std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                    "); directed graphs are not supported");
    }
  }
}

WeightedGraph WeightedGraph::from_edges(int n_nodes, const std::vector<Edge>& edges) {
  if (n_nodes < 1) throw std::invalid_argument("from_edges: need at least one node");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
  for (const Edge& e : edges) {
    if (e.i < 1 || e.i > n_nodes || e.j < 1 || e.j > n_nodes)
      throw std::invalid_argument("from_edges: node index out of range (indices are 1-based)");
    if (e.i == e.j) throw std::invalid_argument("from_edges: self-loops are not allowed");
    if (e.w < 0.0) throw std::invalid_argument("from_edges: negative edge weight");
    w(e.i - 1, e.j - 1) = e.w;
    w(e.j - 1, e.i - 1) = e.w;
  }
  return WeightedGraph(std::move(w));
}

LaplacianMatrix::LaplacianMatrix(const WeightedGraph& g) {
  const int n = g.size();
  const Eigen::MatrixXd& a = g.weights();
  entries_ = -a;
  for (int i = 0; i < n; ++i) entries_(i, i) = a.row(i).sum();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("LaplacianMatrix: eigensolver failed");
  eigenvalues_ = es.eigenvalues();  // already sorted ascending
}

Eigen::VectorXd LaplacianMatrix::neighbor_sum(int i, const std::vector<Eigen::VectorXd>& values) const {
  const int n = size();
  if (i < 0 || i >= n) throw std::out_of_range("neighbor_sum: node index out of range");
  if (static_cast<int>(values.size()) != n)
    throw std::invalid_argument("neighbor_sum: expected one value per node");
  const Eigen::Index q = values[0].size();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(q);
  for (int j = 0; j < n; ++j) {
    if (values[static_cast<std::size_t>(j)].size() != q)
      throw std::invalid_argument("neighbor_sum: value dimensions disagree");
    acc += entries_(i, j) * values[static_cast<std::size_t>(j)];
  }
  return acc;
}

void LaplacianMatrix::neighbor_sum_stacked(int i, const Eigen::VectorXd& stacked, int q,
                                           Eigen::Ref<Eigen::VectorXd> out) const {
  const int n = size();
  if (i < 0 || i >= n) throw std::out_of_range("neighbor_sum_stacked: node index out of range");
  if (stacked.size() != static_cast<Eigen::Index>(n) * q)
    throw std::invalid_argument("neighbor_sum_stacked: stacked vector has wrong size");
  out.setZero();
  for (int j = 0; j < n; ++j) {
    const double lij = entries_(i, j);
    if (lij != 0.0) out += lij * stacked.segment(static_cast<Eigen::Index>(j) * q, q);
  }
}

LaplacianMatrix laplacian(const WeightedGraph& g) { return LaplacianMatrix(g); }

double algebraic_connectivity(const LaplacianMatrix& l) {
  if (l.size() < 2) return 0.0;
  return l.eigenvalues()(1);
}

bool is_connected(const WeightedGraph& g) {
  const int n = g.size();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (!seen[static_cast<std::size_t>(v)] && g.weights()(u, v) > 0.0) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

}  // namespace opticoord
