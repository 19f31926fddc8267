// Weighted undirected graphs, Laplacian construction, and connectivity.
//
// The communication topology between agents is an undirected graph with
// nonnegative edge weights. Both connectivity checks are exposed: graph
// traversal and the algebraic connectivity lambda_2 of the Laplacian, so
// that tests can cross-validate one against the other.

#pragma once

#include <vector>

#include <Eigen/Dense>

namespace opticoord {

struct Edge {
  int i = 0;  // 1-based node index
  int j = 0;  // 1-based node index
  double w = 1.0;
};

class WeightedGraph {
 public:
  // Validates: square, zero diagonal, symmetric, nonnegative weights.
  explicit WeightedGraph(Eigen::MatrixXd weights);

  // Edge-list construction with 1-based node indices, as used in configs.
  static WeightedGraph from_edges(int n_nodes, const std::vector<Edge>& edges);

  int size() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }

 private:
  Eigen::MatrixXd weights_;
};

class LaplacianMatrix {
 public:
  explicit LaplacianMatrix(const WeightedGraph& g);

  int size() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

  // Eigenvalues sorted ascending; eigenvalues()(0) is 0 up to roundoff.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  // sum_j a_ij (values_i - values_j), i.e. row i of (L (x) I_q) applied to
  // the stacked values. `i` is 0-based here.
  Eigen::VectorXd neighbor_sum(int i, const std::vector<Eigen::VectorXd>& values) const;

  // Same contraction on a flat stack of N blocks of size q; writes to `out`.
  void neighbor_sum_stacked(int i, const Eigen::VectorXd& stacked, int q,
                            Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  Eigen::MatrixXd entries_;
  Eigen::VectorXd eigenvalues_;
};

LaplacianMatrix laplacian(const WeightedGraph& g);

// Second-smallest Laplacian eigenvalue; strictly positive iff connected.
double algebraic_connectivity(const LaplacianMatrix& l);

// Path connectivity by traversal over strictly positive weights.
// Single-node graphs are connected.
bool is_connected(const WeightedGraph& g);

}  // namespace opticoord
