#include "opticoord/poly.hpp"

#include <cmath>
#include <stdexcept>

namespace opticoord::poly {

Eigen::MatrixXd companion(const std::vector<double>& coeffs) {
  const auto n = static_cast<Eigen::Index>(coeffs.size());
  if (n < 1) throw std::invalid_argument("companion: degree must be >= 1");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) a(n - 1, j) = -coeffs[static_cast<std::size_t>(j)];
  return a;
}

std::vector<double> characteristic(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("characteristic: matrix must be square");
  const Eigen::Index n = a.rows();
  // Faddeev-LeVerrier: M_1 = I, c_{n-k} = -tr(A M_k)/k, M_{k+1} = A M_k + c_{n-k} I.
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[static_cast<std::size_t>(n)] = 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const Eigen::MatrixXd am = a * m;
    const double ck = -am.trace() / static_cast<double>(k);
    c[static_cast<std::size_t>(n - k)] = ck;
    m = am + ck * Eigen::MatrixXd::Identity(n, n);
  }
  c.pop_back();  // drop the implicit leading 1
  return c;
}

std::vector<double> from_roots(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> c{1.0};
  double scale = 1.0;
  for (const auto& r : roots) {
    scale = std::max(scale, std::abs(r));
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  std::vector<double> out(c.size() - 1);
  const double tol = 1e-9 * std::pow(scale, static_cast<double>(roots.size()));
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    if (std::abs(c[i].imag()) > tol)
      throw std::invalid_argument("from_roots: root list is not closed under conjugation");
    out[i] = c[i].real();
  }
  return out;
}

std::vector<std::complex<double>> roots(const std::vector<double>& coeffs) {
  const Eigen::MatrixXd a = companion(coeffs);
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> out(coeffs.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

}  // namespace opticoord::poly
