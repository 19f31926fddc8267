#include "opticoord/exosystem.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "opticoord/poly.hpp"

namespace opticoord {

namespace {

// Reshape the (i,j) entries column-major into a single vector.
Eigen::VectorXd vectorize(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

}  // namespace

ExosystemSpec::ExosystemSpec(Eigen::MatrixXd S, Eigen::MatrixXd D, Eigen::VectorXd w0,
                             bool allow_decaying_modes)
    : s_(std::move(S)), d_(std::move(D)), w0_(std::move(w0)) {
  if (s_.rows() == 0 || s_.rows() != s_.cols())
    throw std::invalid_argument("ExosystemSpec: S must be square and non-empty");
  if (d_.cols() != s_.rows())
    throw std::invalid_argument("ExosystemSpec: D must have as many columns as S has rows");
  if (d_.rows() < 1) throw std::invalid_argument("ExosystemSpec: D must have at least one row");
  if (w0_.size() != s_.rows())
    throw std::invalid_argument("ExosystemSpec: w0 must match the state dimension of S");
  if (!s_.allFinite() || !d_.allFinite() || !w0_.allFinite())
    throw std::invalid_argument("ExosystemSpec: entries must be finite");

  if (!allow_decaying_modes) {
    const double tol = 1e-9 * std::max(1.0, s_.norm());
    Eigen::EigenSolver<Eigen::MatrixXd> es(s_);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      if (es.eigenvalues()(k).real() < -tol)
        throw std::invalid_argument(
            "ExosystemSpec: S has an eigenvalue with negative real part; such modes decay on "
            "their own and do not need a compensator (pass allow_decaying_modes to keep them)");
    }
  }
}

ExosystemSpec ExosystemSpec::none(int q) {
  if (q <= 0) throw std::invalid_argument("ExosystemSpec::none: q must be positive");
  return ExosystemSpec(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(q, 1),
                       Eigen::VectorXd::Zero(1));
}

Eigen::VectorXd ExosystemSpec::disturbance(double t) const {
  const Eigen::MatrixXd st = s_ * t;
  return d_ * (st.exp() * w0_);
}

std::vector<double> minimal_polynomial(const Eigen::MatrixXd& S) {
  if (S.rows() == 0 || S.rows() != S.cols())
    throw std::invalid_argument("minimal_polynomial: S must be square and non-empty");
  const int m = static_cast<int>(S.rows());
  const double scale = std::max(1.0, S.norm());

  // Grow the Krylov basis {vec(I), vec(S), ...} until vec(S^k) becomes
  // linearly dependent; the dependence coefficients are the polynomial.
  Eigen::MatrixXd basis(m * m, m + 1);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m, m);
  basis.col(0) = vectorize(power);
  for (int k = 1; k <= m; ++k) {
    power = S * power;  // S^k
    const Eigen::VectorXd target = vectorize(power);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.leftCols(k),
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-9);
    const Eigen::VectorXd c = svd.solve(target);
    const double residual = (basis.leftCols(k) * c - target).norm();
    if (residual <= 1e-9 * std::pow(scale, k)) {
      // S^k = sum c_j S^j  =>  S^k - sum c_j S^j = 0.
      std::vector<double> coeffs(k);
      for (int j = 0; j < k; ++j) coeffs[j] = -c(j);
      return coeffs;
    }
    basis.col(k) = target;
  }
  // Cayley-Hamilton guarantees dependence at degree m; falling through means
  // the tolerance was too tight, so return the characteristic polynomial.
  return poly::characteristic(S);
}

SteadyStateGenerator build_ssg(const std::vector<double>& coeffs, int q) {
  if (coeffs.empty()) throw std::invalid_argument("build_ssg: polynomial degree must be >= 1");
  if (q <= 0) throw std::invalid_argument("build_ssg: q must be positive");
  const int n_p = static_cast<int>(coeffs.size());

  SteadyStateGenerator ssg;
  ssg.n_p = n_p;
  ssg.q = q;
  ssg.coeffs = coeffs;
  const Eigen::MatrixXd companion = poly::companion(coeffs);
  const Eigen::MatrixXd iq = Eigen::MatrixXd::Identity(q, q);
  ssg.phi = Eigen::kroneckerProduct(companion, iq);
  ssg.psi = Eigen::MatrixXd::Zero(q, q * n_p);
  ssg.psi.leftCols(q) = iq;
  return ssg;
}

Eigen::VectorXd ssg_initial_state(const SteadyStateGenerator& ssg, const ExosystemSpec& exo) {
  if (exo.output_dim() != ssg.q)
    throw std::invalid_argument("ssg_initial_state: disturbance dimension mismatch");
  Eigen::VectorXd tau(ssg.q * ssg.n_p);
  Eigen::VectorXd w = exo.w0();
  for (int k = 0; k < ssg.n_p; ++k) {
    tau.segment(k * ssg.q, ssg.q) = exo.D() * w;  // d^(k)(0) = D S^k w0
    w = exo.S() * w;
  }
  return tau;
}

double max_real_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

InternalModel design_G(const SteadyStateGenerator& ssg,
                       const std::vector<std::complex<double>>& desired_poles) {
  const int n_p = ssg.n_p;
  if (static_cast<int>(desired_poles.size()) != n_p)
    throw std::invalid_argument("design_G: need exactly one pole per companion block row");
  for (const auto& p : desired_poles) {
    if (!(p.real() < 0.0))
      throw std::invalid_argument("design_G: all desired poles must have negative real part");
  }
  // Throws unless the pole set is closed under conjugation.
  const std::vector<double> desired = poly::from_roots(desired_poles);

  // Ackermann's formula on the transposed scalar companion pair
  // (phi_s^T, psi_s^T) = (A, b): the gain K with eig(A + b K) = poles is
  // K = -e_n^T C^{ -1} a(A), and G_s = K^T.
  const Eigen::MatrixXd a = poly::companion(ssg.coeffs).transpose();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n_p);
  b(0) = 1.0;

  Eigen::MatrixXd ctrb(n_p, n_p);
  Eigen::VectorXd col = b;
  for (int k = 0; k < n_p; ++k) {
    ctrb.col(k) = col;
    col = a * col;
  }
  // a(A) = A^n + d_{n-1} A^{n-1} + ... + d_0 I, Horner form.
  Eigen::MatrixXd poly_a = Eigen::MatrixXd::Identity(n_p, n_p);
  for (int k = n_p - 1; k >= 0; --k)
    poly_a = poly_a * a + desired[k] * Eigen::MatrixXd::Identity(n_p, n_p);

  Eigen::VectorXd e_last = Eigen::VectorXd::Zero(n_p);
  e_last(n_p - 1) = 1.0;
  const Eigen::VectorXd k_gain = poly_a.transpose() * ctrb.transpose().partialPivLu().solve(e_last);
  const Eigen::VectorXd g_scalar = -k_gain;

  InternalModel im;
  im.q = ssg.q;
  im.psi = ssg.psi;
  im.G = Eigen::kroneckerProduct(g_scalar, Eigen::MatrixXd::Identity(ssg.q, ssg.q));
  im.F = ssg.phi + im.G * im.psi;

  // Independent verification of the placement through the characteristic
  // polynomial of the scalar-block closed loop.
  const Eigen::MatrixXd f_scalar = poly::companion(ssg.coeffs) + g_scalar * Eigen::RowVectorXd::Unit(n_p, 0);
  const std::vector<double> achieved = poly::characteristic(f_scalar);
  for (int k = 0; k < n_p; ++k) {
    if (std::abs(achieved[k] - desired[k]) > 1e-9 * std::max(1.0, std::abs(desired[k])))
      throw std::runtime_error("design_G: pole placement failed verification");
  }
  if (max_real_eigenvalue(im.F) >= -1e-9)
    throw std::runtime_error("design_G: resulting F is not Hurwitz");
  return im;
}

InternalModel internal_model_from_matrices(Eigen::MatrixXd F, Eigen::MatrixXd G, int q) {
  if (q <= 0) throw std::invalid_argument("internal_model_from_matrices: q must be positive");
  if (F.rows() == 0 || F.rows() != F.cols())
    throw std::invalid_argument("internal_model_from_matrices: F must be square and non-empty");
  if (G.rows() != F.rows() || G.cols() != q)
    throw std::invalid_argument("internal_model_from_matrices: G must be F-rows x q");
  if (F.rows() % q != 0)
    throw std::invalid_argument("internal_model_from_matrices: F size must be a multiple of q");
  InternalModel im;
  im.q = q;
  im.psi = Eigen::MatrixXd::Zero(q, F.rows());
  im.psi.leftCols(q) = Eigen::MatrixXd::Identity(q, q);
  im.F = std::move(F);
  im.G = std::move(G);
  if (max_real_eigenvalue(im.F) >= -1e-9)
    throw std::invalid_argument("internal_model_from_matrices: F is not Hurwitz");
  return im;
}

Eigen::VectorXd internal_model_rhs(const InternalModel& im, const Eigen::VectorXd& eta,
                                   const Eigen::VectorXd& u) {
  if (eta.size() != im.F.rows() || u.size() != im.q)
    throw std::invalid_argument("internal_model_rhs: dimension mismatch");
  return im.F * eta + im.G * u;
}

}  // namespace opticoord
