// Disturbance exosystems, steady-state (companion) generators, and
// internal-model compensator design.
//
// A disturbance d(t) = D * exp(S t) * w0 is characterized, up to initial
// conditions, by the minimal polynomial of S. The steady-state generator
// (Phi, Psi) is the block-companion realization of that polynomial; adding
// an output injection G with F = Phi + G*Psi Hurwitz yields the compensator
//   eta_dot = F eta + G u,   u_id = -Psi eta
// which asymptotically reproduces -d(t) inside the loop.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace opticoord {

class ExosystemSpec {
 public:
  // Eigenvalues of S with real part below -1e-9*max(1, |S|) are rejected
  // unless allow_decaying_modes is set: decaying modes vanish on their own
  // and would silently enlarge the compensator.
  ExosystemSpec(Eigen::MatrixXd S, Eigen::MatrixXd D, Eigen::VectorXd w0,
                bool allow_decaying_modes = false);

  // d(t) = 0 for all t (S scalar zero, D zero row).
  static ExosystemSpec none(int q);

  const Eigen::MatrixXd& S() const { return s_; }
  const Eigen::MatrixXd& D() const { return d_; }
  const Eigen::VectorXd& w0() const { return w0_; }
  int state_dim() const { return static_cast<int>(s_.rows()); }
  int output_dim() const { return static_cast<int>(d_.rows()); }

  // d(t) via matrix exponential; the closed-loop simulation instead
  // co-integrates w_dot = S w, and the two paths must agree.
  Eigen::VectorXd disturbance(double t) const;
  Eigen::VectorXd output(const Eigen::VectorXd& w) const { return d_ * w; }

 private:
  Eigen::MatrixXd s_, d_;
  Eigen::VectorXd w0_;
};

inline Eigen::VectorXd disturbance(const ExosystemSpec& spec, double t) {
  return spec.disturbance(t);
}

// Lowest-degree monic polynomial p with p(S) = 0, found by Krylov-style
// rank testing on vec(S^0), vec(S^1), ... Returned as the ascending
// non-leading coefficients {c_0, ..., c_{n_p-1}} of
// p(s) = c_0 + c_1 s + ... + s^{n_p}.
std::vector<double> minimal_polynomial(const Eigen::MatrixXd& S);

struct SteadyStateGenerator {
  Eigen::MatrixXd phi;  // (q*n_p) x (q*n_p) block companion
  Eigen::MatrixXd psi;  // q x (q*n_p) block selector [I 0 ... 0]
  int n_p = 0;          // minimal-polynomial degree
  int q = 0;            // disturbance dimension
  std::vector<double> coeffs;  // ascending non-leading minimal-poly coeffs
};

// Companion pair for the given minimal-polynomial coefficients: phi has
// identity superdiagonal blocks and bottom block row (-c_0, ..., -c_{n_p-1}),
// each block scaled by I_q; psi selects the first block.
SteadyStateGenerator build_ssg(const std::vector<double>& coeffs, int q);

// Generator state reproducing d: tau(0) = col(d(0), d'(0), ..., d^(n_p-1)(0)),
// with d^(k)(0) = D S^k w0. Then Psi * tau(t) = d(t) along tau_dot = phi*tau.
Eigen::VectorXd ssg_initial_state(const SteadyStateGenerator& ssg, const ExosystemSpec& exo);

struct InternalModel {
  Eigen::MatrixXd F;    // Hurwitz, (q*n_p) x (q*n_p)
  Eigen::MatrixXd G;    // (q*n_p) x q
  Eigen::MatrixXd psi;  // q x (q*n_p)
  int q = 0;

  int state_dim() const { return static_cast<int>(F.rows()); }
  // u_id = -psi * eta
  Eigen::VectorXd compensation(const Eigen::VectorXd& eta) const { return -psi * eta; }
};

// Pole placement: G such that F = phi + G*psi has exactly the requested
// eigenvalues (with multiplicity q each). Poles must be conjugate-closed
// with strictly negative real parts. Uses Ackermann's formula on the
// scalar companion block, then scales by I_q.
InternalModel design_G(const SteadyStateGenerator& ssg,
                       const std::vector<std::complex<double>>& desired_poles);

// Wraps explicitly-supplied compensator matrices (psi is the standard
// selector for the given q); verifies F = psi-compatible sizes, F Hurwitz.
InternalModel internal_model_from_matrices(Eigen::MatrixXd F, Eigen::MatrixXd G, int q);

// eta_dot = F eta + G u.
Eigen::VectorXd internal_model_rhs(const InternalModel& im, const Eigen::VectorXd& eta,
                                   const Eigen::VectorXd& u);

// Largest real part among eig(m); Hurwitz iff < 0.
double max_real_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace opticoord
