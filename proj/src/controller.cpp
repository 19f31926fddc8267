#include "opticoord/controller.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "opticoord/poly.hpp"

namespace opticoord {

bool hurwitz_check(const std::vector<double>& monic_ascending_coeffs) {
  if (monic_ascending_coeffs.empty())
    throw std::invalid_argument("hurwitz_check: polynomial degree must be >= 1");
  double max_re = -std::numeric_limits<double>::infinity();
  for (const auto& root : poly::roots(monic_ascending_coeffs))
    max_re = std::max(max_re, root.real());
  return max_re <= -1e-9;
}

StabilizerCoeffs::StabilizerCoeffs(std::vector<double> k) : k_(std::move(k)) {
  if (k_.empty()) throw std::invalid_argument("StabilizerCoeffs: need k_1..k_{n-1} with n >= 2");
  if (!hurwitz_check(k_))
    throw std::invalid_argument(
        "StabilizerCoeffs: k_1 + k_2*s + ... + s^{n-1} must be Hurwitz");
}

StabilizerCoeffs StabilizerCoeffs::binomial(int n) {
  if (n < 2) throw std::invalid_argument("StabilizerCoeffs::binomial: order must be >= 2");
  const std::vector<std::complex<double>> roots(n - 1, std::complex<double>(-1.0, 0.0));
  return StabilizerCoeffs(poly::from_roots(roots));
}

Eigen::VectorXd zeta(const Eigen::VectorXd& x_stack, const Eigen::VectorXd& r,
                     const StabilizerCoeffs& coeffs) {
  Eigen::VectorXd out(r.size());
  zeta_into(x_stack, r, coeffs, out);
  return out;
}

void zeta_into(const Eigen::Ref<const Eigen::VectorXd>& x_stack,
               const Eigen::Ref<const Eigen::VectorXd>& r, const StabilizerCoeffs& coeffs,
               Eigen::Ref<Eigen::VectorXd> out) {
  const int n = coeffs.order();
  const Eigen::Index q = r.size();
  if (x_stack.size() != n * q || out.size() != q)
    throw std::invalid_argument("zeta: state must have n blocks of dim(r)");
  const auto& k = coeffs.k();
  // k_1 weights the tracking error x - r; higher derivatives enter as-is.
  out = k[0] * (x_stack.head(q) - r);
  for (int j = 2; j <= n - 1; ++j) out += k[j - 1] * x_stack.segment((j - 1) * q, q);
  out += x_stack.tail(q);
}

RbfNetwork::RbfNetwork(Eigen::MatrixXd centers, double width)
    : centers_(std::move(centers)), width_(width) {
  if (centers_.size() == 0) throw std::invalid_argument("RbfNetwork: need at least one center");
  if (!centers_.allFinite()) throw std::invalid_argument("RbfNetwork: centers must be finite");
  if (!(width_ > 0.0)) throw std::invalid_argument("RbfNetwork: width must be positive");
}

RbfNetwork RbfNetwork::grid1d(int n_w, double lo, double hi, double width) {
  if (n_w < 1) throw std::invalid_argument("RbfNetwork::grid1d: n_w must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("RbfNetwork::grid1d: need lo < hi");
  Eigen::MatrixXd centers(1, n_w);
  if (n_w == 1) {
    centers(0, 0) = 0.5 * (lo + hi);
  } else {
    centers.row(0) = Eigen::RowVectorXd::LinSpaced(n_w, lo, hi);
  }
  const double spacing = n_w > 1 ? (hi - lo) / (n_w - 1) : (hi - lo);
  return RbfNetwork(std::move(centers), width > 0.0 ? width : 1.5 * spacing);
}

RbfNetwork RbfNetwork::tensor_grid(const std::vector<int>& counts, const Eigen::VectorXd& lo,
                                   const Eigen::VectorXd& hi, double width) {
  const int q = static_cast<int>(counts.size());
  if (q < 1 || lo.size() != q || hi.size() != q)
    throw std::invalid_argument("RbfNetwork::tensor_grid: counts/lo/hi must agree in dimension");
  long total = 1;
  double max_spacing = 0.0;
  for (int a = 0; a < q; ++a) {
    if (counts[a] < 1) throw std::invalid_argument("RbfNetwork::tensor_grid: counts must be >= 1");
    if (!(lo(a) < hi(a))) throw std::invalid_argument("RbfNetwork::tensor_grid: need lo < hi");
    total *= counts[a];
    max_spacing = std::max(max_spacing, counts[a] > 1 ? (hi(a) - lo(a)) / (counts[a] - 1)
                                                      : (hi(a) - lo(a)));
  }
  Eigen::MatrixXd centers(q, total);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int a = 0; a < q; ++a) {
      const int pos = static_cast<int>(rem % counts[a]);
      rem /= counts[a];
      centers(a, idx) = counts[a] > 1
                            ? lo(a) + pos * (hi(a) - lo(a)) / (counts[a] - 1)
                            : 0.5 * (lo(a) + hi(a));
    }
  }
  return RbfNetwork(std::move(centers), width > 0.0 ? width : 1.5 * max_spacing);
}

Eigen::VectorXd RbfNetwork::activations(const Eigen::VectorXd& r) const {
  Eigen::VectorXd out(n_w());
  activations_into(r, out);
  return out;
}

void RbfNetwork::activations_into(const Eigen::Ref<const Eigen::VectorXd>& r,
                                  Eigen::Ref<Eigen::VectorXd> out) const {
  if (r.size() != centers_.rows() || out.size() != centers_.cols())
    throw std::invalid_argument("RbfNetwork: dimension mismatch");
  out = (centers_.colwise() - r).colwise().squaredNorm().transpose();
  out = (-out.array() / (width_ * width_)).exp();
}

GainFunction GainFunction::quartic() {
  return GainFunction("quartic", [](const Eigen::Ref<const Eigen::VectorXd>& s) {
    const double n2 = s.squaredNorm();
    return n2 * n2 + 1.0;
  });
}

GainFunction GainFunction::custom(
    std::string name, std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)> rho) {
  if (!rho) throw std::invalid_argument("GainFunction::custom: rho must be callable");
  return GainFunction(std::move(name), std::move(rho));
}

AdaptiveState AdaptiveState::zeros(int n_w, int q, double ell) {
  if (n_w < 1 || q < 1) throw std::invalid_argument("AdaptiveState: n_w and q must be positive");
  AdaptiveState s;
  s.W = Eigen::MatrixXd::Zero(n_w, q);
  s.W0 = Eigen::MatrixXd::Zero(n_w, q);
  s.theta = 0.0;
  s.theta0 = 0.0;
  s.ell = ell;
  return s;
}

Eigen::VectorXd control(const AdaptiveState& adaptive, const RbfNetwork& net,
                        const GainFunction& gain, const Eigen::VectorXd& zeta,
                        const Eigen::VectorXd& r, const InternalModel& im,
                        const Eigen::VectorXd& eta) {
  const Eigen::VectorXd sigma = net.activations(r);
  Eigen::VectorXd u = -adaptive.W.transpose() * sigma;
  u -= adaptive.theta * gain(zeta) * zeta;
  u -= im.psi * eta;
  return u;
}

std::pair<Eigen::MatrixXd, double> adaptive_rhs(const AdaptiveState& adaptive,
                                                const RbfNetwork& net, const GainFunction& gain,
                                                const Eigen::VectorXd& zeta,
                                                const Eigen::VectorXd& r) {
  if (!(adaptive.ell > 0.0)) throw std::invalid_argument("adaptive_rhs: ell must be positive");
  const Eigen::VectorXd sigma = net.activations(r);
  Eigen::MatrixXd dW = -adaptive.ell * (adaptive.W - adaptive.W0);
  dW.noalias() += sigma * zeta.transpose();
  const double dtheta = -adaptive.ell * (adaptive.theta - adaptive.theta0) +
                        gain(zeta) * zeta.squaredNorm();
  return {std::move(dW), dtheta};
}

Eigen::VectorXd nn_approximation_error(const AgentSpec& plant, const RbfNetwork& net,
                                       const Eigen::MatrixXd& W, const Eigen::VectorXd& r) {
  if (r.size() != plant.q() || W.rows() != net.n_w() || W.cols() != plant.q())
    throw std::invalid_argument("nn_approximation_error: dimension mismatch");
  Eigen::VectorXd rest = Eigen::VectorXd::Zero(plant.state_dim());
  rest.head(plant.q()) = r;
  Eigen::VectorXd eps = plant.g(rest);  // feedforward target u(r, mu)
  eps.noalias() -= W.transpose() * net.activations(r);
  return eps;
}

}  // namespace opticoord
