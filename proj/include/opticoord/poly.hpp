// Small polynomial helpers shared by the control-design code.
//
// Convention used throughout: a monic polynomial of degree n is stored as its
// n non-leading coefficients in ascending power order,
//   {c0, c1, ..., c_{n-1}}  <->  c0 + c1*s + ... + c_{n-1}*s^{n-1} + s^n.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace opticoord::poly {

// Companion matrix of a monic polynomial (top-right identity, coefficient
// row at the bottom). Eigenvalues of the result are the polynomial roots.
Eigen::MatrixXd companion(const std::vector<double>& coeffs);

// Characteristic polynomial of a square matrix via the Faddeev-LeVerrier
// recursion (exact in exact arithmetic, no eigendecomposition involved).
std::vector<double> characteristic(const Eigen::MatrixXd& a);

// Expands prod_i (s - r_i) for a conjugate-closed root list; throws
// std::invalid_argument if the imaginary parts do not cancel.
std::vector<double> from_roots(const std::vector<std::complex<double>>& roots);

// Roots as eigenvalues of the companion matrix.
std::vector<std::complex<double>> roots(const std::vector<double>& coeffs);

}  // namespace opticoord::poly
