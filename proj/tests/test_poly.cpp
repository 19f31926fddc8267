#include <doctest.h>

#include <algorithm>
#include <complex>

#include "opticoord/poly.hpp"

using namespace opticoord;

TEST_CASE("companion matrix realizes its polynomial") {
  // s^2 + 3s + 2 = (s+1)(s+2)
  const Eigen::MatrixXd c = poly::companion({2.0, 3.0});
  REQUIRE(c.rows() == 2);
  Eigen::VectorXcd eig = c.eigenvalues();
  std::vector<double> re = {eig[0].real(), eig[1].real()};
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(re[1] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(eig[0].imag()) < 1e-12);
}

TEST_CASE("characteristic recovers companion coefficients") {
  const std::vector<double> coeffs = {-4.0, 4.0, -1.0};  // s^3 - s^2 + 4s - 4
  const std::vector<double> back = poly::characteristic(poly::companion(coeffs));
  REQUIRE(back.size() == coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    CHECK(back[i] == doctest::Approx(coeffs[i]).epsilon(1e-12));
  }
}

TEST_CASE("characteristic of a known matrix") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;  // char poly s^2 - 5s - 2
  const std::vector<double> c = poly::characteristic(a);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("from_roots expands conjugate-closed root sets") {
  // (s + 1 - i)(s + 1 + i) = s^2 + 2s + 2
  const std::vector<double> c =
      poly::from_roots({{-1.0, 1.0}, {-1.0, -1.0}});
  REQUIRE(c.size() == 2);
  CHECK(c[0] == doctest::Approx(2.0));
  CHECK(c[1] == doctest::Approx(2.0));

  CHECK_THROWS_AS((void)poly::from_roots({{-1.0, 1.0}, {-2.0, 0.0}}),
                  std::invalid_argument);
}

TEST_CASE("roots round-trips from_roots") {
  const std::vector<double> coeffs = poly::from_roots({{-1.0, 0.0}, {-2.0, 0.0}, {-3.0, 0.0}});
  auto rts = poly::roots(coeffs);
  std::vector<double> re;
  for (auto z : rts) {
    CHECK(std::abs(z.imag()) < 1e-9);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(re[1] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(re[2] == doctest::Approx(-1.0).epsilon(1e-9));
}
