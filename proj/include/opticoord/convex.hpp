// Convex constraint sets with Euclidean projection, and local objective
// functions with gradients and (optional) strong-convexity / Lipschitz
// declarations.
//
// Supported set shapes are boxes (per-coordinate intervals, possibly
// unbounded), balls, and user-supplied projection hooks. Boxes are closed
// under intersection, which is all the centralized solver needs.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace opticoord {

enum class SetKind { WholeSpace, Box, Ball, Custom };

class ConvexSet {
 public:
  static ConvexSet whole_space(int dim);
  static ConvexSet box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static ConvexSet interval(double lo, double hi);  // one-dimensional box
  static ConvexSet ball(Eigen::VectorXd center, double radius);
  static ConvexSet custom(int dim, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> projector);

  SetKind kind() const { return kind_; }
  int dimension() const { return dim_; }

  // Nearest point of the set (identity for points already inside).
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  // In-place flavor used on the simulation hot path; boxes and balls only
  // touch `x` when it is outside.
  void project_in_place(Eigen::Ref<Eigen::VectorXd> x) const;

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;

  // Box accessors (throw for other kinds).
  const Eigen::VectorXd& lower() const;
  const Eigen::VectorXd& upper() const;

 private:
  ConvexSet() = default;

  SetKind kind_ = SetKind::WholeSpace;
  int dim_ = 0;
  Eigen::VectorXd lo_, hi_;      // box
  Eigen::VectorXd center_;       // ball
  double radius_ = 0.0;          // ball
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> projector_;  // custom
};

class LocalObjective {
 public:
  using ValueFn = std::function<double(const Eigen::VectorXd&)>;
  using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  LocalObjective(int dim, ValueFn value, GradientFn gradient,
                 std::optional<double> strong_convexity_lb = std::nullopt,
                 std::optional<double> gradient_lipschitz_ub = std::nullopt);

  int dimension() const { return dim_; }
  double value(const Eigen::VectorXd& y) const { return value_(y); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const { return gradient_(y); }

  std::optional<double> strong_convexity_lb() const { return lb_; }
  std::optional<double> gradient_lipschitz_ub() const { return ub_; }

  // The four scalar objectives used by the oscillator benchmark scenario
  // (index 1..4), each declared 1-strongly convex with 3-Lipschitz gradient.
  static LocalObjective example1(int index);

  // (y - c)^T Q (y - c) / 2 with Q symmetric positive definite; bounds are
  // the extreme eigenvalues of Q.
  static LocalObjective quadratic(Eigen::MatrixXd q_matrix, Eigen::VectorXd center);

 private:
  int dim_;
  ValueFn value_;
  GradientFn gradient_;
  std::optional<double> lb_, ub_;
};

Eigen::VectorXd project(const ConvexSet& set, const Eigen::VectorXd& x);
Eigen::VectorXd evaluate_gradient(const LocalObjective& obj, const Eigen::VectorXd& y);

// Compares the analytic gradient against central finite differences with
// step 1e-6 * max(1, |y_k|); returns the worst mixed abs/rel mismatch.
double gradient_check(const LocalObjective& obj, const Eigen::VectorXd& y);

struct Assumption1Report {
  double min_strong_convexity = 0.0;  // min over sampled pairs of <dg, dy>/|dy|^2
  double max_lipschitz = 0.0;         // max over sampled pairs of |dg|/|dy|
  std::optional<double> declared_lb;
  std::optional<double> declared_ub;
  int n_pairs = 0;
  bool strong_convexity_ok = true;    // vacuously true when no bound declared
  bool lipschitz_ok = true;
  bool pass() const { return strong_convexity_ok && lipschitz_ok; }
};

// Samples point pairs inside `set` and measures the observed
// strong-convexity and Lipschitz ratios against the declared bounds.
// Sampling can only disprove the bounds, not certify them.
Assumption1Report check_assumption1(const LocalObjective& obj, const ConvexSet& set,
                                    int n_samples, std::uint64_t seed);

}  // namespace opticoord
