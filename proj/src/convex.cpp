#include "opticoord/convex.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>

namespace opticoord {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ConvexSet ConvexSet::whole_space(int dim) {
  if (dim <= 0) throw std::invalid_argument("ConvexSet: dimension must be positive");
  ConvexSet s;
  s.kind_ = SetKind::WholeSpace;
  s.dim_ = dim;
  return s;
}

ConvexSet ConvexSet::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() == 0 || lo.size() != hi.size())
    throw std::invalid_argument("ConvexSet::box: bound vectors must be non-empty and equal-sized");
  for (Eigen::Index k = 0; k < lo.size(); ++k) {
    if (std::isnan(lo(k)) || std::isnan(hi(k)) || lo(k) > hi(k))
      throw std::invalid_argument("ConvexSet::box: requires lo <= hi in every coordinate");
  }
  ConvexSet s;
  s.kind_ = SetKind::Box;
  s.dim_ = static_cast<int>(lo.size());
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

ConvexSet ConvexSet::interval(double lo, double hi) {
  Eigen::VectorXd l(1), h(1);
  l(0) = lo;
  h(0) = hi;
  return box(std::move(l), std::move(h));
}

ConvexSet ConvexSet::ball(Eigen::VectorXd center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("ConvexSet::ball: empty center");
  if (!(radius >= 0.0)) throw std::invalid_argument("ConvexSet::ball: radius must be >= 0");
  ConvexSet s;
  s.kind_ = SetKind::Ball;
  s.dim_ = static_cast<int>(center.size());
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

ConvexSet ConvexSet::custom(int dim, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> projector) {
  if (dim <= 0) throw std::invalid_argument("ConvexSet::custom: dimension must be positive");
  if (!projector) throw std::invalid_argument("ConvexSet::custom: projector must be callable");
  ConvexSet s;
  s.kind_ = SetKind::Custom;
  s.dim_ = dim;
  s.projector_ = std::move(projector);
  return s;
}

Eigen::VectorXd ConvexSet::project(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("ConvexSet::project: dimension mismatch");
  if (kind_ == SetKind::Custom) {
    Eigen::VectorXd p = projector_(x);
    if (p.size() != dim_) throw std::invalid_argument("ConvexSet::project: custom projector changed dimension");
    return p;
  }
  Eigen::VectorXd p = x;
  project_in_place(p);
  return p;
}

void ConvexSet::project_in_place(Eigen::Ref<Eigen::VectorXd> x) const {
  if (x.size() != dim_) throw std::invalid_argument("ConvexSet::project: dimension mismatch");
  switch (kind_) {
    case SetKind::WholeSpace:
      return;
    case SetKind::Box:
      for (Eigen::Index k = 0; k < x.size(); ++k)
        x(k) = std::min(std::max(x(k), lo_(k)), hi_(k));
      return;
    case SetKind::Ball: {
      const double d = (x - center_).norm();
      if (d > radius_) x = center_ + (radius_ / d) * (x - center_);
      return;
    }
    case SetKind::Custom: {
      Eigen::VectorXd p = projector_(x);
      if (p.size() != dim_) throw std::invalid_argument("ConvexSet::project: custom projector changed dimension");
      x = p;
      return;
    }
  }
}

bool ConvexSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != dim_) throw std::invalid_argument("ConvexSet::contains: dimension mismatch");
  return (project(x) - x).norm() <= tol;
}

const Eigen::VectorXd& ConvexSet::lower() const {
  if (kind_ != SetKind::Box) throw std::logic_error("ConvexSet::lower: not a box");
  return lo_;
}

const Eigen::VectorXd& ConvexSet::upper() const {
  if (kind_ != SetKind::Box) throw std::logic_error("ConvexSet::upper: not a box");
  return hi_;
}

LocalObjective::LocalObjective(int dim, ValueFn value, GradientFn gradient,
                               std::optional<double> strong_convexity_lb,
                               std::optional<double> gradient_lipschitz_ub)
    : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)),
      lb_(strong_convexity_lb), ub_(gradient_lipschitz_ub) {
  if (dim_ <= 0) throw std::invalid_argument("LocalObjective: dimension must be positive");
  if (!value_ || !gradient_) throw std::invalid_argument("LocalObjective: value and gradient must be callable");
  if (lb_ && ub_ && *lb_ > *ub_)
    throw std::invalid_argument("LocalObjective: strong-convexity bound exceeds Lipschitz bound");
}

namespace {

Eigen::VectorXd scalar_vec(double v) {
  Eigen::VectorXd out(1);
  out(0) = v;
  return out;
}

}  // namespace

LocalObjective LocalObjective::example1(int index) {
  // Scalar objectives; every one is 1-strongly convex with a 3-Lipschitz
  // gradient on the benchmark's constraint intervals.
  switch (index) {
    case 1:
      return LocalObjective(
          1,
          [](const Eigen::VectorXd& y) {
            const double s = y(0) - 8.0;
            return s * s;
          },
          [](const Eigen::VectorXd& y) { return scalar_vec(2.0 * (y(0) - 8.0)); },
          1.0, 3.0);
    case 2:
      return LocalObjective(
          1,
          [](const Eigen::VectorXd& y) {
            const double v = y(0);
            const double s = v - 5.0;
            return v * v / (80.0 * std::log(v * v + 2.0)) + s * s;
          },
          [](const Eigen::VectorXd& y) {
            const double v = y(0);
            const double el = std::log(v * v + 2.0);
            const double num = 2.0 * v * el - 2.0 * v * v * v / (v * v + 2.0);
            return scalar_vec(num / (80.0 * el * el) + 2.0 * (v - 5.0));
          },
          1.0, 3.0);
    case 3:
      return LocalObjective(
          1,
          [](const Eigen::VectorXd& y) {
            const double v = y(0);
            return v * v / (20.0 * std::sqrt(v * v + 1.0)) + v * v;
          },
          [](const Eigen::VectorXd& y) {
            const double v = y(0);
            const double w = v * v + 1.0;
            return scalar_vec((v * v * v + 2.0 * v) / (20.0 * w * std::sqrt(w)) + 2.0 * v);
          },
          1.0, 3.0);
    case 4:
      return LocalObjective(
          1,
          [](const Eigen::VectorXd& y) {
            const double v = y(0);
            return std::log(std::exp(-0.05 * v) + std::exp(0.05 * v)) + v * v;
          },
          [](const Eigen::VectorXd& y) {
            const double v = y(0);
            return scalar_vec(0.05 * std::tanh(0.05 * v) + 2.0 * v);
          },
          1.0, 3.0);
    default:
      throw std::invalid_argument("LocalObjective::example1: index must be 1..4");
  }
}

LocalObjective LocalObjective::quadratic(Eigen::MatrixXd q_matrix, Eigen::VectorXd center) {
  if (q_matrix.rows() != q_matrix.cols() || q_matrix.rows() != center.size())
    throw std::invalid_argument("LocalObjective::quadratic: dimension mismatch");
  if (!q_matrix.isApprox(q_matrix.transpose(), 1e-12))
    throw std::invalid_argument("LocalObjective::quadratic: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q_matrix);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) throw std::invalid_argument("LocalObjective::quadratic: matrix must be positive definite");
  const int dim = static_cast<int>(center.size());
  auto q = std::make_shared<Eigen::MatrixXd>(std::move(q_matrix));
  auto c = std::make_shared<Eigen::VectorXd>(std::move(center));
  return LocalObjective(
      dim,
      [q, c](const Eigen::VectorXd& y) {
        const Eigen::VectorXd d = y - *c;
        return 0.5 * d.dot(*q * d);
      },
      [q, c](const Eigen::VectorXd& y) -> Eigen::VectorXd { return *q * (y - *c); },
      lo, hi);
}

Eigen::VectorXd project(const ConvexSet& set, const Eigen::VectorXd& x) { return set.project(x); }

Eigen::VectorXd evaluate_gradient(const LocalObjective& obj, const Eigen::VectorXd& y) {
  if (y.size() != obj.dimension()) throw std::invalid_argument("evaluate_gradient: dimension mismatch");
  Eigen::VectorXd g = obj.gradient(y);
  if (g.size() != obj.dimension()) throw std::invalid_argument("evaluate_gradient: gradient changed dimension");
  return g;
}

double gradient_check(const LocalObjective& obj, const Eigen::VectorXd& y) {
  const Eigen::VectorXd g = evaluate_gradient(obj, y);
  double worst = 0.0;
  Eigen::VectorXd probe = y;
  for (int k = 0; k < obj.dimension(); ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(y(k)));
    probe(k) = y(k) + h;
    const double fp = obj.value(probe);
    probe(k) = y(k) - h;
    const double fm = obj.value(probe);
    probe(k) = y(k);
    const double fd = (fp - fm) / (2.0 * h);
    const double err = std::abs(fd - g(k)) / std::max(1.0, std::abs(g(k)));
    worst = std::max(worst, err);
  }
  return worst;
}

namespace {

// Uniform draw from a bounding region of the set, then projected inside.
Eigen::VectorXd sample_in_set(const ConvexSet& set, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd x(set.dimension());
  if (set.kind() == SetKind::Box) {
    for (int k = 0; k < set.dimension(); ++k) {
      const double lo = std::max(set.lower()(k), -10.0);
      const double hi = std::min(set.upper()(k), 10.0);
      x(k) = lo + (hi - lo) * 0.5 * (unit(rng) + 1.0);
    }
    return x;
  }
  for (int k = 0; k < set.dimension(); ++k) x(k) = 10.0 * unit(rng);
  return set.project(x);
}

}  // namespace

Assumption1Report check_assumption1(const LocalObjective& obj, const ConvexSet& set,
                                    int n_samples, std::uint64_t seed) {
  if (obj.dimension() != set.dimension())
    throw std::invalid_argument("check_assumption1: objective/set dimension mismatch");
  if (n_samples < 2) throw std::invalid_argument("check_assumption1: need at least 2 samples");

  std::mt19937_64 rng(seed);
  Assumption1Report rep;
  rep.declared_lb = obj.strong_convexity_lb();
  rep.declared_ub = obj.gradient_lipschitz_ub();
  rep.min_strong_convexity = std::numeric_limits<double>::infinity();
  rep.max_lipschitz = 0.0;

  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd a = sample_in_set(set, rng);
    const Eigen::VectorXd b = sample_in_set(set, rng);
    const Eigen::VectorXd dy = a - b;
    const double dist2 = dy.squaredNorm();
    if (dist2 < 1e-16) continue;  // degenerate pair, skip
    const Eigen::VectorXd dg = obj.gradient(a) - obj.gradient(b);
    rep.min_strong_convexity = std::min(rep.min_strong_convexity, dg.dot(dy) / dist2);
    rep.max_lipschitz = std::max(rep.max_lipschitz, dg.norm() / std::sqrt(dist2));
    ++rep.n_pairs;
  }
  if (rep.n_pairs == 0) rep.min_strong_convexity = 0.0;

  constexpr double kSlack = 1e-9;
  if (rep.declared_lb) rep.strong_convexity_ok = rep.min_strong_convexity >= *rep.declared_lb - kSlack;
  if (rep.declared_ub) rep.lipschitz_ok = rep.max_lipschitz <= *rep.declared_ub + kSlack;
  return rep;
}

}  // namespace opticoord
