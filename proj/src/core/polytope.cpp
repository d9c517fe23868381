#include "popgame/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "popgame/error.hpp"
#include "popgame/game.hpp"

namespace popgame {

Vector nonnegative_least_squares(const Matrix& a, const Vector& b) {
  const Eigen::Index n = a.cols();
  Vector x = Vector::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 1e-13 * std::max(1.0, a.cwiseAbs().maxCoeff()) *
                     std::max(1.0, b.cwiseAbs().maxCoeff());

  auto solve_passive = [&](Vector& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    Matrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c)
      sub.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
    const Vector z = sub.completeOrthogonalDecomposition().solve(b);
    s = Vector::Zero(n);
    for (std::size_t c = 0; c < idx.size(); ++c) s[idx[c]] = z[static_cast<Eigen::Index>(c)];
  };

  const int max_outer = static_cast<int>(3 * n + 10);
  for (int outer = 0; outer < max_outer; ++outer) {
    const Vector w = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    Vector s;
    for (int inner = 0; inner <= n; ++inner) {
      solve_passive(s);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && s[j] <= 0.0) feasible = false;
      if (feasible) break;
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s[j] <= 0.0) {
          const double denom = x[j] - s[j];
          if (denom > 0.0) alpha = std::min(alpha, x[j] / denom);
        }
      }
      if (!std::isfinite(alpha)) alpha = 0.0;
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
    x = s.cwiseMax(0.0);
  }
  return x;
}

PayoffPolytope::PayoffPolytope(const std::vector<Vector>& points) {
  if (points.empty()) throw ValidationError("polytope needs at least one point");
  dim_ = static_cast<std::size_t>(points.front().size());
  for (const Vector& p : points) {
    if (static_cast<std::size_t>(p.size()) != dim_)
      throw ValidationError("polytope points have mixed dimensions");
    if (!p.allFinite()) throw ValidationError("polytope point is not finite");
    const bool duplicate = std::any_of(vertices_.begin(), vertices_.end(), [&](const Vector& v) {
      return (v - p).cwiseAbs().maxCoeff() <= kDedupTolerance;
    });
    if (!duplicate) vertices_.push_back(p);
  }
  const auto d = static_cast<Eigen::Index>(dim_);
  const auto k = static_cast<Eigen::Index>(vertices_.size());
  system_.resize(d + 1, k);
  lower_ = vertices_.front();
  upper_ = vertices_.front();
  for (Eigen::Index j = 0; j < k; ++j) {
    const Vector& v = vertices_[static_cast<std::size_t>(j)];
    system_.col(j).head(d) = v;
    system_(d, j) = 1.0;
    lower_ = lower_.cwiseMin(v);
    upper_ = upper_.cwiseMax(v);
  }
  if (dim_ == 2 && vertices_.size() >= 3) build_edges();
}

// Counter-clockwise hull (monotone chain) and its outward edge normals;
// only used to accept interior points without solving the NNLS problem.
void PayoffPolytope::build_edges() {
  std::vector<Vector> pts = vertices_;
  std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  auto cross = [](const Vector& o, const Vector& a, const Vector& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Vector> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) return;
  edge_normals_.resize(static_cast<Eigen::Index>(hull.size()), 2);
  edge_offsets_.resize(static_cast<Eigen::Index>(hull.size()));
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vector& a = hull[i];
    const Vector& b = hull[(i + 1) % hull.size()];
    Vector n(2);
    n << b[1] - a[1], a[0] - b[0];
    const double len = n.norm();
    if (!(len > 0.0)) {
      edge_normals_.resize(0, 2);
      return;
    }
    n /= len;
    edge_normals_.row(static_cast<Eigen::Index>(i)) = n.transpose();
    edge_offsets_[static_cast<Eigen::Index>(i)] = n.dot(a);
  }
}

Vector PayoffPolytope::fit(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_)
    throw ValidationError("point has dimension " + std::to_string(x.size()) +
                          ", polytope has " + std::to_string(dim_));
  Vector rhs(x.size() + 1);
  rhs.head(x.size()) = x;
  rhs[x.size()] = 1.0;
  return nonnegative_least_squares(system_, rhs);
}

double PayoffPolytope::membership_residual(const Vector& x) const {
  const Vector w = fit(x);
  Vector rhs(x.size() + 1);
  rhs.head(x.size()) = x;
  rhs[x.size()] = 1.0;
  return (system_ * w - rhs).cwiseAbs().maxCoeff();
}

bool PayoffPolytope::contains(const Vector& x) const {
  // Cheap reject outside the bounding box.
  if (static_cast<std::size_t>(x.size()) == dim_) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] < lower_[i] - kResidualTolerance || x[i] > upper_[i] + kResidualTolerance)
        return false;
    if (edge_normals_.rows() > 0 &&
        ((edge_normals_ * x - edge_offsets_).array() <= 0.0).all())
      return true;
  }
  return membership_residual(x) <= kResidualTolerance;
}

std::optional<Vector> PayoffPolytope::convex_weights(const Vector& x) const {
  const Vector w = fit(x);
  Vector rhs(x.size() + 1);
  rhs.head(x.size()) = x;
  rhs[x.size()] = 1.0;
  if ((system_ * w - rhs).cwiseAbs().maxCoeff() > kResidualTolerance) return std::nullopt;
  return w / w.sum();
}

PayoffPolytope payoff_polytope(const VectorPayoffGame& game) {
  std::vector<Vector> points;
  for (std::size_t l = 0; l < game.n_actions(); ++l)
    for (std::size_t k = 0; k < game.n_actions(); ++k) points.push_back(game.payoff(l, k));
  return PayoffPolytope(points);
}

std::vector<Vector> extreme_points(const PayoffPolytope& poly) {
  const auto& v = poly.vertices();
  if (v.size() <= 1) return v;
  std::vector<Vector> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::vector<Vector> others;
    for (std::size_t j = 0; j < v.size(); ++j)
      if (j != i) others.push_back(v[j]);
    if (!PayoffPolytope(others).contains(v[i])) out.push_back(v[i]);
  }
  return out;
}

}  // namespace popgame
