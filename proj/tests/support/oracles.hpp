#pragma once

// Independent reference computations used to check the library. None of
// these call into the code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Euclidean projection onto conv(points) by enumerating every affinely
// independent subset of at most dim+1 points: the projection lies in the
// relative interior of one of these simplices.
inline Vec project_onto_hull(const std::vector<Vec>& points, const Vec& x) {
  const std::size_t k = points.size();
  const auto d = x.size();
  Vec best = points.front();
  double best_dist = (points.front() - x).norm();
  const std::size_t max_size = std::min<std::size_t>(k, static_cast<std::size_t>(d) + 1);
  std::vector<std::size_t> idx;
  // Enumerate subsets by bitmask (k is small in tests).
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    idx.clear();
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    if (idx.size() > max_size) continue;
    const Vec& p0 = points[idx[0]];
    const auto r = static_cast<Eigen::Index>(idx.size()) - 1;
    Vec cand;
    Vec bary;
    if (r == 0) {
      cand = p0;
    } else {
      Mat e(d, r);
      for (Eigen::Index j = 0; j < r; ++j) e.col(j) = points[idx[static_cast<std::size_t>(j + 1)]] - p0;
      Eigen::FullPivHouseholderQR<Mat> qr(e);
      if (qr.rank() < r) continue;
      const Vec coef = (e.transpose() * e).ldlt().solve(e.transpose() * (x - p0));
      if ((coef.array() < -1e-12).any() || coef.sum() > 1.0 + 1e-12) continue;
      cand = p0 + e * coef;
    }
    const double dist = (cand - x).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = cand;
    }
  }
  return best;
}

inline double distance_to_hull(const std::vector<Vec>& points, const Vec& x) {
  return (project_onto_hull(points, x) - x).norm();
}

// Nonnegative least squares by exhaustive active-set enumeration.
inline Vec nnls_bruteforce(const Mat& a, const Vec& b) {
  const auto n = a.cols();
  Vec best = Vec::Zero(n);
  double best_res = (a * best - b).norm();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j)
      if (mask & (1u << j)) cols.push_back(j);
    Mat sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
    const Vec z = sub.completeOrthogonalDecomposition().solve(b);
    if ((z.array() < 0.0).any()) continue;
    Vec full = Vec::Zero(n);
    for (std::size_t j = 0; j < cols.size(); ++j) full[cols[j]] = z[static_cast<Eigen::Index>(j)];
    const double res = (a * full - b).norm();
    if (res < best_res) {
      best_res = res;
      best = full;
    }
  }
  return best;
}

// Sample-and-hold bang-bang flow with a tiny hold time: the reference the
// event-driven integrator must agree with.
inline Vec hold_flow(const std::vector<Vec>& anchors, const Vec& y, const Mat& w, Vec x,
                     double duration, double h) {
  std::vector<Vec> normals;
  for (const Vec& a : anchors) normals.push_back(w * (a - y));
  Vec d(x.size());
  const auto steps = static_cast<long>(std::ceil(duration / h - 1e-9));
  for (long s = 0; s < steps; ++s) {
    const double dt = std::min(h, duration - static_cast<double>(s) * h);
    d.noalias() = x - y;
    std::size_t best = 0;
    double score = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      const double v = d.dot(normals[k]);
      if (v < score) {
        score = v;
        best = k;
      }
    }
    const double decay = std::exp(-dt);
    x = anchors[best] + (x - anchors[best]) * decay;
  }
  return x;
}

// Random point of the standard simplex (flat Dirichlet).
inline Vec random_simplex(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Vec v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = e(rng);
  return v / v.sum();
}

}  // namespace oracle
