#pragma once

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace mavd_test {

inline Eigen::VectorXd random_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double step = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd p = x, m = x;
    p[i] += step;
    m[i] -= step;
    g[i] = (f(p) - f(m)) / (2.0 * step);
  }
  return g;
}

// Closed-form objectives and fronts of the two benchmark problems, written
// out independently of the library.
inline double quad_f(int i, const Eigen::Vector2d& x) {
  if (i == 0) return 0.5 * (2.0 * (x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1]);
  return 0.5 * (x[0] * x[0] + 2.0 * (x[1] - 1.0) * (x[1] - 1.0));
}

inline Eigen::Vector2d quad_front(double l) { return {2.0 * l / (1.0 + l), 2.0 * (1.0 - l) / (2.0 - l)}; }

inline double lse_f(int i, const Eigen::Vector2d& x) {
  const double s = i == 0 ? 1.0 : -1.0;
  const double e[4] = {10 * x[0] + 10 * x[1], 10 * x[0] - 10 * x[1] + 20 * s, -10 * x[0] - 10 * x[1],
                       -10 * x[0] + 10 * x[1] - 20 * s};
  long double mx = e[0];
  for (double v : e) mx = std::max<long double>(mx, v);
  long double acc = 0;
  for (double v : e) acc += std::exp(static_cast<long double>(v) - mx);
  return static_cast<double>(mx + std::log(acc));
}

inline Eigen::Vector2d lse_front(double l) { return {-1.0 + 2.0 * l, 1.0 - 2.0 * l}; }

/// max over a uniform lambda grid of min_i (f_i(x) - f_i(z(lambda)))
template <class F, class Z>
double grid_u0(F f, Z z, const Eigen::Vector2d& x, long n) {
  const double f0 = f(0, x), f1 = f(1, x);
  double best = -INFINITY;
  for (long j = 0; j < n; ++j) {
    const Eigen::Vector2d p = z(static_cast<double>(j) / static_cast<double>(n - 1));
    best = std::max(best, std::min(f0 - f(0, p), f1 - f(1, p)));
  }
  return best;
}

/// max of 1/2 |z - x0|^2 over grid points with F(z) <= F(x0)
template <class F, class Z>
double grid_R(F f, Z z, const Eigen::Vector2d& x0, long n) {
  const double f0 = f(0, x0), f1 = f(1, x0);
  double best = -INFINITY;
  for (long j = 0; j < n; ++j) {
    const Eigen::Vector2d p = z(static_cast<double>(j) / static_cast<double>(n - 1));
    if (f(0, p) <= f0 && f(1, p) <= f1) best = std::max(best, 0.5 * (p - x0).squaredNorm());
  }
  return best;
}

}  // namespace mavd_test
