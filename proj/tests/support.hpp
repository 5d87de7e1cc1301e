#pragma once
// Oracle helpers shared by the test suites. Everything here is implemented
// independently of the library code it checks: plain product-form Lagrange
// interpolation, composite Simpson integration, direct delta-form sums.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "dmuq/sparse_grid.hpp"

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels) {
  double h = (b - a) / (2 * panels);
  double s = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double simpson2d(const std::function<double(double, double)>& f, double ax,
                        double bx, double ay, double by, int panels) {
  return simpson(
      [&](double y) {
        return simpson([&](double x) { return f(x, y); }, ax, bx, panels);
      },
      ay, by, panels);
}

// product-form Lagrange cardinal, O(m) per evaluation, no barycentric trick
inline double lagrange_cardinal(const std::vector<double>& x, int k, double t) {
  double p = 1;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (static_cast<int>(j) == k) continue;
    p *= (t - x[j]) / (x[k] - x[j]);
  }
  return p;
}

using RealFn = std::function<double(std::span<const double>)>;

// full tensor-product interpolant U^{levels} f evaluated at y
inline double tensor_interpolant(dmuq::GridRule r, const dmuq::MultiIndex& levels,
                                 const RealFn& f, std::span<const double> y) {
  const int n = static_cast<int>(levels.size());
  std::vector<std::vector<double>> pts(n);
  std::vector<int> dims(n);
  for (int d = 0; d < n; ++d) {
    pts[d] = dmuq::cc_nodes(dmuq::growth(r, levels[d]));
    dims[d] = static_cast<int>(pts[d].size());
  }
  std::vector<int> k(n, 0);
  std::vector<double> node(n);
  double acc = 0;
  while (true) {
    double card = 1;
    for (int d = 0; d < n; ++d) {
      node[d] = pts[d][k[d]];
      card *= lagrange_cardinal(pts[d], k[d], y[d]);
    }
    acc += card * f(node);
    int d = n - 1;
    while (d >= 0 && ++k[d] == dims[d]) k[d--] = 0;
    if (d < 0) break;
  }
  return acc;
}

// sparse interpolant written as the sum of delta tensors over the index set,
// expanding each delta as sum_j (-1)^|j| U^{i-j} with U^0 = 0
inline double delta_form(dmuq::GridRule r, int n, int w, const RealFn& f,
                         std::span<const double> y) {
  double total = 0;
  for (const dmuq::MultiIndex& idx : dmuq::index_set(r, n, w)) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      dmuq::MultiIndex down(n);
      bool valid = true;
      int bits = 0;
      for (int d = 0; d < n; ++d) {
        int j = (mask >> d) & 1u;
        bits += j;
        down[d] = idx[d] - j;
        if (down[d] < 1) valid = false;
      }
      if (!valid) continue;
      double u = tensor_interpolant(r, down, f, y);
      total += (bits % 2 ? -1.0 : 1.0) * u;
    }
  }
  return total;
}

inline double monomial(std::span<const double> y, const dmuq::MultiIndex& p) {
  double v = 1;
  for (std::size_t d = 0; d < p.size(); ++d) v *= std::pow(y[d], p[d]);
  return v;
}

// mean of a monomial under the uniform product density on [-1,1]^n
inline double monomial_mean(const dmuq::MultiIndex& p) {
  double v = 1;
  for (int d : p) v *= (d % 2 == 1) ? 0.0 : 1.0 / (d + 1);
  return v;
}

inline std::vector<double> random_point(std::mt19937& rng, int n, double lo = -1,
                                        double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> y(n);
  for (double& v : y) v = u(rng);
  return y;
}

// least-squares slope of y against x
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_slope needs matched samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace oracle
