#include "dmuq/experiment.hpp"

#include <cmath>
#include <stdexcept>

namespace dmuq {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double bump(double t) {
  const double s = 4 * (t - 0.5) * (t - 0.5);
  if (s >= 1) return 0;
  return std::exp(-1.0 / (1.0 - s));
}

double bump_derivative(double t) {
  const double u = 2 * (t - 0.5);
  const double s = u * u;
  if (s >= 1) return 0;
  const double w = 1.0 - s;
  return std::exp(-1.0 / w) * (-4 * u / (w * w));
}

SquareTestcase build_square_testcase(double c, double corr_len, double period,
                                     int n_terms) {
  if (!(c >= 0) || !(corr_len > 0) || n_terms < 1)
    throw std::invalid_argument("bad testcase parameters");
  if (period != 1.0)
    throw std::invalid_argument("only unit period is supported");

  SquareTestcase tc;
  DeformationModel& m = tc.model;
  m.dim = 2;
  m.n_terms = n_terms;
  m.sqrt_mu.resize(n_terms);
  m.basis.resize(n_terms);

  const double scale = c * std::sqrt(3.0);
  m.sqrt_mu[0] = scale * std::sqrt(std::sqrt(kPi) * corr_len / 2);
  m.basis[0] = {[](const Vec2&) { return 1.0; },
                [](const Vec2&) { return Vec2::Zero().eval(); }};
  for (int n = 2; n <= n_terms; ++n) {
    m.sqrt_mu[n - 1] = scale * std::sqrt(std::sqrt(kPi) * corr_len) / n;
    // phi_n = n^{-1} sin or cos of floor(n/2) pi x1, so its gradient stays
    // bounded by pi/2 and the weighted B_l sums decay linearly
    const double k = kPi * (n / 2);
    const double amp = 1.0 / n;
    if (n % 2 == 0) {
      m.basis[n - 1] = {
          [k, amp](const Vec2& x) { return amp * std::sin(k * x[0]); },
          [k, amp](const Vec2& x) {
            return Vec2(amp * k * std::cos(k * x[0]), 0.0);
          }};
    } else {
      m.basis[n - 1] = {
          [k, amp](const Vec2& x) { return amp * std::cos(k * x[0]); },
          [k, amp](const Vec2& x) {
            return Vec2(-amp * k * std::sin(k * x[0]), 0.0);
          }};
    }
  }

  m.direction.value = [](const Vec2& x) {
    return Vec2(0.0, x[1] > 0.5 ? x[1] - 0.5 : 0.0);
  };
  m.direction.jacobian = [](const Vec2& x) {
    Mat2 j = Mat2::Zero();
    if (x[1] > 0.5) j(1, 1) = 1.0;
    return j;
  };

  tc.diffusion = {[](const Vec2&) { return 1.0; },
                  [](const Vec2&) { return Vec2::Zero().eval(); }};
  tc.source = {[](const Vec2&) { return 0.0; },
               [](const Vec2&) { return Vec2::Zero().eval(); }};
  tc.dirichlet = [](const Vec2& x) {
    return x[1] >= 1.0 - 1e-12 ? bump(x[0]) : 0.0;
  };
  tc.qoi_weight = {
      [](const Vec2& x) { return bump(x[0]) * bump(2 * x[1]); },
      [](const Vec2& x) {
        return Vec2(bump_derivative(x[0]) * bump(2 * x[1]),
                    2 * bump(x[0]) * bump_derivative(2 * x[1]));
      }};
  tc.qoi_cutoff = 0.5;
  return tc;
}

ManufacturedCase build_manufactured_case() {
  ManufacturedCase mc;
  mc.identity.dim = 2;
  mc.identity.n_terms = 0;
  mc.identity.direction.value = [](const Vec2&) { return Vec2::Zero().eval(); };
  mc.identity.direction.jacobian = [](const Vec2&) { return Mat2::Zero().eval(); };
  mc.exact = {
      [](const Vec2& x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]); },
      [](const Vec2& x) {
        return Vec2(kPi * std::cos(kPi * x[0]) * std::sin(kPi * x[1]),
                    kPi * std::sin(kPi * x[0]) * std::cos(kPi * x[1]));
      }};
  mc.source = {[](const Vec2& x) {
                 return 2 * kPi * kPi * std::sin(kPi * x[0]) * std::sin(kPi * x[1]);
               },
               [](const Vec2&) { return Vec2::Zero().eval(); }};
  mc.dirichlet = [](const Vec2&) { return 0.0; };
  return mc;
}

}  // namespace dmuq
