#include "dmuq/analyticity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dmuq {

namespace {

void check_margin(double delta_tilde, int d) {
  if (!(delta_tilde > 0 && delta_tilde < 1))
    throw std::invalid_argument("delta_tilde must lie in (0,1)");
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
}

double ipow(double b, int e) {
  double r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

double BetaBound::value() const {
  return std::min({beta_lemma, beta_thm, geometric_cap});
}

BetaBound beta_bound(double delta_tilde, int d) {
  check_margin(delta_tilde, d);
  const double lo = ipow(delta_tilde, d);
  const double hi = ipow(2 - delta_tilde, d);
  const double g = (2 * lo + hi) / (lo + hi);
  const double gc = hi / (lo + hi);  // complement fraction, 2 - gc = g
  BetaBound b;
  b.beta_lemma = delta_tilde * std::log(g) / (d + std::log(g));
  b.beta_thm = delta_tilde * std::log(2 - gc) / (d + std::log(2 - gc));
  b.geometric_cap = std::sqrt(1 + delta_tilde * delta_tilde / 2) - 1;
  return b;
}

double alpha_factor(double beta, double delta_tilde, int d) {
  check_margin(delta_tilde, d);
  if (!(beta >= 0 && beta < delta_tilde))
    throw std::invalid_argument("beta must lie in [0, delta_tilde)");
  return 2 - std::exp(d * beta / (delta_tilde - beta));
}

EllipticityBox ellipticity_box(double delta_tilde, int d, double a_min) {
  check_margin(delta_tilde, d);
  EllipticityBox box;
  box.sigma_min = delta_tilde;
  box.sigma_max = 2 - delta_tilde;
  box.det_min = ipow(delta_tilde, d);
  box.det_max = ipow(2 - delta_tilde, d);
  box.lambda_min = a_min * ipow(delta_tilde, d) / ((2 - delta_tilde) * (2 - delta_tilde));
  return box;
}

RegionConstants region_constants(double beta, double delta_tilde, int d,
                                 double a_min, double a_max) {
  check_margin(delta_tilde, d);
  if (!(a_min > 0 && a_max >= a_min))
    throw std::invalid_argument("need 0 < a_min <= a_max");
  const double dt = delta_tilde;
  const double lo = ipow(dt, d);
  const double hi = ipow(2 - dt, d);
  RegionConstants rc;
  rc.alpha = alpha_factor(beta, dt, d);
  const double a = rc.alpha;
  const double bump = beta * (2 + (beta - dt));  // recurring |xi_I| envelope

  rc.B = (lo * dt * a * (dt - 2 * beta) - 2 * bump * (1 - a) * hi) /
         (a_max * hi * hi * (2 - a) * (2 - a));
  rc.C = (hi * (2 - a) * 2 * bump + hi * (1 - a) * (((2 - dt) + beta) * ((2 - dt) + beta) + beta * beta)) /
         (a_min * lo * lo * a * a);
  rc.D = (hi * (2 - a) * (2 - dt + beta) * (2 - dt + beta) + 2 * hi * (1 - a) * bump) /
         (a_min * lo * lo * a * a);
  if (rc.B > 0) {
    const double ratio = rc.C / rc.B;
    rc.epsilon = 1.0 / ((1 + ratio * ratio) * rc.D);
  } else {
    rc.epsilon = 0;
  }
  return rc;
}

double RateParams::mu3(double delta_star, double c2_tilde) const {
  return sigma * delta_star * c2_tilde / (1 + std::log(2.0 * n_s));
}

RateParams rate_params(double beta, double delta_tilde, int n_s) {
  check_margin(delta_tilde, 1);
  if (n_s < 1) throw std::invalid_argument("n_s must be >= 1");
  RateParams rp;
  rp.n_s = n_s;
  rp.tau = beta / (1 - delta_tilde);
  rp.sigma_hat = std::log(std::sqrt(rp.tau * rp.tau + 1) + rp.tau);
  rp.sigma = rp.sigma_hat / 2;
  rp.mu2 = std::log(2.0) / (n_s * (1 + std::log(2.0 * n_s)));
  return rp;
}

double default_delta_star(double c2_tilde) {
  if (!(c2_tilde > 0)) throw std::invalid_argument("c2_tilde must be positive");
  return (std::exp(1.0) * std::log(2.0) - 1) / c2_tilde;
}

double predicted_error(double eta, const RateParams& rp, double delta_star,
                       double c1, double c2_tilde, double scale) {
  const double q = c1 / std::exp(rp.sigma * delta_star * c2_tilde) *
                   std::pow(std::max(1.0, c1), rp.n_s) / std::abs(1 - c1);
  const double mu3 = rp.mu3(delta_star, c2_tilde);
  return scale * q * std::pow(eta, mu3) *
         std::exp(-rp.n_s * rp.sigma * std::pow(eta, rp.mu2) /
                  std::pow(2.0, 1.0 / rp.n_s));
}

WorkEstimate work_model(const WorkInputs& in, double beta, double delta_tilde) {
  if (!(in.tol > 0)) throw std::invalid_argument("tolerance must be positive");
  check_margin(delta_tilde, in.d);
  WorkEstimate out;
  out.n_s = static_cast<int>(
      std::ceil(std::pow(in.d2 * in.tol / in.c_d, -1.0 / in.decay_l)));
  out.n_s = std::max(out.n_s, 1);

  const double f_min = delta_tilde, f_max = 2 - delta_tilde;
  const double fe_denom = 3 * in.c_fe * in.a_min * ipow(f_min, in.d) *
                          in.c_gamma / (f_max * f_max);
  out.h = std::pow(in.tol / fe_denom, 1.0 / (2 * in.fe_r));
  out.n_h = std::ceil(in.d3 * std::pow(in.tol / fe_denom, -in.d / (2 * in.fe_r)));

  const RateParams rp = rate_params(beta, delta_tilde, out.n_s);
  const double c_f = in.c1 / std::abs(1 - in.c1);
  const double f_pow = std::pow(std::max(1.0, in.c1), out.n_s);
  const double base = 3 * in.rho_ratio * in.c_sg * in.c_t * c_f * f_pow *
                      std::exp(rp.sigma) / in.tol;
  out.eta = std::ceil(std::pow(base, (1 + std::log(2.0 * out.n_s)) / rp.sigma));
  out.w_total = in.d1 * std::pow(out.n_h, in.solve_q) * out.eta;
  return out;
}

RegionReport analyze_region(double delta_tilde, int d, double a_min, double a_max,
                            int n_s, double beta_fraction) {
  if (!(beta_fraction > 0 && beta_fraction <= 1))
    throw std::invalid_argument("beta_fraction must lie in (0,1]");
  RegionReport rep;
  rep.delta_tilde = delta_tilde;
  rep.d = d;
  rep.a_min = a_min;
  rep.a_max = a_max;
  rep.bound = beta_bound(delta_tilde, d);
  rep.beta = beta_fraction * rep.bound.value();
  rep.box = ellipticity_box(delta_tilde, d, a_min);
  rep.constants = region_constants(rep.beta, delta_tilde, d, a_min, a_max);
  rep.rate = rate_params(rep.beta, delta_tilde, n_s);
  return rep;
}

}  // namespace dmuq
