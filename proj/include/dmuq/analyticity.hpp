#pragma once
// Closed-form constants describing the region of parametric analyticity for
// the remapped diffusion problem, with the convergence-rate parameters and
// the work model built on top of them.

namespace dmuq {

// admissible width of the complex level-set extension, two published routes
// plus the geometric cap; the usable bound is the minimum of the three
struct BetaBound {
  double beta_lemma = 0;    // delta log(g) / (d + log(g)), direct fraction g
  double beta_thm = 0;      // delta log(2-g') / (d + log(2-g')), complement g'
  double geometric_cap = 0; // sqrt(1 + delta^2/2) - 1
  double value() const;
};
BetaBound beta_bound(double delta_tilde, int d);

// alpha = 2 - exp(d beta / (delta - beta)), in (0,1) for admissible beta
double alpha_factor(double beta, double delta_tilde, int d);

// real-parameter bounds induced by the margin delta_tilde
struct EllipticityBox {
  double sigma_min = 0, sigma_max = 0;
  double det_min = 0, det_max = 0;
  double lambda_min = 0;
};
EllipticityBox ellipticity_box(double delta_tilde, int d, double a_min);

// uniform ellipticity and continuity constants on the complex extension;
// epsilon is reported as 0 when B <= 0 marks the region as empty
struct RegionConstants {
  double alpha = 0, B = 0, C = 0, D = 0, epsilon = 0;
};
RegionConstants region_constants(double beta, double delta_tilde, int d,
                                 double a_min, double a_max);

struct RateParams {
  double tau = 0;        // beta / (1 - delta_tilde)
  double sigma_hat = 0;  // log(sqrt(tau^2 + 1) + tau)
  double sigma = 0;      // sigma_hat / 2
  double mu2 = 0;        // log 2 / (n_s (1 + log(2 n_s)))
  int n_s = 0;
  double mu3(double delta_star, double c2_tilde) const;
};
RateParams rate_params(double beta, double delta_tilde, int n_s);

// delta* solving e log2 = 1 + delta* c2_tilde
double default_delta_star(double c2_tilde);

// algebraic-times-subexponential error profile in the knot count eta
double predicted_error(double eta, const RateParams& rp, double delta_star,
                       double c1, double c2_tilde, double scale = 1.0);

struct WorkInputs {
  double tol = 1e-3;
  int d = 2;
  double decay_l = 1;   // truncation decay exponent
  double fe_r = 1;      // FE order, QoI error is O(h^{2r})
  double solve_q = 1;   // linear-solve work exponent in N_h
  double a_min = 1;
  double c_d = 1, d1 = 1, d2 = 1, d3 = 1;
  double c_fe = 1, c_gamma = 1, c_sg = 1, c_t = 1;
  double rho_ratio = 1;
  double c1 = 0.5, c2_tilde = 1;
};
struct WorkEstimate {
  int n_s = 0;
  double h = 0, n_h = 0, eta = 0, w_total = 0;
};
WorkEstimate work_model(const WorkInputs& in, double beta, double delta_tilde);

struct RegionReport {
  double delta_tilde = 0, a_min = 1, a_max = 1;
  int d = 2;
  BetaBound bound;
  double beta = 0;
  EllipticityBox box;
  RegionConstants constants;
  RateParams rate;
};
// beta_fraction in (0,1] picks beta = beta_fraction * bound.value()
RegionReport analyze_region(double delta_tilde, int d, double a_min, double a_max,
                            int n_s, double beta_fraction);

}  // namespace dmuq
