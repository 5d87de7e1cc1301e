#pragma once
// Built-in test problems: the half-square shear under a truncated expansion
// with smooth bump data, and a manufactured Poisson solution for mesh studies.

#include "dmuq/deformation.hpp"

namespace dmuq {

// C^inf bump supported on (0,1): exp(-1 / (1 - 4 (t - 1/2)^2))
double bump(double t);
double bump_derivative(double t);

struct SquareTestcase {
  DeformationModel model;
  ScalarField diffusion;                         // a = 1
  ScalarField source;                            // f = 0
  std::function<double(const Vec2&)> dirichlet;  // bump on the top edge
  ScalarField qoi_weight;                        // bump(x1) bump(2 x2)
  double qoi_cutoff = 0.5;                       // weight vanishes above this
};

// amplitudes sqrt_mu fold in the scale c and the sqrt(3) rescale that maps
// uniform(-sqrt(3), sqrt(3)) coordinates onto [-1,1]
SquareTestcase build_square_testcase(double c, double corr_len, double period,
                                     int n_terms);

struct ManufacturedCase {
  DeformationModel identity;                     // zero terms
  ScalarField exact;                             // sin(pi x1) sin(pi x2)
  ScalarField source;                            // 2 pi^2 sin(pi x1) sin(pi x2)
  std::function<double(const Vec2&)> dirichlet;  // zero
};
ManufacturedCase build_manufactured_case();

}  // namespace dmuq
