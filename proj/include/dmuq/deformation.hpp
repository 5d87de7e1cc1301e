#pragma once
// Random domain deformation F(x, y) = x + e(x, y) vhat(x) on the unit square
// and the pulled-back diffusion data it induces on the reference domain.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace dmuq {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct ScalarField {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
};

struct VectorField {
  std::function<Vec2(const Vec2&)> value;
  std::function<Mat2(const Vec2&)> jacobian;
};

// e(x, y) = sum_l sqrt_mu[l] basis[l](x) y_l with |y_l| <= 1; the amplitude
// vector carries every scale factor of the expansion
struct DeformationModel {
  int dim = 2;
  int n_terms = 0;
  std::vector<double> sqrt_mu;
  std::vector<ScalarField> basis;
  VectorField direction;
};

// B_l = b_l dvhat + vhat (grad b_l)^T, so dF = I + sum_l y_l sqrt_mu[l] B_l
Mat2 perturbation_matrix(const DeformationModel& m, int l, const Vec2& x);

// y may be shorter than n_terms; missing coordinates are treated as zero
Vec2 map_point(const DeformationModel& m, const Vec2& x, std::span<const double> y);
Mat2 map_jacobian(const DeformationModel& m, const Vec2& x, std::span<const double> y);

struct PulledBackData {
  Mat2 g = Mat2::Identity();  // det(dF) dF^{-1} a(F x) dF^{-T}
  double det = 1;
  Vec2 fx = Vec2::Zero();
};
// a == nullptr means unit diffusion
PulledBackData pull_back(const DeformationModel& m, const ScalarField* a,
                         const Vec2& x, std::span<const double> y);

double spectral_norm(const Mat2& a);

// margin delta_tilde = 1 - sup_x sum_l sqrt_mu[l] |B_l(x)|_2 over the probe
// set, plus the tail sums entering the truncation bound
struct AssumptionReport {
  double delta_tilde = 0;
  Vec2 worst_point = Vec2::Zero();
  double basis_sup = 0;
  std::vector<double> tail_gradient;  // [k] = sup_x sum_{l > k} sqrt_mu |B_l|_2
  std::vector<double> tail_sup;       // [k] = sum_{l > k} sqrt_mu sup_x |b_l|
};
AssumptionReport verify_assumptions(const DeformationModel& m,
                                    std::span<const Vec2> probes);

}  // namespace dmuq
