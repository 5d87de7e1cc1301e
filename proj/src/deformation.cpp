#include "dmuq/deformation.hpp"

#include <cmath>
#include <stdexcept>

namespace dmuq {

namespace {

void check_term(const DeformationModel& m, int l) {
  if (l < 1 || l > m.n_terms)
    throw std::invalid_argument("term index out of range");
}

void check_param(const DeformationModel& m, std::span<const double> y) {
  if (static_cast<int>(y.size()) > m.n_terms)
    throw std::invalid_argument("parameter vector longer than the expansion");
}

}  // namespace

Mat2 perturbation_matrix(const DeformationModel& m, int l, const Vec2& x) {
  check_term(m, l);
  const ScalarField& b = m.basis[l - 1];
  const Vec2 v = m.direction.value(x);
  const Mat2 dv = m.direction.jacobian(x);
  return b.value(x) * dv + v * b.gradient(x).transpose();
}

Vec2 map_point(const DeformationModel& m, const Vec2& x, std::span<const double> y) {
  check_param(m, y);
  double e = 0;
  for (std::size_t l = 0; l < y.size(); ++l)
    e += m.sqrt_mu[l] * m.basis[l].value(x) * y[l];
  return x + e * m.direction.value(x);
}

Mat2 map_jacobian(const DeformationModel& m, const Vec2& x, std::span<const double> y) {
  check_param(m, y);
  Mat2 j = Mat2::Identity();
  for (std::size_t l = 0; l < y.size(); ++l)
    j += y[l] * m.sqrt_mu[l] * perturbation_matrix(m, static_cast<int>(l) + 1, x);
  return j;
}

PulledBackData pull_back(const DeformationModel& m, const ScalarField* a,
                         const Vec2& x, std::span<const double> y) {
  PulledBackData out;
  const Mat2 j = map_jacobian(m, x, y);
  out.det = j.determinant();
  if (out.det <= 0)
    throw std::runtime_error("deformation jacobian is not orientation preserving");
  out.fx = map_point(m, x, y);
  const double av = a ? a->value(out.fx) : 1.0;
  const Mat2 inv = j.inverse();
  out.g = av * out.det * inv * inv.transpose();
  return out;
}

double spectral_norm(const Mat2& a) {
  const double q = 0.5 * a.squaredNorm();
  const double det = a.determinant();
  const double disc = std::max(q * q - det * det, 0.0);
  return std::sqrt(q + std::sqrt(disc));
}

AssumptionReport verify_assumptions(const DeformationModel& m,
                                    std::span<const Vec2> probes) {
  if (probes.empty()) throw std::invalid_argument("no probe points given");
  AssumptionReport rep;
  rep.tail_gradient.assign(m.n_terms + 1, 0.0);
  rep.tail_sup.assign(m.n_terms + 1, 0.0);

  std::vector<double> basis_max(m.n_terms, 0.0);
  std::vector<double> norms(m.n_terms);
  double worst = -1;
  for (const Vec2& x : probes) {
    for (int l = 1; l <= m.n_terms; ++l) {
      norms[l - 1] = m.sqrt_mu[l - 1] * spectral_norm(perturbation_matrix(m, l, x));
      basis_max[l - 1] =
          std::max(basis_max[l - 1], std::abs(m.basis[l - 1].value(x)));
    }
    // tail sums, largest cutoff first so each probe costs one backward pass
    double acc = 0;
    for (int k = m.n_terms; k >= 0; --k) {
      if (k < m.n_terms) acc += norms[k];
      rep.tail_gradient[k] = std::max(rep.tail_gradient[k], acc);
    }
    if (acc > worst) {
      worst = acc;
      rep.worst_point = x;
    }
  }
  rep.delta_tilde = 1 - rep.tail_gradient[0];
  for (int k = m.n_terms - 1; k >= 0; --k) {
    rep.tail_sup[k] = rep.tail_sup[k + 1] + m.sqrt_mu[k] * basis_max[k];
    rep.basis_sup = std::max(rep.basis_sup, basis_max[k]);
  }
  return rep;
}

}  // namespace dmuq
