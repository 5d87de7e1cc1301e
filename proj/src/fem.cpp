#include "dmuq/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dmuq {

namespace {

constexpr double kCentroidPull = 1e-12;

// nnz position of (row, col) in a compressed column-major matrix
std::int32_t find_slot(const Eigen::SparseMatrix<double>& m, int row, int col) {
  const auto* outer = m.outerIndexPtr();
  const auto* inner = m.innerIndexPtr();
  for (auto k = outer[col]; k < outer[col + 1]; ++k)
    if (inner[k] == row) return static_cast<std::int32_t>(k);
  throw std::logic_error("missing sparsity slot");
}

// vertices touching quadrature midpoint k carry basis value 1/2
inline bool touches(int i, int k) { return i == k || i == (k + 1) % 3; }

Eigen::VectorXd boundary_part(const Mesh& mesh, const Eigen::VectorXd& full) {
  Eigen::VectorXd out(mesh.n_boundary);
  for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
    if (mesh.on_boundary[v]) out[mesh.boundary_index[v]] = full[v];
  return out;
}

}  // namespace

void DirectCoefficients::eval(int, int, const Vec2& x, std::span<const double> y,
                              CoefficientSample& out) const {
  const PulledBackData d = pull_back(*model_, a_, x, y);
  out.g = d.g;
  out.det = d.det;
  out.fx = d.fx;
}

Discretization build_discretization(const Mesh& mesh) {
  Discretization disc;
  const int nt = static_cast<int>(mesh.triangles.size());
  disc.slot_ii.assign(9 * nt, -1);
  disc.slot_ib.assign(9 * nt, -1);
  disc.area.resize(nt);
  disc.grad.resize(nt);
  disc.qpoint.resize(nt);

  std::vector<Eigen::Triplet<double>> trip_ii, trip_ib;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2 p[3] = {mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                       mesh.vertices[tri[2]]};
    const double area = triangle_area(p[0], p[1], p[2]);
    disc.area[t] = area;
    const double s = 1.0 / (2.0 * area);
    for (int i = 0; i < 3; ++i) {
      const Vec2& b = p[(i + 1) % 3];
      const Vec2& c = p[(i + 2) % 3];
      disc.grad[t][i] = s * Vec2(b.y() - c.y(), c.x() - b.x());
    }
    const Vec2 centroid = triangle_centroid(p[0], p[1], p[2]);
    for (int k = 0; k < 3; ++k) {
      const Vec2 mid = 0.5 * (p[k] + p[(k + 1) % 3]);
      disc.qpoint[t][k] = mid + kCentroidPull * (centroid - mid);
    }
    for (int i = 0; i < 3; ++i) {
      if (mesh.on_boundary[tri[i]]) continue;
      const int row = mesh.interior_index[tri[i]];
      for (int j = 0; j < 3; ++j) {
        if (mesh.on_boundary[tri[j]])
          trip_ib.emplace_back(row, mesh.boundary_index[tri[j]], 0.0);
        else
          trip_ii.emplace_back(row, mesh.interior_index[tri[j]], 0.0);
      }
    }
  }

  disc.k_ii.resize(mesh.n_interior, mesh.n_interior);
  disc.k_ii.setFromTriplets(trip_ii.begin(), trip_ii.end());
  disc.k_ii.makeCompressed();
  disc.k_ib.resize(mesh.n_interior, mesh.n_boundary);
  disc.k_ib.setFromTriplets(trip_ib.begin(), trip_ib.end());
  disc.k_ib.makeCompressed();

  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      if (mesh.on_boundary[tri[i]]) continue;
      const int row = mesh.interior_index[tri[i]];
      for (int j = 0; j < 3; ++j) {
        if (mesh.on_boundary[tri[j]])
          disc.slot_ib[9 * t + 3 * i + j] =
              find_slot(disc.k_ib, row, mesh.boundary_index[tri[j]]);
        else
          disc.slot_ii[9 * t + 3 * i + j] =
              find_slot(disc.k_ii, row, mesh.interior_index[tri[j]]);
      }
    }
  }
  return disc;
}

TabulatedCoefficients::TabulatedCoefficients(const Discretization& disc,
                                             const DeformationModel& model,
                                             const ScalarField* a)
    : n_terms_(model.n_terms), a_(a) {
  const int nt = static_cast<int>(disc.qpoint.size());
  b_scaled_.resize(static_cast<std::size_t>(nt) * 3 * n_terms_ * 4);
  e_scaled_.resize(static_cast<std::size_t>(nt) * 3 * n_terms_);
  vhat_.resize(static_cast<std::size_t>(nt) * 3);
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const Vec2& x = disc.qpoint[t][k];
      const std::size_t q = static_cast<std::size_t>(3 * t + k);
      vhat_[q] = model.direction.value(x);
      for (int l = 0; l < n_terms_; ++l) {
        const Mat2 b = model.sqrt_mu[l] * perturbation_matrix(model, l + 1, x);
        double* dst = &b_scaled_[(q * n_terms_ + l) * 4];
        dst[0] = b(0, 0);
        dst[1] = b(0, 1);
        dst[2] = b(1, 0);
        dst[3] = b(1, 1);
        e_scaled_[q * n_terms_ + l] = model.sqrt_mu[l] * model.basis[l].value(x);
      }
    }
  }
}

void TabulatedCoefficients::eval(int tri, int qp, const Vec2& x,
                                 std::span<const double> y,
                                 CoefficientSample& out) const {
  if (static_cast<int>(y.size()) > n_terms_)
    throw std::invalid_argument("parameter vector longer than the expansion");
  const std::size_t q = static_cast<std::size_t>(3 * tri + qp);
  double j00 = 1, j01 = 0, j10 = 0, j11 = 1, e = 0;
  const double* b = &b_scaled_[q * n_terms_ * 4];
  const double* es = &e_scaled_[q * n_terms_];
  for (std::size_t l = 0; l < y.size(); ++l) {
    j00 += y[l] * b[4 * l];
    j01 += y[l] * b[4 * l + 1];
    j10 += y[l] * b[4 * l + 2];
    j11 += y[l] * b[4 * l + 3];
    e += y[l] * es[l];
  }
  out.det = j00 * j11 - j01 * j10;
  if (out.det <= 0)
    throw std::runtime_error("deformation jacobian is not orientation preserving");
  out.fx = x + e * vhat_[q];
  const double av = a_ ? a_->value(out.fx) : 1.0;
  // a * det * inv(J) * inv(J)^T written out for the 2x2 case
  const double s = av / out.det;
  out.g(0, 0) = s * (j01 * j01 + j11 * j11);
  out.g(0, 1) = -s * (j00 * j01 + j10 * j11);
  out.g(1, 0) = out.g(0, 1);
  out.g(1, 1) = s * (j00 * j00 + j10 * j10);
}

Eigen::VectorXd make_lift(const Mesh& mesh,
                          const std::function<double(const Vec2&)>& dirichlet) {
  Eigen::VectorXd lift = Eigen::VectorXd::Zero(mesh.vertices.size());
  for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
    if (mesh.on_boundary[v]) lift[v] = dirichlet(mesh.vertices[v]);
  return lift;
}

AssemblyWorkspace::AssemblyWorkspace(const Discretization& disc)
    : k_ii(disc.k_ii), k_ib(disc.k_ib) {
  load.setZero(disc.k_ii.rows());
  u_int.setZero(disc.k_ii.rows());
}

void assemble(const Mesh& mesh, const Discretization& disc,
              const CoefficientProvider& coeffs, std::span<const double> y,
              const ScalarField* source, const Eigen::VectorXd& lift,
              AssemblyWorkspace& ws) {
  std::fill_n(ws.k_ii.valuePtr(), ws.k_ii.nonZeros(), 0.0);
  std::fill_n(ws.k_ib.valuePtr(), ws.k_ib.nonZeros(), 0.0);
  ws.load.setZero();

  CoefficientSample sample;
  const int nt = static_cast<int>(mesh.triangles.size());
  for (int t = 0; t < nt; ++t) {
    const double wq = disc.area[t] / 3.0;
    Mat2 gsum = Mat2::Zero();
    double fq[3] = {0, 0, 0};
    for (int k = 0; k < 3; ++k) {
      coeffs.eval(t, k, disc.qpoint[t][k], y, sample);
      gsum += sample.g;
      if (source) fq[k] = source->value(sample.fx) * sample.det;
    }
    gsum *= wq;

    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      if (mesh.on_boundary[tri[i]]) continue;
      const Vec2 gi = gsum * disc.grad[t][i];
      for (int j = 0; j < 3; ++j) {
        const double kij = gi.dot(disc.grad[t][j]);
        if (const auto s = disc.slot_ii[9 * t + 3 * i + j]; s >= 0)
          ws.k_ii.valuePtr()[s] += kij;
        else
          ws.k_ib.valuePtr()[disc.slot_ib[9 * t + 3 * i + j]] += kij;
      }
      if (source) {
        const int row = mesh.interior_index[tri[i]];
        for (int k = 0; k < 3; ++k)
          if (touches(i, k)) ws.load[row] += wq * 0.5 * fq[k];
      }
    }
  }

  const Eigen::VectorXd wb = boundary_part(mesh, lift);
  ws.load -= ws.k_ib * wb;
}

SolveResult solve_interior(AssemblyWorkspace& ws, const SolveOptions& opt) {
  SolveResult res;
  if (opt.method == SolveOptions::Method::ldlt) {
    if (!ws.analyzed) {
      ws.ldlt.analyzePattern(ws.k_ii);
      ws.analyzed = true;
    }
    ws.ldlt.factorize(ws.k_ii);
    if (ws.ldlt.info() != Eigen::Success)
      throw std::runtime_error("stiffness factorization failed");
    ws.u_int = ws.ldlt.solve(ws.load);
    const double scale = std::max(1.0, ws.load.norm());
    res.residual = (ws.k_ii * ws.u_int - ws.load).norm() / scale;
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper>
        cg;
    cg.setTolerance(opt.tol);
    cg.setMaxIterations(opt.max_iter);
    cg.compute(ws.k_ii);
    ws.u_int = cg.solve(ws.load);
    if (cg.info() != Eigen::Success)
      throw std::runtime_error("conjugate gradient did not converge");
    res.iterations = static_cast<int>(cg.iterations());
    res.residual = cg.error();
  }
  return res;
}

Eigen::VectorXd expand_solution(const Mesh& mesh, const Eigen::VectorXd& lift,
                                const Eigen::VectorXd& interior) {
  Eigen::VectorXd full = lift;
  for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
    if (!mesh.on_boundary[v]) full[v] = interior[mesh.interior_index[v]];
  return full;
}

QoiVector make_qoi_vector(const Mesh& mesh, const ScalarField& weight,
                          double cutoff) {
  // midpoint rule on a 4^2 uniform refinement of each triangle; the weight
  // field varies too fast for the plain element-level rule at coarse h
  constexpr int kSplit = 4;
  constexpr double kStep = 1.0 / kSplit;
  QoiVector q;
  q.full.setZero(mesh.vertices.size());
  for (const auto& tri : mesh.triangles) {
    const Vec2 p[3] = {mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                       mesh.vertices[tri[2]]};
    if (p[0].y() >= cutoff && p[1].y() >= cutoff && p[2].y() >= cutoff) continue;
    const double wq = triangle_area(p[0], p[1], p[2]) / (kSplit * kSplit * 3.0);
    const auto child = [&](double u0, double v0, double u1, double v1,
                           double u2, double v2) {
      const double mu[3] = {(u0 + u1) / 2, (u1 + u2) / 2, (u2 + u0) / 2};
      const double mv[3] = {(v0 + v1) / 2, (v1 + v2) / 2, (v2 + v0) / 2};
      for (int k = 0; k < 3; ++k) {
        const Vec2 x = p[0] + mu[k] * (p[1] - p[0]) + mv[k] * (p[2] - p[0]);
        const double qk = wq * weight.value(x);
        q.full[tri[0]] += qk * (1 - mu[k] - mv[k]);
        q.full[tri[1]] += qk * mu[k];
        q.full[tri[2]] += qk * mv[k];
      }
    };
    for (int i = 0; i < kSplit; ++i)
      for (int j = 0; j < kSplit - i; ++j) {
        const double u = i * kStep, v = j * kStep;
        child(u, v, u + kStep, v, u, v + kStep);
        if (i + j < kSplit - 1)
          child(u + kStep, v, u + kStep, v + kStep, u, v + kStep);
      }
  }
  return q;
}

double evaluate_qoi(const QoiVector& q, const Eigen::VectorXd& u_full) {
  return q.full.dot(u_full);
}

Eigen::VectorXd interior_part(const Mesh& mesh, const Eigen::VectorXd& full) {
  Eigen::VectorXd out(mesh.n_interior);
  for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
    if (!mesh.on_boundary[v]) out[mesh.interior_index[v]] = full[v];
  return out;
}

ErrorNorms solution_error(const Mesh& mesh, const Eigen::VectorXd& u_full,
                          const ScalarField& exact) {
  double l2 = 0, h1 = 0;
  for (const auto& tri : mesh.triangles) {
    const Vec2 p[3] = {mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                       mesh.vertices[tri[2]]};
    const double area = triangle_area(p[0], p[1], p[2]);
    const double s = 1.0 / (2.0 * area);
    Vec2 grad_h = Vec2::Zero();
    for (int i = 0; i < 3; ++i) {
      const Vec2& b = p[(i + 1) % 3];
      const Vec2& c = p[(i + 2) % 3];
      grad_h += u_full[tri[i]] * s * Vec2(b.y() - c.y(), c.x() - b.x());
    }
    const double wq = area / 3.0;
    for (int k = 0; k < 3; ++k) {
      const Vec2 mid = 0.5 * (p[k] + p[(k + 1) % 3]);
      const double uh = 0.5 * (u_full[tri[k]] + u_full[tri[(k + 1) % 3]]);
      l2 += wq * std::pow(uh - exact.value(mid), 2);
      h1 += wq * (grad_h - exact.gradient(mid)).squaredNorm();
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

std::vector<Vec2> probe_points(const Mesh& mesh, const Discretization& disc) {
  std::vector<Vec2> pts = mesh.vertices;
  pts.reserve(pts.size() + 3 * disc.qpoint.size());
  for (const auto& q : disc.qpoint) pts.insert(pts.end(), q.begin(), q.end());
  return pts;
}

FemSolution solve_single(const Mesh& mesh, const CoefficientProvider& coeffs,
                         std::span<const double> y, const ScalarField* source,
                         const std::function<double(const Vec2&)>& dirichlet,
                         const SolveOptions& opt) {
  const Discretization disc = build_discretization(mesh);
  const Eigen::VectorXd lift = make_lift(mesh, dirichlet);
  AssemblyWorkspace ws(disc);
  assemble(mesh, disc, coeffs, y, source, lift, ws);
  FemSolution sol;
  sol.stats = solve_interior(ws, opt);
  sol.full = expand_solution(mesh, lift, ws.u_int);
  return sol;
}

}  // namespace dmuq
