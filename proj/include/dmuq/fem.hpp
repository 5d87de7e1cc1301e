#pragma once
// P1 finite elements on the structured triangulation: midpoint-rule assembly
// of the pulled-back form, Dirichlet lift elimination, direct and iterative
// interior solves, QoI functionals and error norms.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cstdint>
#include <memory>
#include <span>

#include "dmuq/deformation.hpp"
#include "dmuq/mesh.hpp"

namespace dmuq {

// what the assembler needs at one quadrature point
struct CoefficientSample {
  Mat2 g = Mat2::Identity();
  double det = 1;
  Vec2 fx = Vec2::Zero();
};

class CoefficientProvider {
 public:
  virtual ~CoefficientProvider() = default;
  virtual void eval(int tri, int qp, const Vec2& x, std::span<const double> y,
                    CoefficientSample& out) const = 0;
};

// evaluates the deformation model on the fly
class DirectCoefficients final : public CoefficientProvider {
 public:
  DirectCoefficients(const DeformationModel& model, const ScalarField* a)
      : model_(&model), a_(a) {}
  void eval(int tri, int qp, const Vec2& x, std::span<const double> y,
            CoefficientSample& out) const override;

 private:
  const DeformationModel* model_;
  const ScalarField* a_;
};

// fixed sparsity, slot maps and element geometry shared by all solves
struct Discretization {
  Eigen::SparseMatrix<double> k_ii;  // interior x interior skeleton
  Eigen::SparseMatrix<double> k_ib;  // interior x boundary skeleton
  std::vector<std::int32_t> slot_ii, slot_ib;  // 9 per triangle, -1 unused
  std::vector<double> area;
  std::vector<std::array<Vec2, 3>> grad;
  std::vector<std::array<Vec2, 3>> qpoint;  // midpoints pulled to the centroid
};
Discretization build_discretization(const Mesh& mesh);

// per-element tables of the scaled perturbation data at every qpoint
class TabulatedCoefficients final : public CoefficientProvider {
 public:
  TabulatedCoefficients(const Discretization& disc, const DeformationModel& model,
                        const ScalarField* a);
  void eval(int tri, int qp, const Vec2& x, std::span<const double> y,
            CoefficientSample& out) const override;

 private:
  int n_terms_ = 0;
  const ScalarField* a_ = nullptr;
  std::vector<double> b_scaled_;   // 4 per term per qpoint
  std::vector<double> e_scaled_;   // 1 per term per qpoint
  std::vector<Vec2> vhat_;
};

// vertex values of the lifted boundary data, zero at interior vertices
Eigen::VectorXd make_lift(const Mesh& mesh,
                          const std::function<double(const Vec2&)>& dirichlet);

struct SolveOptions {
  enum class Method { ldlt, cg };
  Method method = Method::ldlt;
  double tol = 1e-12;
  int max_iter = 20000;
};
struct SolveResult {
  int iterations = 0;
  double residual = 0;
};

// mutable per-worker state: matrix values, vectors, factorization
struct AssemblyWorkspace {
  explicit AssemblyWorkspace(const Discretization& disc);
  Eigen::SparseMatrix<double> k_ii, k_ib;
  Eigen::VectorXd load;  // interior load with the lift folded in
  Eigen::VectorXd u_int;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;
};

// fills workspace values for parameter y; lift is a full nodal vector
void assemble(const Mesh& mesh, const Discretization& disc,
              const CoefficientProvider& coeffs, std::span<const double> y,
              const ScalarField* source, const Eigen::VectorXd& lift,
              AssemblyWorkspace& ws);

SolveResult solve_interior(AssemblyWorkspace& ws, const SolveOptions& opt);

// scatter interior solution and lift into one nodal vector
Eigen::VectorXd expand_solution(const Mesh& mesh, const Eigen::VectorXd& lift,
                                const Eigen::VectorXd& interior);

struct QoiVector {
  Eigen::VectorXd full;  // nodal weights of the linear functional
};
QoiVector make_qoi_vector(const Mesh& mesh, const ScalarField& weight,
                          double cutoff);
double evaluate_qoi(const QoiVector& q, const Eigen::VectorXd& u_full);
Eigen::VectorXd interior_part(const Mesh& mesh, const Eigen::VectorXd& full);

struct ErrorNorms {
  double l2 = 0;
  double h1 = 0;  // seminorm
};
ErrorNorms solution_error(const Mesh& mesh, const Eigen::VectorXd& u_full,
                          const ScalarField& exact);

// mesh vertices plus all assembly quadrature points
std::vector<Vec2> probe_points(const Mesh& mesh, const Discretization& disc);

// one-shot convenience wrapper
struct FemSolution {
  Eigen::VectorXd full;
  SolveResult stats;
};
FemSolution solve_single(const Mesh& mesh, const CoefficientProvider& coeffs,
                         std::span<const double> y, const ScalarField* source,
                         const std::function<double(const Vec2&)>& dirichlet,
                         const SolveOptions& opt);

}  // namespace dmuq
