#pragma once
// Collocation driver: solves the PDE at every sparse-grid node, turns the
// samples into mean/variance estimates, and runs the convergence studies.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dmuq/experiment.hpp"
#include "dmuq/fem.hpp"
#include "dmuq/sparse_grid.hpp"

namespace dmuq {

// immutable per-mesh state shared by all node solves; the coefficient tables
// point into the testcase, so the context is pinned in place
struct PdeContext {
  PdeContext(const SquareTestcase& tc, int mesh_n, const SolveOptions& opt = {},
             bool check_assumptions = true);
  PdeContext(const PdeContext&) = delete;
  PdeContext& operator=(const PdeContext&) = delete;

  SquareTestcase testcase;
  Mesh mesh;
  Discretization disc;
  std::unique_ptr<TabulatedCoefficients> coeffs;
  Eigen::VectorXd lift;
  QoiVector qoi;
  Eigen::VectorXd qoi_interior;
  double qoi_boundary_term = 0;  // fixed lift contribution to the functional
  SolveOptions solve;
  AssumptionReport assumptions;
  double q_ref = 0;  // deterministic QoI at y = 0
};

// memoized node solves keyed by the full-dimension parameter vector
class NodeCache {
 public:
  explicit NodeCache(int dim) : dim_(dim) {}
  const double* find(std::span<const double> y) const;
  void insert(std::span<const double> y, double q);
  std::size_t size() const { return map_.size(); }

 private:
  std::vector<std::int64_t> key(std::span<const double> y) const;
  int dim_;
  std::map<std::vector<std::int64_t>, double> map_;
};

struct EstimateResult {
  double mean = 0;      // raw moments of Q
  double variance = 0;
  bool variance_clamped = false;
  int eta = 0;
  int fresh_solves = 0;
  double seconds = 0;
  std::vector<double> samples;  // per node, grid order
};

EstimateResult estimate(const PdeContext& ctx, const SparseGrid& grid,
                        int jobs = 1, NodeCache* cache = nullptr);

// synthetic sample function in place of the PDE
EstimateResult estimate(const std::function<double(std::span<const double>)>& q,
                        const SparseGrid& grid);

// duality form of the functional, cross-check for the primal value
double qoi_via_adjoint(const PdeContext& ctx, std::span<const double> y);

struct Normalized {
  double mean = 0;
  double variance = 0;
};
Normalized normalized(const EstimateResult& est, double q_ref);

double fit_log_slope(std::span<const double> x, std::span<const double> y);

struct SgStudy {
  struct Row {
    int n_s = 0;
    int w = 0;
    int eta = 0;
    double mean_error = 0;  // normalized by q_ref
    double var_error = 0;   // normalized by q_ref^2
  };
  std::vector<Row> rows;  // grouped by n_s, ascending w
  double ref_mean = 0, ref_var = 0;  // normalized reference statistics
  double q_ref = 0;
  int ref_eta = 0;
  int total_solves = 0;
};
SgStudy sparse_grid_study(PdeContext& ctx, GridRule rule,
                          std::span<const int> n_s_list, int w_max, int ref_n_s,
                          int ref_w, int jobs, NodeCache* cache = nullptr);

struct TruncationStudy {
  struct Row {
    int n_s = 0;
    int eta = 0;
    double mean_error = 0;
    double var_error = 0;
  };
  std::vector<Row> rows;
  double slope_mean = 0, slope_var = 0;  // log error vs log n_s fits
  double q_ref = 0;
  int ref_eta = 0;
  int total_solves = 0;
};
TruncationStudy truncation_study(PdeContext& ctx, GridRule rule,
                                 std::span<const int> n_s_list, int w,
                                 int ref_n_s, int ref_w, int jobs,
                                 NodeCache* cache = nullptr);

struct FemStudy {
  struct Row {
    int mesh_n = 0;
    double h = 0;
    double qoi_error = 0;  // raw units of Q
  };
  std::vector<Row> rows;
  double slope = 0;
  bool slope_in_window = false;  // [1.7, 2.3] expected for P1 duality
  double q_ref = 0;  // on the reference mesh
};
FemStudy fem_study(const SquareTestcase& tc, std::span<const int> mesh_list,
                   int ref_mesh_n, GridRule rule, int n_s, int w,
                   const SolveOptions& opt, int jobs,
                   bool check_assumptions = true);

}  // namespace dmuq
