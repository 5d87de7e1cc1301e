#include "dmuq/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#ifdef DMUQ_HAVE_OPENMP
#include <omp.h>
#endif

namespace dmuq {

namespace {

constexpr double kKeyQuantum = 1e13;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string describe_node(int index, std::span<const double> y) {
  std::ostringstream os;
  os << "node " << index << " at y = (";
  for (std::size_t l = 0; l < y.size(); ++l)
    os << (l ? ", " : "") << y[l];
  os << ")";
  return os.str();
}

double solve_node(const PdeContext& ctx, std::span<const double> y,
                  AssemblyWorkspace& ws) {
  assemble(ctx.mesh, ctx.disc, *ctx.coeffs, y, &ctx.testcase.source, ctx.lift, ws);
  solve_interior(ws, ctx.solve);
  return ctx.qoi_boundary_term + ctx.qoi_interior.dot(ws.u_int);
}

void clamp_variance(EstimateResult& est) {
  const double scale = std::max(1.0, est.mean * est.mean);
  if (est.variance < 0 && est.variance > -1e-9 * scale) {
    est.variance = 0;
    est.variance_clamped = true;
  }
}

}  // namespace

PdeContext::PdeContext(const SquareTestcase& tc, int mesh_n,
                       const SolveOptions& opt, bool check_assumptions)
    : testcase(tc),
      mesh(build_unit_square_mesh(mesh_n)),
      disc(build_discretization(mesh)),
      solve(opt) {
  coeffs = std::make_unique<TabulatedCoefficients>(disc, testcase.model,
                                                   &testcase.diffusion);
  lift = make_lift(mesh, testcase.dirichlet);
  qoi = make_qoi_vector(mesh, testcase.qoi_weight, testcase.qoi_cutoff);
  qoi_interior = interior_part(mesh, qoi.full);
  for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
    if (mesh.on_boundary[v]) qoi_boundary_term += qoi.full[v] * lift[v];

  assumptions = verify_assumptions(testcase.model, probe_points(mesh, disc));
  if (check_assumptions && assumptions.delta_tilde <= 0) {
    std::ostringstream os;
    os << "uniform invertibility margin violated: delta_tilde = "
       << assumptions.delta_tilde << " at x = (" << assumptions.worst_point.x()
       << ", " << assumptions.worst_point.y() << ")";
    throw std::runtime_error(os.str());
  }

  AssemblyWorkspace ws(disc);
  q_ref = solve_node(*this, {}, ws);
}

std::vector<std::int64_t> NodeCache::key(std::span<const double> y) const {
  std::vector<std::int64_t> k(dim_, 0);
  for (std::size_t l = 0; l < y.size(); ++l)
    k[l] = std::llround(y[l] * kKeyQuantum);
  return k;
}

const double* NodeCache::find(std::span<const double> y) const {
  const auto it = map_.find(key(y));
  return it == map_.end() ? nullptr : &it->second;
}

void NodeCache::insert(std::span<const double> y, double q) {
  map_[key(y)] = q;
}

EstimateResult estimate(const PdeContext& ctx, const SparseGrid& grid, int jobs,
                        NodeCache* cache) {
  const double t0 = now_seconds();
  EstimateResult est;
  est.eta = grid.eta();
  const int n_nodes = est.eta;
  est.samples.assign(n_nodes, 0.0);

  std::vector<int> todo;
  todo.reserve(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    if (cache) {
      if (const double* hit = cache->find(grid.nodes[i])) {
        est.samples[i] = *hit;
        continue;
      }
    }
    todo.push_back(i);
  }
  est.fresh_solves = static_cast<int>(todo.size());

  std::vector<std::string> errors(todo.size());
#ifdef DMUQ_HAVE_OPENMP
  if (jobs > 1) {
#pragma omp parallel num_threads(jobs)
    {
      AssemblyWorkspace ws(ctx.disc);
#pragma omp for schedule(dynamic)
      for (int k = 0; k < static_cast<int>(todo.size()); ++k) {
        const int i = todo[k];
        try {
          est.samples[i] = solve_node(ctx, grid.nodes[i], ws);
        } catch (const std::exception& e) {
          errors[k] = e.what();
        }
      }
    }
  } else
#endif
  {
    AssemblyWorkspace ws(ctx.disc);
    for (std::size_t k = 0; k < todo.size(); ++k) {
      const int i = todo[k];
      try {
        est.samples[i] = solve_node(ctx, grid.nodes[i], ws);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  }

  for (std::size_t k = 0; k < todo.size(); ++k)
    if (!errors[k].empty())
      throw std::runtime_error("solve failed for " +
                               describe_node(todo[k], grid.nodes[todo[k]]) +
                               ": " + errors[k]);

  if (cache)
    for (const int i : todo) cache->insert(grid.nodes[i], est.samples[i]);

  const Moments m = moments(grid, est.samples);
  est.mean = m.mean;
  est.variance = m.variance;
  clamp_variance(est);
  est.seconds = now_seconds() - t0;
  return est;
}

EstimateResult estimate(const std::function<double(std::span<const double>)>& q,
                        const SparseGrid& grid) {
  const double t0 = now_seconds();
  EstimateResult est;
  est.eta = grid.eta();
  est.samples.resize(grid.nodes.size());
  for (std::size_t i = 0; i < grid.nodes.size(); ++i)
    est.samples[i] = q(grid.nodes[i]);
  est.fresh_solves = est.eta;
  const Moments m = moments(grid, est.samples);
  est.mean = m.mean;
  est.variance = m.variance;
  clamp_variance(est);
  est.seconds = now_seconds() - t0;
  return est;
}

double qoi_via_adjoint(const PdeContext& ctx, std::span<const double> y) {
  AssemblyWorkspace ws(ctx.disc);
  assemble(ctx.mesh, ctx.disc, *ctx.coeffs, y, &ctx.testcase.source, ctx.lift, ws);
  const Eigen::VectorXd load = ws.load;
  ws.load = ctx.qoi_interior;
  solve_interior(ws, ctx.solve);
  return ctx.qoi_boundary_term + load.dot(ws.u_int);
}

Normalized normalized(const EstimateResult& est, double q_ref) {
  if (q_ref == 0) throw std::invalid_argument("reference value is zero");
  return {est.mean / q_ref, est.variance / (q_ref * q_ref)};
}

double fit_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("need at least two points for a slope fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0)
      throw std::invalid_argument("slope fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SgStudy sparse_grid_study(PdeContext& ctx, GridRule rule,
                          std::span<const int> n_s_list, int w_max, int ref_n_s,
                          int ref_w, int jobs, NodeCache* cache) {
  SgStudy study;
  study.q_ref = ctx.q_ref;
  NodeCache local(ctx.testcase.model.n_terms);
  if (!cache) cache = &local;

  const SparseGrid ref_grid = build_grid(GridRule::smolyak, ref_n_s, ref_w);
  const EstimateResult ref = estimate(ctx, ref_grid, jobs, cache);
  study.total_solves += ref.fresh_solves;
  study.ref_eta = ref.eta;
  const Normalized ref_n = normalized(ref, ctx.q_ref);
  study.ref_mean = ref_n.mean;
  study.ref_var = ref_n.variance;

  for (const int n_s : n_s_list) {
    for (int w = 0; w <= w_max; ++w) {
      const SparseGrid grid = build_grid(rule, n_s, w);
      const EstimateResult est = estimate(ctx, grid, jobs, cache);
      study.total_solves += est.fresh_solves;
      const Normalized cur = normalized(est, ctx.q_ref);
      study.rows.push_back({n_s, w, est.eta,
                            std::abs(cur.mean - study.ref_mean),
                            std::abs(cur.variance - study.ref_var)});
    }
  }
  return study;
}

TruncationStudy truncation_study(PdeContext& ctx, GridRule rule,
                                 std::span<const int> n_s_list, int w,
                                 int ref_n_s, int ref_w, int jobs,
                                 NodeCache* cache) {
  TruncationStudy study;
  study.q_ref = ctx.q_ref;
  NodeCache local(ctx.testcase.model.n_terms);
  if (!cache) cache = &local;

  const SparseGrid ref_grid = build_grid(GridRule::smolyak, ref_n_s, ref_w);
  const EstimateResult ref = estimate(ctx, ref_grid, jobs, cache);
  study.total_solves += ref.fresh_solves;
  study.ref_eta = ref.eta;
  const Normalized ref_n = normalized(ref, ctx.q_ref);

  std::vector<double> ns, me, ve;
  for (const int n_s : n_s_list) {
    const SparseGrid grid = build_grid(rule, n_s, w);
    const EstimateResult est = estimate(ctx, grid, jobs, cache);
    study.total_solves += est.fresh_solves;
    const Normalized cur = normalized(est, ctx.q_ref);
    const double em = std::abs(cur.mean - ref_n.mean);
    const double ev = std::abs(cur.variance - ref_n.variance);
    study.rows.push_back({n_s, est.eta, em, ev});
    if (em > 0 && ev > 0) {
      ns.push_back(n_s);
      me.push_back(em);
      ve.push_back(ev);
    }
  }
  if (ns.size() >= 2) {
    study.slope_mean = fit_log_slope(ns, me);
    study.slope_var = fit_log_slope(ns, ve);
  }
  return study;
}

FemStudy fem_study(const SquareTestcase& tc, std::span<const int> mesh_list,
                   int ref_mesh_n, GridRule rule, int n_s, int w,
                   const SolveOptions& opt, int jobs, bool check_assumptions) {
  FemStudy study;
  const SparseGrid grid = build_grid(rule, n_s, w);

  PdeContext ref_ctx(tc, ref_mesh_n, opt, check_assumptions);
  const EstimateResult ref = estimate(ref_ctx, grid, jobs, nullptr);
  study.q_ref = ref_ctx.q_ref;

  std::vector<double> hs, errs;
  for (const int n : mesh_list) {
    PdeContext ctx(tc, n, opt, check_assumptions);
    const EstimateResult est = estimate(ctx, grid, jobs, nullptr);
    const double err = std::abs(est.mean - ref.mean);
    study.rows.push_back({n, ctx.mesh.h, err});
    if (err > 0) {
      hs.push_back(ctx.mesh.h);
      errs.push_back(err);
    }
  }
  if (hs.size() >= 2) {
    study.slope = fit_log_slope(hs, errs);
    study.slope_in_window = study.slope >= 1.7 && study.slope <= 2.3;
  }
  return study;
}

}  // namespace dmuq
