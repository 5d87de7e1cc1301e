// End-to-end acceptance checks, one pass/fail line per criterion. Exits
// nonzero if any criterion fails. Heavy criteria share a single desk-profile
// run whose curves are written under --out as evidence.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#ifdef DMUQ_HAVE_OPENMP
#include <omp.h>
#endif

#include "dmuq/analyticity.hpp"
#include "dmuq/artifacts.hpp"
#include "dmuq/config.hpp"
#include "dmuq/pipeline.hpp"
#include "support.hpp"

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int g_failures = 0;

void report(int id, bool pass, const std::string& text) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, text.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

const dmuq::GridRule kRules[] = {dmuq::GridRule::tensor, dmuq::GridRule::total_degree,
                                 dmuq::GridRule::hyperbolic, dmuq::GridRule::smolyak};

void criterion1_exactness() {
  const auto t0 = clock_type::now();
  std::mt19937 rng(20260814);
  std::uniform_real_distribution<double> coeff_dist(0.25, 2.0);
  double worst = 0;
  for (dmuq::GridRule rule : kRules) {
    for (int n = 1; n <= 3; ++n) {
      for (int w = 0; w <= 3; ++w) {
        const dmuq::SparseGrid grid = dmuq::build_grid(rule, n, w);
        const auto degrees = dmuq::exactness_set(rule, n, w);
        std::uniform_int_distribution<std::size_t> pick(0, degrees.size() - 1);
        for (int rep = 0; rep < 20; ++rep) {
          const dmuq::MultiIndex& p = degrees[pick(rng)];
          const double c = coeff_dist(rng);
          std::vector<double> samples(grid.eta());
          for (std::size_t k = 0; k < grid.eta(); ++k)
            samples[k] = c * oracle::monomial(grid.nodes[k], p);
          const dmuq::SparseInterpolant si(grid, samples);
          for (int pt = 0; pt < 100; ++pt) {
            const auto y = oracle::random_point(rng, n);
            worst = std::max(worst, std::fabs(si(y) - c * oracle::monomial(y, p)));
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  report(1, worst <= 1e-10 && secs < 10.0,
         fmt("polynomial exactness over TP/TD/HC/SM, N_s<=3, w<=3: max "
             "interpolation error %.3e (limit 1e-10), %.1f s (limit 10 s)",
             worst, secs));
}

void criterion2_combination() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0;
  for (int k = 0; k < 50; ++k) {
    const dmuq::GridRule rule = kRules[k % 4];
    const int n = 1 + k % 3;
    const int w = k % 5;
    std::vector<double> a(n), b(n);
    for (int d = 0; d < n; ++d) {
      a[d] = 0.5 * u(rng);
      b[d] = 2.0 * u(rng);
    }
    const double phase = u(rng);
    const oracle::RealFn f = [&](std::span<const double> y) {
      double dot_a = 0, dot_b = 0;
      for (int d = 0; d < n; ++d) {
        dot_a += a[d] * y[d];
        dot_b += b[d] * y[d];
      }
      return std::exp(dot_a) * std::cos(dot_b + phase);
    };
    const dmuq::SparseGrid grid = dmuq::build_grid(rule, n, w);
    std::vector<double> samples(grid.eta());
    for (std::size_t i = 0; i < grid.eta(); ++i) samples[i] = f(grid.nodes[i]);
    const dmuq::SparseInterpolant si(grid, samples);
    for (int pt = 0; pt < 5; ++pt) {
      const auto y = oracle::random_point(rng, n);
      const double direct = si(y);
      const double telescoped = oracle::delta_form(rule, n, w, f, y);
      worst = std::max(worst, std::fabs(direct - telescoped) /
                                  std::max(1.0, std::fabs(telescoped)));
    }
  }
  report(2, worst <= 1e-12,
         fmt("combination coefficients match the telescoped difference form: "
             "max relative gap %.3e (limit 1e-12), 50 smooth functions",
             worst));
}

void criterion3_fem_convergence() {
  const auto t0 = clock_type::now();
  const dmuq::ManufacturedCase mc = dmuq::build_manufactured_case();
  const dmuq::ScalarField weight =
      dmuq::build_square_testcase(0.0, 0.5, 1.0, 1).qoi_weight;
  const double q_exact = oracle::simpson2d(
      [&](double x, double y) {
        const dmuq::Vec2 p(x, y);
        return weight.value(p) * mc.exact.value(p);
      },
      0.0, 1.0, 0.0, 0.5, 512);

  std::vector<double> l2, h1, qoi;
  for (int n : {17, 33, 65, 129}) {
    const dmuq::Mesh mesh = dmuq::build_unit_square_mesh(n);
    const dmuq::DirectCoefficients coeffs(mc.identity, nullptr);
    const dmuq::FemSolution sol =
        dmuq::solve_single(mesh, coeffs, {}, &mc.source, mc.dirichlet, {});
    const dmuq::ErrorNorms err = dmuq::solution_error(mesh, sol.full, mc.exact);
    const dmuq::QoiVector qv = dmuq::make_qoi_vector(mesh, weight, 0.5);
    l2.push_back(err.l2);
    h1.push_back(err.h1);
    qoi.push_back(std::fabs(dmuq::evaluate_qoi(qv, sol.full) - q_exact));
  }

  bool ok = true;
  std::string detail;
  const auto check = [&](const std::vector<double>& e, double lo, double hi,
                         const char* name) {
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      const double r = e[i] / e[i + 1];
      detail += fmt("%s%s %.2f", detail.empty() ? "" : ", ", name, r);
      if (!(r >= lo && r <= hi)) ok = false;
    }
  };
  check(l2, 3.4, 4.6, "L2");
  check(h1, 1.7, 2.3, "H1");
  check(qoi, 3.4, 4.6, "QoI");
  const double secs = seconds_since(t0);
  if (secs >= 60.0) ok = false;
  report(3, ok,
         fmt("manufactured FE rates on meshes 17..129, ratios %s, %.1f s "
             "(limit 60 s)",
             detail.c_str(), secs));
}

struct DeskRun {
  double norm_mean = 0, norm_var = 0;
  int headline_eta = 0;
  dmuq::SgStudy sg;
  dmuq::TruncationStudy tr;
  double seconds = 0;
};

DeskRun run_desk(bool paper_scale, int jobs, const fs::path& out) {
  const auto t0 = clock_type::now();
  dmuq::ExperimentConfig cfg;
  if (paper_scale) cfg.mesh_n = 257;
  const dmuq::SquareTestcase tc = dmuq::make_testcase(cfg);

  DeskRun desk;
  {
    dmuq::PdeContext ctx(tc, cfg.mesh_n, dmuq::solve_options(cfg));
    const dmuq::SparseGrid grid = dmuq::build_grid(cfg.rule, cfg.n_s, cfg.w);
    const dmuq::EstimateResult est = dmuq::estimate(ctx, grid, jobs);
    const dmuq::Normalized norm = dmuq::normalized(est, ctx.q_ref);
    desk.norm_mean = norm.mean;
    desk.norm_var = norm.variance;
    desk.headline_eta = est.eta;
  }

  const int study_mesh = (cfg.mesh_n + 1) / 2;
  dmuq::PdeContext study_ctx(tc, study_mesh, dmuq::solve_options(cfg));
  dmuq::NodeCache cache(cfg.n_terms);
  const std::vector<int> fig4_list = {2, 3, 4, 5, 6, 7, 8};
  desk.tr = dmuq::truncation_study(study_ctx, cfg.rule, fig4_list, cfg.w, 12, 4,
                                   jobs, &cache);
  const std::vector<int> fig2_list = {2, 3, 4, 5, 6};
  desk.sg = dmuq::sparse_grid_study(study_ctx, cfg.rule, fig2_list, cfg.w, 12, 4,
                                    jobs, &cache);
  desk.seconds = seconds_since(t0);

  dmuq::Csv fig2a{{"N_s", "knots", "mean_error"}, {}};
  dmuq::Csv fig2b{{"N_s", "knots", "var_error"}, {}};
  for (const auto& row : desk.sg.rows) {
    fig2a.rows.push_back({double(row.n_s), double(row.eta), row.mean_error});
    fig2b.rows.push_back({double(row.n_s), double(row.eta), row.var_error});
  }
  dmuq::Csv fig4a{{"N_s", "mean_error"}, {}};
  dmuq::Csv fig4b{{"N_s", "var_error"}, {}};
  for (const auto& row : desk.tr.rows) {
    fig4a.rows.push_back({double(row.n_s), row.mean_error});
    fig4b.rows.push_back({double(row.n_s), row.var_error});
  }
  dmuq::write_csv(out / "fig2a.csv", fig2a);
  dmuq::write_csv(out / "fig2b.csv", fig2b);
  dmuq::write_csv(out / "fig4a.csv", fig4a);
  dmuq::write_csv(out / "fig4b.csv", fig4b);
  return desk;
}

void criterion4_statistics(const DeskRun& desk, bool paper_scale) {
  const double mean_tol = paper_scale ? 0.02 : 0.05;
  const double var_tol = paper_scale ? 0.10 : 0.20;
  const double mean_gap = std::fabs(desk.norm_mean - 1.0152) / 1.0152;
  const double var_gap = std::fabs(desk.norm_var - 0.0293) / 0.0293;
  const bool in_time = desk.seconds < 1800.0;
  report(4,
         mean_gap <= mean_tol && var_gap <= var_tol && in_time,
         fmt("normalized statistics: mean %.4f vs 1.0152 (gap %.2f%%, limit "
             "%.0f%%), variance %.4f vs 0.0293 (gap %.2f%%, limit %.0f%%), "
             "%.0f s (limit 1800 s)",
             desk.norm_mean, 100 * mean_gap, 100 * mean_tol, desk.norm_var,
             100 * var_gap, 100 * var_tol, desk.seconds));
}

void criterion5_fig2_shape(const DeskRun& desk) {
  bool ok = true;
  std::string detail;
  std::vector<double> saturation;
  std::vector<int> dims;
  for (std::size_t i = 0; i < desk.sg.rows.size();) {
    const int n_s = desk.sg.rows[i].n_s;
    std::vector<double> curve;
    while (i < desk.sg.rows.size() && desk.sg.rows[i].n_s == n_s)
      curve.push_back(desk.sg.rows[i++].mean_error);
    int violations = 0;
    for (std::size_t j = 0; j + 1 < curve.size(); ++j)
      if (curve[j + 1] > 1.01 * curve[j]) ++violations;
    if (violations > 1) ok = false;
    saturation.push_back(curve.back());
    dims.push_back(n_s);
    detail += fmt("%sN_s=%d: %d step-ups, floor %.2e", detail.empty() ? "" : "; ",
                  n_s, violations, curve.back());
  }
  for (std::size_t k = 0; k + 1 < saturation.size(); ++k)
    if (!(saturation[k + 1] < saturation[k])) ok = false;
  report(5, ok, fmt("mean-error curves decrease in eta and saturate lower as "
                    "N_s grows (%s)",
                    detail.c_str()));
}

void criterion6_fig4_decay(const DeskRun& desk) {
  report(6, desk.tr.slope_mean <= -1.0,
         fmt("truncation decay of the mean over N_s=2..8: log-log slope %.2f "
             "(limit -1)",
             desk.tr.slope_mean));
}

void criterion7_analyticity() {
  const auto t0 = clock_type::now();
  bool ok = true;
  std::string fail;
  double worst_alpha_gap = 0, worst_c = 0;
  for (int dd = 1; dd <= 9; ++dd) {
    const double delta = 0.1 * dd;
    for (int d = 1; d <= 3; ++d) {
      const dmuq::RegionReport rep = dmuq::analyze_region(delta, d, 1, 1, 6, 0.9);
      if (!(rep.bound.beta_lemma > 0) || !(rep.bound.beta_thm > 0)) {
        ok = false;
        fail = fmt("beta bounds not positive at delta=%.1f d=%d", delta, d);
      }
      if (!(rep.constants.alpha > 0 && rep.constants.alpha < 1)) {
        ok = false;
        fail = fmt("alpha(0.9 beta_max)=%.3g outside (0,1) at delta=%.1f d=%d",
                   rep.constants.alpha, delta, d);
      }
      if (rep.constants.B > 0 && !(rep.constants.epsilon > 0)) {
        ok = false;
        fail = fmt("epsilon<=0 with B>0 at delta=%.1f d=%d", delta, d);
      }
      const dmuq::RegionReport limit =
          dmuq::analyze_region(delta, d, 1, 1, 6, 1e-16);
      worst_alpha_gap =
          std::max(worst_alpha_gap, std::fabs(limit.constants.alpha - 1.0));
      worst_c = std::max(worst_c, std::fabs(limit.constants.C));
    }
  }
  if (worst_alpha_gap > 1e-8 || worst_c > 1e-8) {
    ok = false;
    fail = fmt("beta->0 limits off: |alpha-1|=%.2e, |C|=%.2e", worst_alpha_gap,
               worst_c);
  }
  const double secs = seconds_since(t0);
  if (secs >= 1.0) {
    ok = false;
    fail = fmt("%.2f s (limit 1 s)", secs);
  }
  report(7, ok,
         ok ? fmt("analyticity constants on delta in {0.1..0.9} x d in {1,2,3}: "
                  "bounds positive, alpha in (0,1), beta->0 gaps %.1e / %.1e, "
                  "%.2f s",
                  worst_alpha_gap, worst_c, secs)
            : fail);
}

void criterion8_determinism(int jobs, const fs::path& out) {
  // zero deformation
  const dmuq::SquareTestcase tc0 = dmuq::build_square_testcase(0.0, 0.5, 1.0, 15);
  dmuq::PdeContext ctx0(tc0, 33);
  const dmuq::SparseGrid g0 = dmuq::build_grid(dmuq::GridRule::smolyak, 3, 2);
  const dmuq::EstimateResult est0 = dmuq::estimate(ctx0, g0, 1);
  const bool zero_ok = std::fabs(est0.variance) <= 1e-12;

  // identical configs produce byte-identical CSVs
  dmuq::ExperimentConfig small;
  small.mesh_n = 33;
  const std::vector<int> dims = {2, 3};
  std::string render[2];
  for (int run = 0; run < 2; ++run) {
    dmuq::PdeContext ctx(dmuq::make_testcase(small), small.mesh_n,
                         dmuq::solve_options(small));
    const dmuq::SgStudy sg =
        dmuq::sparse_grid_study(ctx, small.rule, dims, 2, 4, 3, jobs);
    dmuq::Csv csv{{"N_s", "knots", "mean_error"}, {}};
    for (const auto& row : sg.rows)
      csv.rows.push_back({double(row.n_s), double(row.eta), row.mean_error});
    render[run] = dmuq::render_csv(csv);
    dmuq::write_text(out / fmt("determinism_run%d.csv", run), render[run]);
  }
  const bool bytes_ok = !render[0].empty() && render[0] == render[1];

  // parallel equals serial
  dmuq::PdeContext ctx(dmuq::make_testcase(small), small.mesh_n,
                       dmuq::solve_options(small));
  const dmuq::SparseGrid g = dmuq::build_grid(dmuq::GridRule::smolyak, 4, 2);
  const dmuq::EstimateResult serial = dmuq::estimate(ctx, g, 1);
  const dmuq::EstimateResult parallel = dmuq::estimate(ctx, g, 4);
  const double scale = std::max(1.0, std::fabs(serial.mean));
  const double dmean = std::fabs(serial.mean - parallel.mean);
  const double dvar = std::fabs(serial.variance - parallel.variance);
  const bool par_ok = dmean <= 1e-13 * scale && dvar <= 1e-13 * scale;

  report(8, zero_ok && bytes_ok && par_ok,
         fmt("zero-deformation variance %.1e (limit 1e-12); repeated runs "
             "byte-identical: %s; parallel vs serial gaps %.1e / %.1e (limit "
             "1e-13)",
             est0.variance, bytes_ok ? "yes" : "NO", dmean, dvar));
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = "acceptance_out";
  bool paper_scale = false;
#ifdef DMUQ_HAVE_OPENMP
  int jobs = omp_get_max_threads();
#else
  int jobs = 1;
#endif
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--out") && i + 1 < argc) {
      out = argv[++i];
    } else if (!std::strcmp(argv[i], "--jobs") && i + 1 < argc) {
      jobs = std::atoi(argv[++i]);
    } else if (!std::strcmp(argv[i], "--paper-scale")) {
      paper_scale = true;
    } else {
      std::fprintf(stderr, "usage: acceptance [--out DIR] [--jobs K] [--paper-scale]\n");
      return 2;
    }
  }
  fs::create_directories(out);
  std::printf("acceptance run: jobs=%d, profile=%s, out=%s\n", jobs,
              paper_scale ? "paper" : "desk", out.string().c_str());
  std::fflush(stdout);

  criterion1_exactness();
  criterion2_combination();
  criterion3_fem_convergence();
  const DeskRun desk = run_desk(paper_scale, jobs, out);
  criterion4_statistics(desk, paper_scale);
  criterion5_fig2_shape(desk);
  criterion6_fig4_decay(desk);
  criterion7_analyticity();
  criterion8_determinism(jobs, out);

  std::printf("%d/8 criteria passed\n", 8 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
