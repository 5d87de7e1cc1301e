#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dmuq/analyticity.hpp"
#include "dmuq/artifacts.hpp"
#include "dmuq/config.hpp"
#include "dmuq/pipeline.hpp"
#include "json.hpp"

namespace {

using dmuq::ExperimentConfig;
using nlohmann::json;
namespace fs = std::filesystem;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int jobs = 0;
  bool force_unsafe = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--jobs", opts.jobs, "worker threads for node solves");
  cmd->add_flag("--force-unsafe", opts.force_unsafe,
                "skip the invertibility-margin gate");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
  ExperimentConfig cfg = opts.config_path.empty()
                             ? ExperimentConfig{}
                             : dmuq::load_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.jobs > 0) cfg.jobs = opts.jobs;
  if (opts.force_unsafe) cfg.force_unsafe = true;
  dmuq::validate(cfg);
  return cfg;
}

json base_manifest(const std::string& command, const ExperimentConfig& cfg) {
  json m;
  m["command"] = command;
  m["config"] = json::parse(dmuq::canonical_config(cfg));
  m["fingerprint"] = dmuq::config_fingerprint(cfg);
  return m;
}

json assumptions_json(const dmuq::AssumptionReport& rep) {
  json a;
  a["delta_tilde"] = rep.delta_tilde;
  a["worst_point"] = {rep.worst_point.x(), rep.worst_point.y()};
  a["basis_sup"] = rep.basis_sup;
  return a;
}

json solver_json(const dmuq::SolveOptions& opt) {
  json s;
  s["method"] = opt.method == dmuq::SolveOptions::Method::cg ? "cg" : "ldlt";
  s["tol"] = opt.tol;
  s["max_iter"] = opt.max_iter;
  return s;
}

void write_manifest(const ExperimentConfig& cfg, const json& manifest) {
  dmuq::write_text(fs::path(cfg.out_dir) / "manifest.json",
                   manifest.dump(2) + "\n");
}

json grid_entry(const char* role, dmuq::GridRule rule, int n_s, int w, int eta) {
  json g;
  g["role"] = role;
  g["rule"] = dmuq::rule_name(rule);
  g["n_s"] = n_s;
  g["w"] = w;
  g["eta"] = eta;
  return g;
}

int clamp_ns(int n_s, const ExperimentConfig& cfg) {
  return std::min(n_s, cfg.n_terms);
}

int run_solve(const ExperimentConfig& cfg) {
  const dmuq::SquareTestcase tc = dmuq::make_testcase(cfg);
  dmuq::PdeContext ctx(tc, cfg.mesh_n, dmuq::solve_options(cfg),
                       !cfg.force_unsafe);
  const dmuq::SparseGrid grid = dmuq::build_grid(cfg.rule, cfg.n_s, cfg.w);
  const dmuq::EstimateResult est = dmuq::estimate(ctx, grid, cfg.jobs);
  const dmuq::Normalized norm = dmuq::normalized(est, ctx.q_ref);

  std::printf("delta_tilde          = %.6f\n", ctx.assumptions.delta_tilde);
  std::printf("eta                  = %d\n", est.eta);
  std::printf("q_ref                = %.10g\n", ctx.q_ref);
  std::printf("mean                 = %.10g\n", est.mean);
  std::printf("variance             = %.10g\n", est.variance);
  std::printf("normalized mean      = %.10g\n", norm.mean);
  std::printf("normalized variance  = %.10g\n", norm.variance);

  json m = base_manifest("solve", cfg);
  m["assumptions"] = assumptions_json(ctx.assumptions);
  m["solver"] = solver_json(ctx.solve);
  m["grids"] = json::array({grid_entry("estimate", cfg.rule, cfg.n_s, cfg.w, est.eta)});
  m["results"] = {{"q_ref", ctx.q_ref},
                  {"mean", est.mean},
                  {"variance", est.variance},
                  {"normalized_mean", norm.mean},
                  {"normalized_variance", norm.variance},
                  {"eta", est.eta},
                  {"fresh_solves", est.fresh_solves}};
  m["timings"] = {{"estimate_seconds", est.seconds}};
  write_manifest(cfg, m);
  dmuq::write_text(fs::path(cfg.out_dir) / "solve.json", m["results"].dump(2) + "\n");
  return 0;
}

int run_sg_study(const ExperimentConfig& cfg) {
  const dmuq::SquareTestcase tc = dmuq::make_testcase(cfg);
  dmuq::PdeContext ctx(tc, cfg.mesh_n, dmuq::solve_options(cfg),
                       !cfg.force_unsafe);
  const std::vector<int> single = {cfg.n_s};
  const dmuq::SgStudy study = dmuq::sparse_grid_study(
      ctx, cfg.rule, single, cfg.w, cfg.ref_n_s, cfg.ref_w, cfg.jobs);

  dmuq::Csv csv;
  csv.header = {"knots", "mean_error", "var_error"};
  json grids = json::array();
  grids.push_back(grid_entry("reference", dmuq::GridRule::smolyak, cfg.ref_n_s,
                             cfg.ref_w, study.ref_eta));
  for (const auto& row : study.rows) {
    csv.rows.push_back({static_cast<double>(row.eta), row.mean_error, row.var_error});
    grids.push_back(grid_entry("curve", cfg.rule, row.n_s, row.w, row.eta));
  }
  dmuq::write_csv(fs::path(cfg.out_dir) / "sg_study.csv", csv);

  std::printf("sparse-grid study: n_s = %d, w = 0..%d, reference eta = %d\n",
              cfg.n_s, cfg.w, study.ref_eta);
  for (const auto& row : study.rows)
    std::printf("  w=%d eta=%-6d mean_error=%.6e var_error=%.6e\n", row.w,
                row.eta, row.mean_error, row.var_error);

  json m = base_manifest("sg-study", cfg);
  m["assumptions"] = assumptions_json(ctx.assumptions);
  m["solver"] = solver_json(ctx.solve);
  m["grids"] = grids;
  m["results"] = {{"q_ref", study.q_ref},
                  {"ref_mean", study.ref_mean},
                  {"ref_var", study.ref_var},
                  {"total_solves", study.total_solves}};
  write_manifest(cfg, m);
  return 0;
}

int run_truncation_study(const ExperimentConfig& cfg) {
  const dmuq::SquareTestcase tc = dmuq::make_testcase(cfg);
  dmuq::PdeContext ctx(tc, cfg.mesh_n, dmuq::solve_options(cfg),
                       !cfg.force_unsafe);
  const dmuq::TruncationStudy study = dmuq::truncation_study(
      ctx, cfg.rule, cfg.n_s_list, cfg.w, cfg.ref_n_s, cfg.ref_w, cfg.jobs);

  dmuq::Csv csv;
  csv.header = {"N_s", "mean_error", "var_error"};
  json grids = json::array();
  grids.push_back(grid_entry("reference", dmuq::GridRule::smolyak, cfg.ref_n_s,
                             cfg.ref_w, study.ref_eta));
  for (const auto& row : study.rows) {
    csv.rows.push_back({static_cast<double>(row.n_s), row.mean_error, row.var_error});
    grids.push_back(grid_entry("curve", cfg.rule, row.n_s, cfg.w, row.eta));
  }
  dmuq::write_csv(fs::path(cfg.out_dir) / "truncation_study.csv", csv);

  std::printf("truncation study: w = %d, reference (n_s=%d, w=%d, eta=%d)\n",
              cfg.w, cfg.ref_n_s, cfg.ref_w, study.ref_eta);
  for (const auto& row : study.rows)
    std::printf("  N_s=%-2d mean_error=%.6e var_error=%.6e\n", row.n_s,
                row.mean_error, row.var_error);
  std::printf("  slopes: mean %.3f, variance %.3f\n", study.slope_mean,
              study.slope_var);

  json m = base_manifest("truncation-study", cfg);
  m["assumptions"] = assumptions_json(ctx.assumptions);
  m["solver"] = solver_json(ctx.solve);
  m["grids"] = grids;
  m["results"] = {{"q_ref", study.q_ref},
                  {"slope_mean", study.slope_mean},
                  {"slope_var", study.slope_var},
                  {"total_solves", study.total_solves}};
  write_manifest(cfg, m);
  return 0;
}

int run_fem_study(const ExperimentConfig& cfg) {
  const dmuq::SquareTestcase tc = dmuq::make_testcase(cfg);
  const dmuq::FemStudy study =
      dmuq::fem_study(tc, cfg.mesh_list, cfg.ref_mesh_n, cfg.rule, cfg.n_s,
                      cfg.w, dmuq::solve_options(cfg), cfg.jobs,
                      !cfg.force_unsafe);

  dmuq::Csv csv;
  csv.header = {"h", "qoi_error"};
  for (const auto& row : study.rows) csv.rows.push_back({row.h, row.qoi_error});
  dmuq::write_csv(fs::path(cfg.out_dir) / "fem_study.csv", csv);

  std::printf("fem study: grid (n_s=%d, w=%d), reference mesh %dx%d\n", cfg.n_s,
              cfg.w, cfg.ref_mesh_n, cfg.ref_mesh_n);
  for (const auto& row : study.rows)
    std::printf("  mesh=%-4d h=%.6f qoi_error=%.6e\n", row.mesh_n, row.h,
                row.qoi_error);
  std::printf("  slope: %.3f (%s)\n", study.slope,
              study.slope_in_window ? "within the h^2 window"
                                    : "outside the h^2 window");

  json m = base_manifest("fem-study", cfg);
  m["results"] = {{"q_ref", study.q_ref},
                  {"slope", study.slope},
                  {"slope_in_window", study.slope_in_window}};
  m["solver"] = solver_json(dmuq::solve_options(cfg));
  write_manifest(cfg, m);
  return 0;
}

int run_reproduce(ExperimentConfig cfg, bool paper_scale) {
  if (paper_scale) {
    cfg.mesh_n = 257;
    cfg.ref_n_s = clamp_ns(12, cfg);
    cfg.ref_w = 4;
    cfg.ref_mesh_n = 257;
    cfg.mesh_list = {17, 33, 65, 129};
  }
  const int study_mesh = (cfg.mesh_n + 1) / 2;
  const int study_ref_n_s = clamp_ns(12, cfg);
  const int study_ref_w = 4;
  std::vector<int> fig4_list;
  for (int n_s = 2; n_s <= (paper_scale ? 11 : 8); ++n_s)
    if (n_s <= cfg.n_terms) fig4_list.push_back(n_s);

  const dmuq::SquareTestcase tc = dmuq::make_testcase(cfg);

  // headline statistics on the full mesh
  dmuq::PdeContext ctx(tc, cfg.mesh_n, dmuq::solve_options(cfg),
                       !cfg.force_unsafe);
  dmuq::NodeCache cache(cfg.n_terms);
  const dmuq::SparseGrid ref_grid =
      dmuq::build_grid(dmuq::GridRule::smolyak, cfg.ref_n_s, cfg.ref_w);
  const dmuq::EstimateResult ref = dmuq::estimate(ctx, ref_grid, cfg.jobs, &cache);
  const dmuq::SparseGrid grid = dmuq::build_grid(cfg.rule, cfg.n_s, cfg.w);
  const dmuq::EstimateResult est = dmuq::estimate(ctx, grid, cfg.jobs, &cache);
  const dmuq::Normalized norm = dmuq::normalized(est, ctx.q_ref);
  const dmuq::Normalized ref_norm = dmuq::normalized(ref, ctx.q_ref);

  std::printf("headline (mesh %dx%d, n_s=%d, w=%d, eta=%d):\n", cfg.mesh_n,
              cfg.mesh_n, cfg.n_s, cfg.w, est.eta);
  std::printf("  normalized mean      = %.6f\n", norm.mean);
  std::printf("  normalized variance  = %.6f\n", norm.variance);
  std::printf("  reference (n_s=%d, w=%d, eta=%d): mean %.6f, variance %.6f\n",
              cfg.ref_n_s, cfg.ref_w, ref.eta, ref_norm.mean, ref_norm.variance);

  // figure curves on the study mesh, sharing one node table
  dmuq::PdeContext study_ctx(tc, study_mesh, dmuq::solve_options(cfg),
                             !cfg.force_unsafe);
  dmuq::NodeCache study_cache(cfg.n_terms);
  const dmuq::TruncationStudy tr =
      dmuq::truncation_study(study_ctx, cfg.rule, fig4_list, cfg.w,
                             study_ref_n_s, study_ref_w, cfg.jobs, &study_cache);
  const dmuq::SgStudy sg =
      dmuq::sparse_grid_study(study_ctx, cfg.rule, cfg.n_s_list, cfg.w,
                              study_ref_n_s, study_ref_w, cfg.jobs, &study_cache);

  dmuq::Csv fig2a, fig2b;
  fig2a.header = {"N_s", "knots", "mean_error"};
  fig2b.header = {"N_s", "knots", "var_error"};
  for (const auto& row : sg.rows) {
    fig2a.rows.push_back(
        {static_cast<double>(row.n_s), static_cast<double>(row.eta), row.mean_error});
    fig2b.rows.push_back(
        {static_cast<double>(row.n_s), static_cast<double>(row.eta), row.var_error});
  }
  dmuq::Csv fig4a, fig4b;
  fig4a.header = {"N_s", "mean_error"};
  fig4b.header = {"N_s", "var_error"};
  for (const auto& row : tr.rows) {
    fig4a.rows.push_back({static_cast<double>(row.n_s), row.mean_error});
    fig4b.rows.push_back({static_cast<double>(row.n_s), row.var_error});
  }

  // mesh refinement curve at a fixed small grid
  const dmuq::FemStudy fem =
      dmuq::fem_study(tc, cfg.mesh_list, cfg.ref_mesh_n, cfg.rule,
                      clamp_ns(4, cfg), 2, dmuq::solve_options(cfg), cfg.jobs,
                      !cfg.force_unsafe);
  dmuq::Csv fem_csv;
  fem_csv.header = {"h", "qoi_error"};
  for (const auto& row : fem.rows) fem_csv.rows.push_back({row.h, row.qoi_error});

  const fs::path out(cfg.out_dir);
  dmuq::write_csv(out / "fig2a.csv", fig2a);
  dmuq::write_csv(out / "fig2b.csv", fig2b);
  dmuq::write_csv(out / "fig4a.csv", fig4a);
  dmuq::write_csv(out / "fig4b.csv", fig4b);
  dmuq::write_csv(out / "fem_study.csv", fem_csv);

  std::printf("fig2: %zu rows (n_s in {", sg.rows.size());
  for (std::size_t i = 0; i < cfg.n_s_list.size(); ++i)
    std::printf("%s%d", i ? "," : "", cfg.n_s_list[i]);
  std::printf("}, w = 0..%d, study mesh %dx%d)\n", cfg.w, study_mesh, study_mesh);
  std::printf("fig4: %zu rows, mean slope %.3f, var slope %.3f\n", tr.rows.size(),
              tr.slope_mean, tr.slope_var);
  std::printf("fem curve: slope %.3f\n", fem.slope);

  json m = base_manifest("reproduce-paper", cfg);
  m["paper_scale"] = paper_scale;
  m["assumptions"] = assumptions_json(ctx.assumptions);
  m["solver"] = solver_json(ctx.solve);
  json grids = json::array();
  grids.push_back(grid_entry("headline", cfg.rule, cfg.n_s, cfg.w, est.eta));
  grids.push_back(grid_entry("headline-reference", dmuq::GridRule::smolyak,
                             cfg.ref_n_s, cfg.ref_w, ref.eta));
  for (const auto& row : sg.rows)
    grids.push_back(grid_entry("fig2", cfg.rule, row.n_s, row.w, row.eta));
  grids.push_back(grid_entry("fig2/4-reference", dmuq::GridRule::smolyak,
                             study_ref_n_s, study_ref_w, tr.ref_eta));
  for (const auto& row : tr.rows)
    grids.push_back(grid_entry("fig4", cfg.rule, row.n_s, cfg.w, row.eta));
  m["grids"] = grids;
  m["study_mesh_n"] = study_mesh;
  m["results"] = {{"q_ref", ctx.q_ref},
                  {"normalized_mean", norm.mean},
                  {"normalized_variance", norm.variance},
                  {"reference_mean", ref_norm.mean},
                  {"reference_variance", ref_norm.variance},
                  {"fig4_slope_mean", tr.slope_mean},
                  {"fig4_slope_var", tr.slope_var},
                  {"fem_slope", fem.slope}};
  m["timings"] = {{"headline_seconds", est.seconds + ref.seconds}};
  write_manifest(cfg, m);
  return 0;
}

int run_analyze_region(double delta, int d, double a_min, double a_max, int n_s,
                       double beta_fraction, bool as_json,
                       const std::string& out_dir) {
  const dmuq::RegionReport rep =
      dmuq::analyze_region(delta, d, a_min, a_max, n_s, beta_fraction);

  json j;
  j["delta_tilde"] = rep.delta_tilde;
  j["d"] = rep.d;
  j["a_min"] = rep.a_min;
  j["a_max"] = rep.a_max;
  j["beta_lemma"] = rep.bound.beta_lemma;
  j["beta_thm"] = rep.bound.beta_thm;
  j["geometric_cap"] = rep.bound.geometric_cap;
  j["beta_max"] = rep.bound.value();
  j["beta"] = rep.beta;
  j["sigma_min"] = rep.box.sigma_min;
  j["sigma_max"] = rep.box.sigma_max;
  j["det_min"] = rep.box.det_min;
  j["det_max"] = rep.box.det_max;
  j["lambda_min"] = rep.box.lambda_min;
  j["alpha"] = rep.constants.alpha;
  j["B"] = rep.constants.B;
  j["C"] = rep.constants.C;
  j["D"] = rep.constants.D;
  j["epsilon"] = rep.constants.epsilon;
  j["tau"] = rep.rate.tau;
  j["sigma_hat"] = rep.rate.sigma_hat;
  j["sigma"] = rep.rate.sigma;
  j["mu2"] = rep.rate.mu2;
  j["n_s"] = rep.rate.n_s;

  if (as_json) {
    std::printf("%s\n", j.dump(2).c_str());
  } else {
    std::printf("analyticity region report\n");
    const auto line = [](const char* k, double v) {
      std::printf("  %-14s %.12g\n", k, v);
    };
    line("delta_tilde", rep.delta_tilde);
    std::printf("  %-14s %d\n", "d", rep.d);
    line("a_min", rep.a_min);
    line("a_max", rep.a_max);
    line("beta_lemma", rep.bound.beta_lemma);
    line("beta_thm", rep.bound.beta_thm);
    line("geometric_cap", rep.bound.geometric_cap);
    line("beta_max", rep.bound.value());
    line("beta", rep.beta);
    line("sigma_min", rep.box.sigma_min);
    line("sigma_max", rep.box.sigma_max);
    line("det_min", rep.box.det_min);
    line("det_max", rep.box.det_max);
    line("lambda_min", rep.box.lambda_min);
    line("alpha", rep.constants.alpha);
    line("B", rep.constants.B);
    line("C", rep.constants.C);
    line("D", rep.constants.D);
    line("epsilon", rep.constants.epsilon);
    line("tau", rep.rate.tau);
    line("sigma_hat", rep.rate.sigma_hat);
    line("sigma", rep.rate.sigma);
    line("mu2", rep.rate.mu2);
    std::printf("  %-14s %d\n", "n_s", rep.rate.n_s);
  }
  if (!out_dir.empty())
    dmuq::write_text(fs::path(out_dir) / "analyticity.json", j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-grid collocation for an elliptic PDE on a random domain"};
  app.require_subcommand(1);

  CommonOpts solve_opts, sg_opts, tr_opts, fem_opts, repro_opts;
  bool paper_scale = false;

  CLI::App* solve = app.add_subcommand("solve", "single mean/variance estimate");
  add_common(solve, solve_opts);
  CLI::App* sg = app.add_subcommand("sg-study", "error vs knot count at fixed n_s");
  add_common(sg, sg_opts);
  CLI::App* tr = app.add_subcommand("truncation-study", "error vs retained dimensions");
  add_common(tr, tr_opts);
  CLI::App* fem = app.add_subcommand("fem-study", "QoI error vs mesh width");
  add_common(fem, fem_opts);
  CLI::App* repro =
      app.add_subcommand("reproduce-paper", "full experiment preset");
  add_common(repro, repro_opts);
  repro->add_flag("--paper-scale", paper_scale,
                  "257x257 mesh and full reference budgets");

  double ar_delta = 0.5, ar_amin = 1.0, ar_amax = 1.0, ar_frac = 0.5;
  int ar_d = 2, ar_ns = 6;
  bool ar_json = false;
  std::string ar_out;
  CLI::App* ar = app.add_subcommand("analyze-region",
                                    "analyticity constants and rate parameters");
  ar->add_option("--delta", ar_delta, "invertibility margin delta_tilde")
      ->required();
  ar->add_option("--d", ar_d, "spatial dimension");
  ar->add_option("--a-min", ar_amin, "diffusion lower bound");
  ar->add_option("--a-max", ar_amax, "diffusion upper bound");
  ar->add_option("--n-s", ar_ns, "retained stochastic dimensions");
  ar->add_option("--beta-frac", ar_frac, "beta as a fraction of beta_max");
  ar->add_flag("--json", ar_json, "print JSON instead of aligned text");
  ar->add_option("--out", ar_out, "directory for analyticity.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(resolve_config(solve_opts));
    if (sg->parsed()) return run_sg_study(resolve_config(sg_opts));
    if (tr->parsed()) return run_truncation_study(resolve_config(tr_opts));
    if (fem->parsed()) return run_fem_study(resolve_config(fem_opts));
    if (repro->parsed())
      return run_reproduce(resolve_config(repro_opts), paper_scale);
    if (ar->parsed())
      return run_analyze_region(ar_delta, ar_d, ar_amin, ar_amax, ar_ns,
                                ar_frac, ar_json, ar_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
