#include "dmuq/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dmuq/artifacts.hpp"
#include "json.hpp"

namespace dmuq {

namespace {

using nlohmann::json;

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config key '") + key +
                                "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

  static const std::set<std::string> known = {
      "c",        "L",        "L_p",      "N",          "decay",
      "rule",     "qoi",      "solver",   "solver_tol", "mesh_n",
      "n_s",      "w",        "ref_n_s",  "ref_w",      "ref_mesh_n",
      "n_s_list", "mesh_list", "out",     "jobs",       "force_unsafe"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key))
      throw std::invalid_argument("unknown config key '" + key + "'");

  ExperimentConfig cfg;
  read_key(j, "c", cfg.c);
  read_key(j, "L", cfg.corr_len);
  read_key(j, "L_p", cfg.period);
  read_key(j, "N", cfg.n_terms);
  read_key(j, "decay", cfg.decay);
  if (j.contains("rule")) {
    std::string rule;
    read_key(j, "rule", rule);
    cfg.rule = parse_rule(rule);
  }
  read_key(j, "qoi", cfg.qoi);
  read_key(j, "solver", cfg.solver);
  read_key(j, "solver_tol", cfg.solver_tol);
  read_key(j, "mesh_n", cfg.mesh_n);
  read_key(j, "n_s", cfg.n_s);
  read_key(j, "w", cfg.w);
  read_key(j, "ref_n_s", cfg.ref_n_s);
  read_key(j, "ref_w", cfg.ref_w);
  read_key(j, "ref_mesh_n", cfg.ref_mesh_n);
  read_key(j, "n_s_list", cfg.n_s_list);
  read_key(j, "mesh_list", cfg.mesh_list);
  read_key(j, "out", cfg.out_dir);
  read_key(j, "jobs", cfg.jobs);
  read_key(j, "force_unsafe", cfg.force_unsafe);

  // defaults that exceed a user-chosen N shrink to fit; explicit values must
  // pass validation as given
  if (!j.contains("n_s")) cfg.n_s = std::min(cfg.n_s, cfg.n_terms);
  if (!j.contains("ref_n_s")) cfg.ref_n_s = std::min(cfg.ref_n_s, cfg.n_terms);
  if (!j.contains("n_s_list")) {
    std::erase_if(cfg.n_s_list, [&](int v) { return v > cfg.n_terms; });
    if (cfg.n_s_list.empty()) cfg.n_s_list = {cfg.n_terms};
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::string canonical_config(const ExperimentConfig& cfg) {
  json j;
  j["c"] = cfg.c;
  j["L"] = cfg.corr_len;
  j["L_p"] = cfg.period;
  j["N"] = cfg.n_terms;
  j["decay"] = cfg.decay;
  j["rule"] = rule_name(cfg.rule);
  j["qoi"] = cfg.qoi;
  j["solver"] = cfg.solver;
  j["solver_tol"] = cfg.solver_tol;
  j["mesh_n"] = cfg.mesh_n;
  j["n_s"] = cfg.n_s;
  j["w"] = cfg.w;
  j["ref_n_s"] = cfg.ref_n_s;
  j["ref_w"] = cfg.ref_w;
  j["ref_mesh_n"] = cfg.ref_mesh_n;
  j["n_s_list"] = cfg.n_s_list;
  j["mesh_list"] = cfg.mesh_list;
  j["out"] = cfg.out_dir;
  j["jobs"] = cfg.jobs;
  j["force_unsafe"] = cfg.force_unsafe;
  return j.dump();
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  return hex64(fnv1a(canonical_config(cfg)));
}

void validate(const ExperimentConfig& cfg) {
  const auto fail = [](const std::string& msg) {
    throw std::invalid_argument("invalid config: " + msg);
  };
  if (!(cfg.c >= 0)) fail("c must be >= 0");
  if (!(cfg.corr_len > 0)) fail("L must be > 0");
  if (cfg.period != 1.0) fail("only L_p = 1 is supported");
  if (cfg.n_terms < 1) fail("N must be >= 1");
  if (cfg.decay != "linear") fail("unknown decay law '" + cfg.decay + "'");
  if (cfg.qoi != "bump") fail("unknown qoi '" + cfg.qoi + "'");
  if (cfg.solver != "ldlt" && cfg.solver != "cg")
    fail("solver must be 'ldlt' or 'cg'");
  if (!(cfg.solver_tol > 0)) fail("solver_tol must be > 0");
  if (cfg.mesh_n < 3) fail("mesh_n must be >= 3");
  if (cfg.n_s < 1 || cfg.n_s > cfg.n_terms) fail("n_s must be in [1, N]");
  if (cfg.w < 0) fail("w must be >= 0");
  if (cfg.ref_n_s < 1 || cfg.ref_n_s > cfg.n_terms)
    fail("ref_n_s must be in [1, N]");
  if (cfg.ref_w < 0) fail("ref_w must be >= 0");
  if (cfg.ref_mesh_n < 3) fail("ref_mesh_n must be >= 3");
  if (cfg.n_s_list.empty()) fail("n_s_list must not be empty");
  for (const int n_s : cfg.n_s_list)
    if (n_s < 1 || n_s > cfg.n_terms) fail("n_s_list entries must be in [1, N]");
  if (cfg.mesh_list.empty()) fail("mesh_list must not be empty");
  for (const int n : cfg.mesh_list)
    if (n < 3) fail("mesh_list entries must be >= 3");
  if (cfg.jobs < 1) fail("jobs must be >= 1");
}

SquareTestcase make_testcase(const ExperimentConfig& cfg) {
  return build_square_testcase(cfg.c, cfg.corr_len, cfg.period, cfg.n_terms);
}

SolveOptions solve_options(const ExperimentConfig& cfg) {
  SolveOptions opt;
  opt.method = cfg.solver == "cg" ? SolveOptions::Method::cg
                                  : SolveOptions::Method::ldlt;
  opt.tol = cfg.solver_tol;
  return opt;
}

}  // namespace dmuq
