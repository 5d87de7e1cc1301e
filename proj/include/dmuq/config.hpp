#pragma once
// Experiment configuration: flat JSON keys, strict validation, and a stable
// fingerprint so identical configs map to identical artifacts.

#include <string>
#include <vector>

#include "dmuq/experiment.hpp"
#include "dmuq/fem.hpp"
#include "dmuq/sparse_grid.hpp"

namespace dmuq {

struct ExperimentConfig {
  double c = 0.1533;       // deformation amplitude
  double corr_len = 0.5;   // L
  double period = 1.0;     // L_p
  int n_terms = 15;        // N
  std::string decay = "linear";
  GridRule rule = GridRule::smolyak;
  std::string qoi = "bump";
  std::string solver = "ldlt";  // or "cg"
  double solver_tol = 1e-12;
  int mesh_n = 129;
  int n_s = 6;
  int w = 4;
  int ref_n_s = 10;
  int ref_w = 4;
  int ref_mesh_n = 129;
  std::vector<int> n_s_list = {2, 3, 4, 5, 6};
  std::vector<int> mesh_list = {9, 17, 33, 65};
  std::string out_dir = "out";
  int jobs = 1;
  bool force_unsafe = false;
};

// parses a JSON object; unknown keys and wrong types are errors naming the key
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// sorted-key single-line JSON echo of every field
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_fingerprint(const ExperimentConfig& cfg);  // 16 hex digits

void validate(const ExperimentConfig& cfg);

SquareTestcase make_testcase(const ExperimentConfig& cfg);
SolveOptions solve_options(const ExperimentConfig& cfg);

}  // namespace dmuq
