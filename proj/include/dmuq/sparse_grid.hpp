#pragma once
// Isotropic sparse-grid collocation on [-1,1]^n: Clenshaw-Curtis knots, four
// admissibility rules, combination-technique weights, quadrature, interpolation.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dmuq {

enum class GridRule { tensor, total_degree, hyperbolic, smolyak };

GridRule parse_rule(const std::string& name);  // "TP", "TD", "HC", "SM"
const char* rule_name(GridRule r);

// knots of the 1d rule at level i >= 1; SM doubles, the others grow linearly
int growth(GridRule r, int i);

// Clenshaw-Curtis points on [-1,1], ascending; m = 1 gives {0}
std::vector<double> cc_nodes(int m);

// weights of the interpolatory rule, w_k = integral of the k-th Lagrange
// cardinal against the uniform density 1/2 on [-1,1]
std::vector<double> cc_weights(int m);

using MultiIndex = std::vector<int>;

// level indices are 1-based; w >= 0 is the sparse-grid level
bool admissible(GridRule r, const MultiIndex& levels, int w);
std::vector<MultiIndex> index_set(GridRule r, int n, int w);

struct CombinationTerm {
  MultiIndex levels;
  int coeff;
};
// combination-technique coefficients, zero-coefficient terms dropped
std::vector<CombinationTerm> combination_coefficients(GridRule r, int n, int w);

// multi-degrees p (0-based) reproduced exactly at level w
bool exactness_member(GridRule r, const MultiIndex& p, int w);
std::vector<MultiIndex> exactness_set(GridRule r, int n, int w);

struct SparseGrid {
  GridRule rule = GridRule::smolyak;
  int n = 0;
  int w = 0;
  std::vector<std::vector<double>> nodes;  // eta rows, lexicographic order
  std::vector<double> weights;             // aligned with nodes, sum to 1
  std::vector<CombinationTerm> terms;
  std::vector<std::vector<int>> term_nodes;  // per term, row-major tensor -> node row

  std::size_t eta() const { return nodes.size(); }
};

SparseGrid build_grid(GridRule r, int n, int w);

// samples[k] = f(nodes[k])
double quadrature(const SparseGrid& g, std::span<const double> samples);

struct Moments {
  double mean = 0;
  double variance = 0;
};
Moments moments(const SparseGrid& g, std::span<const double> samples);

class SparseInterpolant {
 public:
  SparseInterpolant(const SparseGrid& g, std::span<const double> samples);
  double operator()(std::span<const double> y) const;

 private:
  const SparseGrid* grid_;
  std::vector<double> samples_;
};

// node coordinates, weight and contributing-term count, one row per node
void dump_grid(const SparseGrid& g, std::ostream& os);

}  // namespace dmuq
