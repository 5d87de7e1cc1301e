#include "dmuq/sparse_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace dmuq {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNodeQuantum = 1e13;  // dedup resolution for node coordinates

// Gauss-Legendre rule on [-1,1], Newton iteration on P_n
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double t = std::cos(kPi * (k + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = t;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[k] = -t;
    x[n - 1 - k] = t;
    double wk = 2.0 / ((1 - t * t) * dp * dp);
    w[k] = wk;
    w[n - 1 - k] = wk;
  }
  if (n % 2 == 1) x[n / 2] = 0;
}

std::vector<double> barycentric_weights(const std::vector<double>& x) {
  const int m = static_cast<int>(x.size());
  std::vector<double> b(m);
  for (int k = 0; k < m; ++k) {
    double s = (k % 2 == 0) ? 1.0 : -1.0;
    b[k] = (k == 0 || k == m - 1) ? 0.5 * s : s;
  }
  return b;
}

// values of all Lagrange cardinals at t
void cardinals(const std::vector<double>& x, const std::vector<double>& bw,
               double t, std::vector<double>& out) {
  const int m = static_cast<int>(x.size());
  out.assign(m, 0.0);
  if (m == 1) {
    out[0] = 1;
    return;
  }
  for (int k = 0; k < m; ++k) {
    if (std::abs(t - x[k]) < 1e-14) {
      out[k] = 1;
      return;
    }
  }
  double denom = 0;
  for (int k = 0; k < m; ++k) {
    out[k] = bw[k] / (t - x[k]);
    denom += out[k];
  }
  for (int k = 0; k < m; ++k) out[k] /= denom;
}

int max_level(GridRule r, int w) {
  switch (r) {
    case GridRule::tensor:
    case GridRule::total_degree:
    case GridRule::smolyak:
      return w + 1;
    case GridRule::hyperbolic:
      return w + 1;
  }
  return w + 1;
}

// acc carries the running level sum (TD, SM) or product (HC); the per-rule
// cost is monotone in every coordinate, so a violated prefix can stop early
void enumerate_levels(GridRule r, int n, int w, MultiIndex& cur, long acc,
                      std::vector<MultiIndex>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int i = 1; i <= max_level(r, w); ++i) {
    long next = acc;
    if (r == GridRule::total_degree || r == GridRule::smolyak) {
      next = acc + i - 1;
      if (next > w) break;
    } else if (r == GridRule::hyperbolic) {
      next = acc * i;
      if (next > w + 1) break;
    }
    cur.push_back(i);
    enumerate_levels(r, n, w, cur, next, out);
    cur.pop_back();
  }
}

void enumerate_degrees(GridRule r, int n, int w, MultiIndex& cur,
                       std::vector<MultiIndex>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int p = 0;; ++p) {
    cur.push_back(p);
    const bool ok = exactness_member(r, cur, w);
    if (!ok) {
      cur.pop_back();
      break;
    }
    enumerate_degrees(r, n, w, cur, out);
    cur.pop_back();
  }
}

int sm_degree_cost(int p) {
  if (p == 0) return 0;
  if (p == 1) return 1;
  return std::bit_width(static_cast<unsigned>(p - 1));
}

std::int64_t quantize(double v) {
  return std::llround(v * kNodeQuantum);
}

// iterates a row-major odometer over dims, last dimension fastest
template <typename F>
void for_each_tensor_index(const std::vector<int>& dims, F&& f) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> k(n, 0);
  while (true) {
    f(k);
    int d = n - 1;
    while (d >= 0) {
      if (++k[d] < dims[d]) break;
      k[d] = 0;
      --d;
    }
    if (d < 0) break;
  }
}

}  // namespace

GridRule parse_rule(const std::string& name) {
  if (name == "TP") return GridRule::tensor;
  if (name == "TD") return GridRule::total_degree;
  if (name == "HC") return GridRule::hyperbolic;
  if (name == "SM") return GridRule::smolyak;
  throw std::invalid_argument("unknown grid rule: " + name);
}

const char* rule_name(GridRule r) {
  switch (r) {
    case GridRule::tensor: return "TP";
    case GridRule::total_degree: return "TD";
    case GridRule::hyperbolic: return "HC";
    case GridRule::smolyak: return "SM";
  }
  return "?";
}

int growth(GridRule r, int i) {
  if (i < 1) throw std::invalid_argument("level must be >= 1");
  if (r == GridRule::smolyak) return i == 1 ? 1 : (1 << (i - 1)) + 1;
  return i;
}

std::vector<double> cc_nodes(int m) {
  if (m < 1) throw std::invalid_argument("node count must be >= 1");
  if (m == 1) return {0.0};
  std::vector<double> x(m);
  for (int k = 0; k < m / 2; ++k) {
    double v = -std::cos(kPi * (static_cast<double>(k) / (m - 1)));
    x[k] = v;
    x[m - 1 - k] = -v;
  }
  if (m % 2 == 1) x[m / 2] = 0;
  x[0] = -1;
  x[m - 1] = 1;
  return x;
}

std::vector<double> cc_weights(int m) {
  const std::vector<double> x = cc_nodes(m);
  if (m == 1) return {1.0};
  const std::vector<double> bw = barycentric_weights(x);
  std::vector<double> gx, gw;
  gauss_legendre(m, gx, gw);
  std::vector<double> card, w(m, 0.0);
  for (int j = 0; j < m; ++j) {
    cardinals(x, bw, gx[j], card);
    for (int k = 0; k < m; ++k) w[k] += 0.5 * gw[j] * card[k];
  }
  for (int k = 0; k < m / 2; ++k) {
    const double avg = 0.5 * (w[k] + w[m - 1 - k]);
    w[k] = avg;
    w[m - 1 - k] = avg;
  }
  return w;
}

bool admissible(GridRule r, const MultiIndex& levels, int w) {
  switch (r) {
    case GridRule::tensor: {
      for (int i : levels)
        if (i - 1 > w) return false;
      return true;
    }
    case GridRule::total_degree:
    case GridRule::smolyak: {
      long s = 0;
      for (int i : levels) s += i - 1;
      return s <= w;
    }
    case GridRule::hyperbolic: {
      long p = 1;
      for (int i : levels) {
        p *= i;
        if (p > w + 1) return false;
      }
      return true;
    }
  }
  return false;
}

std::vector<MultiIndex> index_set(GridRule r, int n, int w) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (w < 0) throw std::invalid_argument("level must be >= 0");
  std::vector<MultiIndex> out;
  MultiIndex cur;
  cur.reserve(n);
  enumerate_levels(r, n, w, cur, r == GridRule::hyperbolic ? 1 : 0, out);
  return out;
}

std::vector<CombinationTerm> combination_coefficients(GridRule r, int n, int w) {
  // c(i) = sum over j in {0,1}^n with i+j admissible of (-1)^|j|; for the
  // separable rules this collapses to a function of the residual budget
  std::vector<long> by_budget;
  if (r == GridRule::total_degree || r == GridRule::smolyak) {
    by_budget.assign(w + 1, 0);
    for (int budget = 0; budget <= w; ++budget) {
      long c = 0, choose = 1;
      for (int k = 0; k <= std::min(budget, n); ++k) {
        c += (k % 2 == 0) ? choose : -choose;
        choose = choose * (n - k) / (k + 1);
      }
      by_budget[budget] = c;
    }
  }
  std::vector<CombinationTerm> out;
  for (MultiIndex& idx : index_set(r, n, w)) {
    long c = 0;
    if (r == GridRule::tensor) {
      c = 1;
      for (int i : idx)
        if (i != w + 1) {
          c = 0;
          break;
        }
    } else if (!by_budget.empty()) {
      long s = 0;
      for (int i : idx) s += i - 1;
      c = by_budget[w - s];
    } else {
      if (n > 24) throw std::invalid_argument("hyperbolic rule limited to 24 dims");
      MultiIndex shifted(n);
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        for (int d = 0; d < n; ++d) shifted[d] = idx[d] + ((mask >> d) & 1u);
        if (admissible(r, shifted, w))
          c += (std::popcount(mask) % 2 == 0) ? 1 : -1;
      }
    }
    if (c != 0) out.push_back({std::move(idx), static_cast<int>(c)});
  }
  return out;
}

bool exactness_member(GridRule r, const MultiIndex& p, int w) {
  switch (r) {
    case GridRule::tensor: {
      for (int d : p)
        if (d > w) return false;
      return true;
    }
    case GridRule::total_degree: {
      long s = 0;
      for (int d : p) s += d;
      return s <= w;
    }
    case GridRule::hyperbolic: {
      long prod = 1;
      for (int d : p) {
        prod *= d + 1;
        if (prod > w + 1) return false;
      }
      return true;
    }
    case GridRule::smolyak: {
      long s = 0;
      for (int d : p) s += sm_degree_cost(d);
      return s <= w;
    }
  }
  return false;
}

std::vector<MultiIndex> exactness_set(GridRule r, int n, int w) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  std::vector<MultiIndex> out;
  MultiIndex cur;
  cur.reserve(n);
  enumerate_degrees(r, n, w, cur, out);
  return out;
}

SparseGrid build_grid(GridRule r, int n, int w) {
  SparseGrid g;
  g.rule = r;
  g.n = n;
  g.w = w;
  g.terms = combination_coefficients(r, n, w);

  std::map<std::vector<std::int64_t>, int> seen;
  std::vector<std::vector<double>> raw_nodes;
  std::vector<double> raw_weights;
  g.term_nodes.resize(g.terms.size());

  std::vector<std::vector<double>> nodes1d, w1d;
  for (std::size_t t = 0; t < g.terms.size(); ++t) {
    const CombinationTerm& term = g.terms[t];
    const int c = term.coeff;
    std::vector<int> dims(n);
    nodes1d.assign(n, {});
    w1d.assign(n, {});
    for (int d = 0; d < n; ++d) {
      const int m = growth(r, term.levels[d]);
      dims[d] = m;
      nodes1d[d] = cc_nodes(m);
      w1d[d] = cc_weights(m);
    }
    std::vector<std::int64_t> key(n);
    std::vector<double> pt(n);
    for_each_tensor_index(dims, [&](const std::vector<int>& k) {
      double wt = c;
      for (int d = 0; d < n; ++d) {
        pt[d] = nodes1d[d][k[d]];
        key[d] = quantize(pt[d]);
        wt *= w1d[d][k[d]];
      }
      auto [it, inserted] = seen.try_emplace(key, static_cast<int>(raw_nodes.size()));
      if (inserted) {
        raw_nodes.push_back(pt);
        raw_weights.push_back(0.0);
      }
      raw_weights[it->second] += wt;
      g.term_nodes[t].push_back(it->second);
    });
  }

  // relabel nodes lexicographically; the map is already key-sorted
  std::vector<int> new_id(raw_nodes.size());
  int next = 0;
  for (const auto& [key, old_id] : seen) new_id[old_id] = next++;
  g.nodes.resize(raw_nodes.size());
  g.weights.assign(raw_nodes.size(), 0.0);
  for (std::size_t i = 0; i < raw_nodes.size(); ++i) {
    g.nodes[new_id[i]] = std::move(raw_nodes[i]);
    g.weights[new_id[i]] = raw_weights[i];
  }
  for (auto& ids : g.term_nodes)
    for (int& id : ids) id = new_id[id];
  return g;
}

double quadrature(const SparseGrid& g, std::span<const double> samples) {
  if (samples.size() != g.eta())
    throw std::invalid_argument("sample count does not match grid size");
  double s = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) s += g.weights[i] * samples[i];
  return s;
}

Moments moments(const SparseGrid& g, std::span<const double> samples) {
  Moments m;
  m.mean = quadrature(g, samples);
  double s2 = 0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    s2 += g.weights[i] * samples[i] * samples[i];
  m.variance = s2 - m.mean * m.mean;
  return m;
}

SparseInterpolant::SparseInterpolant(const SparseGrid& g, std::span<const double> samples)
    : grid_(&g), samples_(samples.begin(), samples.end()) {
  if (samples_.size() != g.eta())
    throw std::invalid_argument("sample count does not match grid size");
}

double SparseInterpolant::operator()(std::span<const double> y) const {
  const SparseGrid& g = *grid_;
  if (static_cast<int>(y.size()) != g.n)
    throw std::invalid_argument("point dimension does not match grid");
  double total = 0;
  std::vector<std::vector<double>> card(g.n);
  std::vector<int> dims(g.n);
  for (std::size_t t = 0; t < g.terms.size(); ++t) {
    const CombinationTerm& term = g.terms[t];
    for (int d = 0; d < g.n; ++d) {
      const int m = growth(g.rule, term.levels[d]);
      dims[d] = m;
      const std::vector<double> x = cc_nodes(m);
      cardinals(x, barycentric_weights(x), y[d], card[d]);
    }
    double acc = 0;
    std::size_t flat = 0;
    const std::vector<int>& ids = g.term_nodes[t];
    for_each_tensor_index(dims, [&](const std::vector<int>& k) {
      double prod = 1;
      for (int d = 0; d < g.n; ++d) prod *= card[d][k[d]];
      acc += prod * samples_[ids[flat++]];
    });
    total += term.coeff * acc;
  }
  return total;
}

void dump_grid(const SparseGrid& g, std::ostream& os) {
  std::vector<int> count(g.eta(), 0);
  for (const auto& ids : g.term_nodes)
    for (int id : ids) ++count[id];
  os << "# rule " << rule_name(g.rule) << " n " << g.n << " w " << g.w
     << " eta " << g.eta() << "\n";
  for (std::size_t i = 0; i < g.eta(); ++i) {
    for (double v : g.nodes[i]) os << v << " ";
    os << g.weights[i] << " " << count[i] << "\n";
  }
}

}  // namespace dmuq
