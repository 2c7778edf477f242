// Shared builders and independent oracles for the test suites.  The
// oracles deliberately avoid the library's scoring path: scores are
// rebuilt from sequential predictive products and explicit enumeration so
// the closed-form and summation code has something honest to match.
#ifndef SELBAYES_TESTS_HELPERS_HPP
#define SELBAYES_TESTS_HELPERS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "selbayes/dataset.hpp"
#include "selbayes/graph.hpp"
#include "selbayes/priors.hpp"
#include "selbayes/rng.hpp"

namespace selbayes::testing {

inline VariableSpec binary(const std::string& name) {
  VariableSpec v;
  v.name = name;
  v.states = {"T", "F"};
  return v;
}

inline VariableSpec selection_tf(const std::string& name = "S") {
  VariableSpec v;
  v.name = name;
  v.role = VarRole::Selection;
  v.states = {"T", "F"};
  v.unsampled_state = 1;
  return v;
}

inline NetworkStructure chain_structure(
    const std::vector<std::string>& names) {
  std::vector<VariableSpec> vars;
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i < names.size(); ++i) {
    vars.push_back(binary(names[i]));
    if (i > 0) edges.push_back({names[i - 1], names[i]});
  }
  return NetworkStructure(vars, edges);
}

// --- Independent oracles -------------------------------------------------

// Ancestors by reverse reachability over an explicit edge list.
inline std::vector<int> oracle_ancestors(const NetworkStructure& structure,
                                         int node) {
  const auto edges = structure.edge_list();
  std::vector<int> frontier{node};
  std::vector<bool> hit(structure.num_variables(), false);
  while (!frontier.empty()) {
    const int v = frontier.back();
    frontier.pop_back();
    for (const auto& [p, c] : edges) {
      if (c == v && !hit[p]) {
        hit[p] = true;
        frontier.push_back(p);
      }
    }
  }
  std::vector<int> out;
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (hit[i]) out.push_back(i);
  }
  return out;
}

// Exact conditional by brute-force joint enumeration with an explicit
// product of table rows.
inline std::vector<double> oracle_conditional(const GeneratingNetwork& network,
                                              const CaseAssignment& evidence,
                                              int query) {
  const auto& structure = network.structure;
  const int n = structure.num_variables();
  std::vector<double> mass(structure.variable(query).arity(), 0.0);
  CaseAssignment row(n, 0);
  while (true) {
    bool compatible = true;
    for (int i = 0; i < n && compatible; ++i) {
      compatible = evidence[i] < 0 || evidence[i] == row[i];
    }
    if (compatible) {
      double p = 1.0;
      for (int i = 0; i < n; ++i) {
        int config = 0;
        for (int parent : structure.parents(i)) {
          config = config * structure.variable(parent).arity() + row[parent];
        }
        p *= network.cpts[i][config][row[i]];
      }
      mass[row[query]] += p;
    }
    int pos = n;
    while (pos > 0) {
      if (++row[pos - 1] < structure.variable(pos - 1).arity()) break;
      row[pos - 1] = 0;
      --pos;
    }
    if (pos == 0) break;
  }
  double total = 0.0;
  for (double m : mass) total += m;
  for (double& m : mass) m /= total;
  return mass;
}

// Sequential predictive probability of a dataset under Dirichlet family
// priors: cases processed in order, each contributing the product of its
// fully observed families' predictive terms, counts updated afterwards.
// No log-gamma anywhere.
class PrequentialOracle {
 public:
  PrequentialOracle(const NetworkStructure& structure,
                    const FamilyPrior& prior)
      : structure_(structure), prior_(prior) {
    counts_.resize(structure.num_variables());
    for (int i = 0; i < structure.num_variables(); ++i) {
      counts_[i].assign(parent_config_count(structure, i),
                        std::vector<std::int64_t>(structure.variable(i).arity(), 0));
    }
  }

  // Log predictive probability of one case; updates the running counts.
  double feed(const CaseAssignment& row) {
    double log_p = 0.0;
    for (int i = 0; i < structure_.num_variables(); ++i) {
      if (row[i] == kMissing) continue;
      bool family_observed = true;
      for (int p : structure_.parents(i)) {
        family_observed = family_observed && row[p] != kMissing;
      }
      if (!family_observed) continue;
      const int j = parent_config_index(structure_, i, row);
      double alpha_row = 0.0;
      std::int64_t n_row = 0;
      for (std::size_t k = 0; k < prior_.alpha[i][j].size(); ++k) {
        alpha_row += prior_.alpha[i][j][k];
        n_row += counts_[i][j][k];
      }
      log_p += std::log((prior_.alpha[i][j][row[i]] +
                         static_cast<double>(counts_[i][j][row[i]])) /
                        (alpha_row + static_cast<double>(n_row)));
      ++counts_[i][j][row[i]];
    }
    return log_p;
  }

  double feed_all(const std::vector<CaseAssignment>& rows) {
    double total = 0.0;
    for (const auto& row : rows) total += feed(row);
    return total;
  }

 private:
  const NetworkStructure& structure_;
  const FamilyPrior& prior_;
  std::vector<std::vector<std::vector<std::int64_t>>> counts_;
};

inline double oracle_log_score(const NetworkStructure& structure,
                               const FamilyPrior& prior,
                               const std::vector<CaseAssignment>& rows) {
  PrequentialOracle oracle(structure, prior);
  return oracle.feed_all(rows);
}

// The unsampled observation pattern, rebuilt by hand: S at its unsampled
// state, manipulation variables at "ne", everything else missing.
inline CaseAssignment oracle_unsampled_pattern(
    const NetworkStructure& structure) {
  CaseAssignment row(structure.num_variables(), kMissing);
  for (int i = 0; i < structure.num_variables(); ++i) {
    const auto& v = structure.variable(i);
    if (v.role == VarRole::Selection) row[i] = v.unsampled_state;
    if (v.role == VarRole::Manipulation) row[i] = v.state_index("ne");
  }
  return row;
}

// Brute-force selection-aware marginal likelihood: enumerate every joint
// completion of the unsampled cases over `hidden_vars`, accumulate the
// prequential probability of (sampled rows + completed unsampled rows) in
// extended precision, take the log at the end.
inline double oracle_selection_log_score(const NetworkStructure& structure,
                                         const FamilyPrior& prior,
                                         const std::vector<CaseAssignment>& sampled,
                                         const std::vector<int>& hidden_vars,
                                         std::int64_t m_f) {
  const CaseAssignment pattern = oracle_unsampled_pattern(structure);
  std::uint64_t configs = 1;
  for (int v : hidden_vars) configs *= structure.variable(v).arity();
  std::vector<std::uint64_t> digits(m_f, 0);
  long double total = 0.0L;
  while (true) {
    std::vector<CaseAssignment> rows = sampled;
    for (std::int64_t u = 0; u < m_f; ++u) {
      CaseAssignment row = pattern;
      std::uint64_t rest = digits[u];
      for (std::size_t h = hidden_vars.size(); h-- > 0;) {
        const int v = hidden_vars[h];
        row[v] = static_cast<int>(rest % structure.variable(v).arity());
        rest /= structure.variable(v).arity();
      }
      rows.push_back(std::move(row));
    }
    total += expl(static_cast<long double>(
        oracle_log_score(structure, prior, rows)));
    if (m_f == 0) break;
    std::size_t pos = digits.size();
    while (pos > 0) {
      if (++digits[pos - 1] < configs) break;
      digits[pos - 1] = 0;
      --pos;
    }
    if (pos == 0) break;
  }
  return static_cast<double>(logl(total));
}

// --- Random instance generators ------------------------------------------

inline FamilyPrior random_explicit_prior(const NetworkStructure& structure,
                                         Rng& rng, double lo = 0.5,
                                         double hi = 2.0) {
  FamilyPrior prior;
  prior.alpha.resize(structure.num_variables());
  for (int i = 0; i < structure.num_variables(); ++i) {
    prior.alpha[i].resize(parent_config_count(structure, i));
    for (auto& row : prior.alpha[i]) {
      row.resize(structure.variable(i).arity());
      for (double& a : row) a = lo + (hi - lo) * rng.uniform01();
    }
  }
  return prior;
}

inline GeneratingNetwork random_cpts(const NetworkStructure& structure,
                                     Rng& rng) {
  GeneratingNetwork net;
  net.structure = structure;
  net.cpts.resize(structure.num_variables());
  for (int i = 0; i < structure.num_variables(); ++i) {
    net.cpts[i].resize(parent_config_count(structure, i));
    for (auto& row : net.cpts[i]) {
      row.resize(structure.variable(i).arity());
      double sum = 0.0;
      for (double& p : row) {
        p = 0.05 + rng.uniform01();
        sum += p;
      }
      for (double& p : row) p /= sum;
    }
  }
  return net;
}

// Random DAG over `names` (binary domain variables): each unordered pair
// gets an edge with probability `density`, oriented low-to-high in a
// random permutation.
inline NetworkStructure random_domain_dag(const std::vector<std::string>& names,
                                          Rng& rng, double density = 0.5) {
  std::vector<int> order(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) order[i] = static_cast<int>(i);
  rng.shuffle(order);
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      if (!rng.bernoulli(density)) continue;
      std::size_t pa = a, pb = b;
      std::size_t ra = 0, rb = 0;
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] == static_cast<int>(a)) ra = i;
        if (order[i] == static_cast<int>(b)) rb = i;
      }
      if (ra > rb) std::swap(pa, pb);
      edges.push_back({names[pa], names[pb]});
    }
  }
  std::vector<VariableSpec> vars;
  for (const auto& name : names) vars.push_back(binary(name));
  return NetworkStructure(vars, edges);
}

// --- Statistics helpers for the selection-bias checks --------------------

inline double pearson_correlation(const std::vector<int>& x,
                                  const std::vector<int>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += static_cast<double>(x[i]) * y[i];
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  return cov / std::sqrt(vx * vy);
}

// G-test of independence on a 2x2 table; returns the p-value for df=1.
inline double g_test_p_value(const std::array<std::array<double, 2>, 2>& table) {
  double total = 0, row[2] = {0, 0}, col[2] = {0, 0};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      total += table[a][b];
      row[a] += table[a][b];
      col[b] += table[a][b];
    }
  }
  double g = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double observed = table[a][b];
      if (observed <= 0) continue;
      const double expected = row[a] * col[b] / total;
      g += 2.0 * observed * std::log(observed / expected);
    }
  }
  return std::erfc(std::sqrt(g / 2.0));  // chi-square survival, df = 1
}

}  // namespace selbayes::testing

#endif  // SELBAYES_TESTS_HELPERS_HPP
