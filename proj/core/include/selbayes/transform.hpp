#ifndef SELBAYES_TRANSFORM_HPP
#define SELBAYES_TRANSFORM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "selbayes/selection.hpp"

namespace selbayes {

// Result of make_s_root: the reversal sequence, the transformed structure,
// and whether S's ancestor set formed a tree in the original (each node in
// {S} + ancestors(S) had at most one parent), in which case the transform
// is a pure mirror and preserves Markov equivalence.
struct ReversalPlan {
  std::vector<std::pair<std::string, std::string>> reversed_edges;
  NetworkStructure result;
  bool tree_valid = false;
};

// Standard arc reversal of (parent -> child): the edge flips and each
// endpoint inherits the other's remaining parents, so the represented
// family of joints is preserved.  Fails, naming a blocking path, when
// another directed path from parent to child would close a cycle.
NetworkStructure reverse_arc(const NetworkStructure& structure,
                             const std::string& parent,
                             const std::string& child);
NetworkStructure reverse_arc(const NetworkStructure& structure, int parent,
                             int child);

// Reverses arcs away from S until S is a root.  When S's ancestors form a
// tree the plan mirrors the ancestor path with pure flips (no inherited
// parents); otherwise arcs into S are reversed repeatedly, picking at each
// step the first-declared parent whose reversal keeps the graph acyclic,
// which may add parents elsewhere.
ReversalPlan make_s_root(const NetworkStructure& structure);

// Scores the problem through the S-rooted transform: BDe priors are
// rebuilt for the transformed structure from the same (P0, ess), sampled
// cases are scored in closed form, and the unsampled cases contribute
// only selection-family factors.  By likelihood equivalence this equals
// the ancestral enumeration on the original structure.  Requires BDe-mode
// priors, a tree-valid ancestor set, and a point-mass m_F.
LogScore tree_fastpath_score(const SelectionProblem& problem,
                             const EnumerationBudget& budget);

// The BIC approximation for non-tree ancestor sets: maximum-likelihood
// CPTs are fitted to the S-rooted transform M2 by relative frequencies,
// while the parameter count is the ORIGINAL structure's.
//   bic = log_likelihood - (param_count / 2) * ln(m_T + m_F)
// Parent configurations with no observations contribute nothing and are
// reported in diagnostics.
struct BicScore {
  double log_likelihood = 0.0;
  std::int64_t param_count = 0;
  double bic = 0.0;
  std::vector<std::string> diagnostics;
};
BicScore bic_heuristic_score(const SelectionProblem& problem, std::int64_t m_f);

}  // namespace selbayes

#endif  // SELBAYES_TRANSFORM_HPP
