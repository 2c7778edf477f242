#ifndef SELBAYES_SEARCH_HPP
#define SELBAYES_SEARCH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "selbayes/selection.hpp"

namespace selbayes {

// Hard constraints on the candidate space.  The search varies edges among
// domain variables (and, when fixed_s_parents is false, edges from domain
// variables into S).  Manipulation variables stay rooted with their
// target edge required while manipulation_constraints holds.
struct SearchConstraints {
  std::vector<std::pair<std::string, std::string>> required_edges;
  std::vector<std::pair<std::string, std::string>> forbidden_edges;
  bool fixed_s_parents = true;
  bool manipulation_constraints = true;
  int max_parents = 3;

  void validate(const NetworkStructure& structure) const;
};

// P(M | K) up to normalization: uniform over admissible DAGs, or a product
// of independent per-edge presence probabilities over the searchable edge
// universe.  Edges without an entry use default_probability.
struct StructurePrior {
  enum class Mode { Uniform, PerEdge };
  Mode mode = Mode::Uniform;
  std::map<std::pair<std::string, std::string>, double> edge_probabilities;
  double default_probability = 0.5;
};

struct ScoredStructure {
  NetworkStructure structure;
  double log_marginal_likelihood = 0.0;
  double log_structure_prior = 0.0;
  double log_unnormalized_posterior = 0.0;
  double posterior = 0.0;  // filled by exhaustive_posterior
  std::string method;
};

// Log prior of one candidate: 0 in uniform mode (normalized post hoc),
// the per-edge product otherwise; -inf (returned, not raised) when the
// candidate violates the constraints.
double log_structure_prior(const NetworkStructure& candidate,
                           const StructurePrior& prior,
                           const SearchConstraints& constraints,
                           const NetworkStructure& base);

struct PosteriorResult {
  std::vector<ScoredStructure> ranked;  // posterior descending, ties by encoding
  // Posterior probability of each searchable directed edge.
  std::vector<std::tuple<std::string, std::string, double>> edge_posteriors;
};

// Scores every admissible DAG over the domain variables (at most 4; use
// greedy_search beyond that), normalizes the posteriors, and accumulates
// per-edge posterior probabilities.  `base` supplies the variables, the
// fixed graph parts (S parents, manipulation edges), priors, data and
// population.
PosteriorResult exhaustive_posterior(const SelectionProblem& base,
                                     const StructurePrior& prior,
                                     const SearchConstraints& constraints,
                                     const EnumerationBudget& budget);

struct GreedyResult {
  ScoredStructure best;
  std::vector<std::string> trace;  // one line per restart start and accepted move
};

// Hill climbing with {add, delete, reverse} moves, best-improvement steps
// and seeded random restarts.  Deterministic given the seed.  Scores are
// cached using the out-of-A family decomposition when the population is a
// point mass.
GreedyResult greedy_search(const SelectionProblem& base,
                           const StructurePrior& prior,
                           const SearchConstraints& constraints, int restarts,
                           std::uint64_t seed, const EnumerationBudget& budget);

}  // namespace selbayes

#endif  // SELBAYES_SEARCH_HPP
