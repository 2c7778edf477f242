#ifndef SELBAYES_SCORING_HPP
#define SELBAYES_SCORING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "selbayes/dataset.hpp"
#include "selbayes/graph.hpp"
#include "selbayes/priors.hpp"

namespace selbayes {

// Per-family counts N_ijk with the cpt/alpha table layout.  A case
// contributes to family i only when i and all of i's parents are observed
// in that case.
struct SufficientCounts {
  std::vector<std::vector<std::vector<std::int64_t>>> n;

  static SufficientCounts zeros(const NetworkStructure& structure);
  // Adds one case under the contribution rule above.  `scope_mask`, when
  // given, restricts which families are tallied.
  void add_case(const NetworkStructure& structure, const CaseAssignment& row,
                const std::vector<bool>* scope_mask = nullptr);
};

// A log marginal likelihood (natural log) plus a tag naming the
// computation path that produced it.
struct LogScore {
  double value = 0.0;
  std::string method;
};

SufficientCounts tally_counts(const NetworkStructure& structure,
                              const Dataset& dataset);
SufficientCounts tally_counts(const NetworkStructure& structure,
                              const Dataset& dataset,
                              const std::vector<int>& scope);

// Closed-form Dirichlet-multinomial marginal likelihood in log space:
// sum over families and parent configurations of
//   lnG(a_ij) - lnG(a_ij + N_ij) + sum_k [lnG(a_ijk + N_ijk) - lnG(a_ijk)]
// with a_ij and N_ij the row totals.
LogScore log_ch_score(const SufficientCounts& counts, const FamilyPrior& prior);

// Exact marginal likelihood for datasets in which every case's observed
// variable set is ancestrally closed: the families of unobserved
// downstream variables integrate to one, so the CH formula over the
// tallied counts is the full answer.  A case that is not closed fails,
// naming the case and the offending variable.
LogScore score_ancestral(const NetworkStructure& structure,
                         const FamilyPrior& prior, const Dataset& dataset);

}  // namespace selbayes

#endif  // SELBAYES_SCORING_HPP
