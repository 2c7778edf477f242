#ifndef SELBAYES_DATASET_HPP
#define SELBAYES_DATASET_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "selbayes/graph.hpp"

namespace selbayes {

// Missing value marker inside dataset rows.
constexpr int kMissing = -1;

// Ordered sampled cases.  Each row is aligned with a structure's variable
// declaration order; entries are state indices or kMissing.  The selection
// variable, when the structure has one, is never missing and never holds
// the unsampled state here: unsampled cases are implied by PopulationSpec
// instead of being materialized.
struct Dataset {
  std::vector<CaseAssignment> rows;

  std::int64_t num_cases() const { return static_cast<std::int64_t>(rows.size()); }
  // Checks row widths, state ranges, and the selection column rules.
  void validate(const NetworkStructure& structure) const;
};

using MfTable = std::vector<std::pair<std::int64_t, double>>;

// Belief about the number of unsampled cases.  A point mass is a
// single-entry table.  The table may optionally vary with the candidate
// structure (keyed by canonical encoding); by default it does not.
struct PopulationSpec {
  MfTable m_f_prior{{0, 1.0}};
  std::map<std::string, MfTable> per_structure;

  static PopulationSpec point(std::int64_t m_f);
  static PopulationSpec categorical(const MfTable& table);

  bool is_point() const;
  // The single m_F value; fails unless is_point().
  std::int64_t point_value() const;
  // The table in force for `structure` (per-structure override or default).
  const MfTable& table_for(const NetworkStructure& structure) const;
  void validate() const;
};

// Observed pattern of one unsampled case: the selection variable holds the
// unsampled state, manipulation variables hold "ne" (unsampled cases were
// never enrolled), everything else is missing.
CaseAssignment unsampled_case_pattern(const NetworkStructure& structure);

// True iff the set of observed variables of `row` is ancestrally closed:
// every parent of an observed variable is observed.  On failure returns
// the lowest-index offending (observed, unobserved-parent) pair through
// the out parameters.
bool ancestrally_closed(const NetworkStructure& structure,
                        const CaseAssignment& row, int* observed_var,
                        int* missing_parent);

}  // namespace selbayes

#endif  // SELBAYES_DATASET_HPP
