#ifndef SELBAYES_SIMULATE_HPP
#define SELBAYES_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "selbayes/dataset.hpp"
#include "selbayes/graph.hpp"

namespace selbayes {

// One equality test over a case's values; a quota predicate is the
// conjunction of its tests.
struct PredicateTest {
  std::string variable;
  std::string state;
  bool negated = false;
};

// Quota entry: assign `count` cases, drawn uniformly at random among the
// still-unassigned cases satisfying the predicate, the sampled state
// `state`.
struct QuotaEntry {
  std::string state;
  std::int64_t count = 0;
  std::vector<PredicateTest> tests;
};

// How the selection variable gets its values.  Mechanistic selection
// samples S per case from its conditional table; quota selection fills
// fixed per-state counts (the case-control design); composite applies its
// parts in order, earlier assignments taking precedence.  Cases left
// unassigned at the end receive the unsampled state.
struct SelectionMechanism {
  enum class Kind { Mechanistic, Quota, Composite };
  Kind kind = Kind::Mechanistic;
  std::vector<QuotaEntry> quotas;          // Kind::Quota
  std::vector<SelectionMechanism> parts;   // Kind::Composite

  std::string summary() const;
};

// Manipulation of one target via its Q variable: a fraction of the
// population is enrolled; enrolled cases draw Q from `assignment` (over
// the target's states); with probability `compliance` the target is set
// to the drawn value, otherwise it is resampled from its natural
// conditional table.  Non-enrolled cases keep Q = "ne".
struct ManipulationEntry {
  std::string variable;
  double fraction = 0.0;
  std::vector<double> assignment;
  double compliance = 1.0;
};

struct ManipulationDesign {
  std::vector<ManipulationEntry> entries;
};

// Complete generated cases over a structure's variables.  Before
// apply_selection the selection column may still be unassigned.
struct Population {
  NetworkStructure structure;
  std::vector<CaseAssignment> cases;

  std::int64_t count_state(int variable, int state) const;
  std::int64_t count_state(const std::string& variable,
                           const std::string& state) const;
};

// n i.i.d. cases sampled in topological order.  The selection variable is
// sampled inline only when it has children (its value is needed
// downstream); otherwise it is left for apply_selection.  Manipulation
// variables start at "ne".
Population forward_sample(const GeneratingNetwork& network, std::int64_t n,
                          std::uint64_t seed);

// Assigns the selection variable per `mechanism`.  Mechanistic selection
// reads S's conditional table from `network`.
Population apply_selection(const Population& population,
                           const GeneratingNetwork& network,
                           const SelectionMechanism& mechanism,
                           std::uint64_t seed);

Population apply_manipulation(const Population& population,
                              const GeneratingNetwork& network,
                              const ManipulationDesign& design,
                              std::uint64_t seed);

// Projection of a population into what is actually observed: sampled
// cases keep their values (latent variables blanked), unsampled cases are
// dropped and counted into a point-mass m_F, and the full population is
// kept as the ground-truth archive.
struct ProjectResult {
  Dataset dataset;
  PopulationSpec population_spec;
  Population archive;
};
ProjectResult project(const Population& population);

}  // namespace selbayes

#endif  // SELBAYES_SIMULATE_HPP
