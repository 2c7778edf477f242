#ifndef SELBAYES_PRIORS_HPP
#define SELBAYES_PRIORS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selbayes/graph.hpp"

namespace selbayes {

// Dirichlet hyperparameters, one table per variable with the same layout
// as GeneratingNetwork::cpts: alpha[i][j][k] for parent configuration j
// and child state k.  A fragment (e.g. the selection family alone) leaves
// the other variables' tables empty.
struct FamilyPrior {
  std::vector<std::vector<std::vector<double>>> alpha;

  bool covers(int variable) const {
    return variable >= 0 && variable < static_cast<int>(alpha.size()) &&
           !alpha[variable].empty();
  }
};

// BDe construction inputs: an equivalent sample size and a prior joint
// distribution P0 given as a generating network over the same variables.
struct BdeSpec {
  double ess = 1.0;
  GeneratingNetwork prior_joint;
};

// One parent-configuration row of the selection-family prior: mean
// selection probabilities per S state, scaled by a per-row equivalent
// sample size.
struct SelectionPriorRow {
  double ess = 1.0;
  std::vector<double> means;
};

// Selection-family priors indexed by candidate m_F: the probability that
// a case is sampled depends on the population split, so each candidate
// number of unsampled cases carries its own table.  Rows follow the
// parent-configuration order of S in the model structure.
struct SelectionPriorSpec {
  std::map<std::int64_t, std::vector<SelectionPriorRow>> per_m_f;

  void validate() const;
  std::string covered_candidates() const;
};

// alpha_ijk = ess * P0(X_i = k, parents_i = j), with the P0 marginals
// computed by exact enumeration of the prior joint.
FamilyPrior build_bde_prior(const NetworkStructure& structure,
                            const BdeSpec& spec);

// Selection-family fragment for the given m_F: each row is its ESS times
// its means.  Unknown m_F fails, listing the covered candidates.
FamilyPrior build_selection_prior(const NetworkStructure& structure,
                                  const SelectionPriorSpec& spec,
                                  std::int64_t m_f);

// Non-throwing structural check; every violating cell is named.
struct PriorDiagnostics {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};
PriorDiagnostics validate_prior(const FamilyPrior& prior,
                                const NetworkStructure& structure);

// How a scoring problem obtains its per-family Dirichlet tables.
//
// bde mode derives every family (including S) from one joint P0, which
// gives likelihood equivalence across Markov-equivalent structures and is
// what the arc-reversal fast path requires.  When a SelectionPriorSpec is
// present its means become P0's conditional for S at the requested m_F.
// explicit mode uses user-supplied tables for the non-selection families
// and the SelectionPriorSpec for S.
enum class PriorMode { Bde, Explicit };

struct PriorSpec {
  PriorMode mode = PriorMode::Bde;

  // bde mode.  When prior_network is absent, P0 defaults to uniform: the
  // model structure with uniform conditional rows.
  double ess = 1.0;
  std::optional<GeneratingNetwork> prior_network;

  // explicit mode.
  std::optional<FamilyPrior> tables;

  // Either mode.
  std::optional<SelectionPriorSpec> selection;

  // The P0 joint in force for `structure` at m_F (bde mode only).  The
  // selection override requires P0's S parents to match the structure's.
  GeneratingNetwork bde_joint(const NetworkStructure& structure,
                              std::int64_t m_f) const;

  // Full per-family tables for scoring `structure` at the given m_F.
  FamilyPrior assemble(const NetworkStructure& structure,
                       std::int64_t m_f) const;
};

// Uniform conditional rows for every variable of `structure`.
GeneratingNetwork uniform_network(const NetworkStructure& structure);

}  // namespace selbayes

#endif  // SELBAYES_PRIORS_HPP
