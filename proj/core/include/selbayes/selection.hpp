#ifndef SELBAYES_SELECTION_HPP
#define SELBAYES_SELECTION_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "selbayes/dataset.hpp"
#include "selbayes/priors.hpp"
#include "selbayes/scoring.hpp"

namespace selbayes {

// Cap on the number of summation terms an enumeration may visit.  The
// default matches the scale of a 2^20-term sum.
struct EnumerationBudget {
  std::uint64_t max_terms = std::uint64_t{1} << 20;
};

// A scoring problem under selection: a structure containing the selection
// variable S, priors, the sampled cases, and beliefs about how many cases
// went unsampled.  Unsampled cases are never materialized in `data`; each
// one is implied to observe only S (at its unsampled state) and any
// manipulation variables (at "ne").
struct SelectionProblem {
  NetworkStructure structure;
  PriorSpec priors;
  Dataset data;
  PopulationSpec population;

  void validate() const;
};

enum class TermCountMode { Full, Ancestral };

// Number of summation terms the enumeration visits for m_F unsampled
// cases: (product of the hidden variables' arities)^m_F, where the hidden
// set is every unobserved domain variable (full) or its restriction to
// the ancestors of S (ancestral).  Counts above 2^63 fail as exceeding
// any representable budget.
std::uint64_t term_count(const SelectionProblem& problem, TermCountMode mode,
                         std::int64_t m_f);
// Same, taking m_F from the problem's point-mass population.
std::uint64_t term_count(const SelectionProblem& problem, TermCountMode mode);

// Marginal likelihood by summing, over every joint completion of the
// unsampled cases' domain variables, the closed-form score of the fully
// completed population.  Completions are visited in lexicographic order.
LogScore score_full_enumeration(const SelectionProblem& problem,
                                std::int64_t m_f,
                                const EnumerationBudget& budget);

// Same sum restricted to the ancestors of S: for unsampled cases the
// variables outside {S} + ancestors(S) integrate to one, so only the
// ancestral completions are enumerated.  Agrees with the full sum exactly
// whenever both fit the budget.
LogScore score_ancestral_enumeration(const SelectionProblem& problem,
                                     std::int64_t m_f,
                                     const EnumerationBudget& budget);

// Exchangeability-collapsed form of the ancestral sum: unsampled cases
// are interchangeable, so ordered completions are grouped by the count
// vector of ancestral configurations and weighted by multinomial
// coefficients.  Exactly equal to the ordered enumeration.
LogScore score_count_collapsed(const SelectionProblem& problem,
                               std::int64_t m_f,
                               const EnumerationBudget& budget);

// Latent-variable extension: an additional inner sum over the latent
// variables' values in each sampled case, composed with the ancestral sum
// for the unsampled cases.  Reduces to score_ancestral_enumeration when
// `latent_vars` is empty.
LogScore score_with_latents(const SelectionProblem& problem,
                            const std::vector<int>& latent_vars,
                            std::int64_t m_f,
                            const EnumerationBudget& budget);
LogScore score_with_latents(const SelectionProblem& problem,
                            const std::vector<std::string>& latent_vars,
                            std::int64_t m_f,
                            const EnumerationBudget& budget);

enum class Strategy { Auto, Full, Ancestral, Collapsed, Tree, Bic };

Strategy parse_strategy(std::string_view name);
std::string to_string(Strategy strategy);

// Mixture over the m_F prior: log sum over candidates of
// P(m_F) * (score at m_F with the m_F-indexed selection prior).  Each
// component is scored with `inner` (auto picks the cheapest exact path
// per component).  A point mass reproduces the single-m_F score exactly.
LogScore score_population_mixture(const SelectionProblem& problem,
                                  const EnumerationBudget& budget,
                                  Strategy inner = Strategy::Auto);

// Top-level scorer.  `auto` picks the cheapest exact method whose
// preconditions hold: direct scoring when S is a root, the arc-reversal
// tree fast path under BDe priors, then the collapsed, ancestral and full
// enumerations as the budget allows; problems with declared latent
// variables take the latent path.  When no exact method fits the budget,
// the error suggests the bic strategy.  The returned method tag records
// the path taken.
LogScore marginal_likelihood(const SelectionProblem& problem,
                             Strategy strategy,
                             const EnumerationBudget& budget);

// Decomposition used by the search cache.  With A = {S} + ancestors(S),
// the total score splits into independent per-family terms for variables
// outside A plus one coupled term over the A families, which absorbs the
// unsampled-case sum.  family_log_score covers one out-of-A family
// (including any fixed unsampled-case counts it receives, such as
// manipulation variables observed at "ne"); coupled_a_log_score computes
// the coupled part with the collapsed enumeration.
double family_log_score(const SelectionProblem& problem, int variable,
                        std::int64_t m_f);
double coupled_a_log_score(const SelectionProblem& problem, std::int64_t m_f,
                           const EnumerationBudget& budget);

}  // namespace selbayes

#endif  // SELBAYES_SELECTION_HPP
