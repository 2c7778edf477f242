#include "selbayes/scoring.hpp"

#include <cmath>

namespace selbayes {

SufficientCounts SufficientCounts::zeros(const NetworkStructure& structure) {
  SufficientCounts counts;
  counts.n.resize(structure.num_variables());
  for (int i = 0; i < structure.num_variables(); ++i) {
    counts.n[i].assign(parent_config_count(structure, i),
                       std::vector<std::int64_t>(structure.variable(i).arity(), 0));
  }
  return counts;
}

void SufficientCounts::add_case(const NetworkStructure& structure,
                                const CaseAssignment& row,
                                const std::vector<bool>* scope_mask) {
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (scope_mask != nullptr && !(*scope_mask)[i]) continue;
    if (row[i] == kMissing) continue;
    bool family_observed = true;
    for (int p : structure.parents(i)) {
      if (row[p] == kMissing) {
        family_observed = false;
        break;
      }
    }
    if (!family_observed) continue;
    ++n[i][parent_config_index(structure, i, row)][row[i]];
  }
}

SufficientCounts tally_counts(const NetworkStructure& structure,
                              const Dataset& dataset) {
  SufficientCounts counts = SufficientCounts::zeros(structure);
  for (const auto& row : dataset.rows) counts.add_case(structure, row);
  return counts;
}

SufficientCounts tally_counts(const NetworkStructure& structure,
                              const Dataset& dataset,
                              const std::vector<int>& scope) {
  std::vector<bool> mask(structure.num_variables(), false);
  for (int i : scope) {
    if (i < 0 || i >= structure.num_variables()) {
      fail(ErrorKind::Precondition, "tally_counts: scope index out of range");
    }
    mask[i] = true;
  }
  SufficientCounts counts = SufficientCounts::zeros(structure);
  for (const auto& row : dataset.rows) counts.add_case(structure, row, &mask);
  return counts;
}

LogScore log_ch_score(const SufficientCounts& counts, const FamilyPrior& prior) {
  if (prior.alpha.size() != counts.n.size()) {
    fail(ErrorKind::Precondition,
         "log_ch_score: prior and counts cover different variable sets");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < counts.n.size(); ++i) {
    if (prior.alpha[i].size() != counts.n[i].size()) {
      fail(ErrorKind::Precondition,
           "log_ch_score: row count mismatch on variable " + std::to_string(i));
    }
    for (std::size_t j = 0; j < counts.n[i].size(); ++j) {
      const auto& nrow = counts.n[i][j];
      const auto& arow = prior.alpha[i][j];
      if (arow.size() != nrow.size()) {
        fail(ErrorKind::Precondition,
             "log_ch_score: state count mismatch on variable " +
                 std::to_string(i));
      }
      std::int64_t n_total = 0;
      for (std::int64_t c : nrow) n_total += c;
      if (n_total == 0) continue;  // empty product
      double a_total = 0.0;
      for (std::size_t k = 0; k < nrow.size(); ++k) {
        const double a = arow[k];
        if (!(a > 0.0) || !std::isfinite(a)) {
          fail(ErrorKind::Precondition,
               "log_ch_score: nonpositive alpha on variable " +
                   std::to_string(i));
        }
        a_total += a;
        if (nrow[k] > 0) {
          total += std::lgamma(a + static_cast<double>(nrow[k])) - std::lgamma(a);
        }
      }
      total += std::lgamma(a_total) -
               std::lgamma(a_total + static_cast<double>(n_total));
    }
  }
  return {total, "ch"};
}

LogScore score_ancestral(const NetworkStructure& structure,
                         const FamilyPrior& prior, const Dataset& dataset) {
  for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
    int observed = -1, parent = -1;
    if (!ancestrally_closed(structure, dataset.rows[r], &observed, &parent)) {
      fail(ErrorKind::Precondition,
           "case " + std::to_string(r) + " observes '" +
               structure.variable(observed).name + "' but not its parent '" +
               structure.variable(parent).name +
               "'; the observed set must be ancestrally closed");
    }
  }
  LogScore score = log_ch_score(tally_counts(structure, dataset), prior);
  score.method = "closed";
  return score;
}

}  // namespace selbayes
