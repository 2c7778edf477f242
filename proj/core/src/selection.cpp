#include "selbayes/selection.hpp"

#include <algorithm>
#include <cmath>

#include "score_table.hpp"
#include "selbayes/transform.hpp"

namespace selbayes {

void SelectionProblem::validate() const {
  if (structure.selection_variable() < 0) {
    fail(ErrorKind::Precondition,
         "selection problem requires a selection variable in the structure");
  }
  data.validate(structure);
  population.validate();
}

namespace {

bool checked_mul(std::uint64_t a, std::uint64_t b, std::uint64_t* out) {
  if (a != 0 && b > UINT64_MAX / a) return false;
  *out = a * b;
  return true;
}

// base^exp, false on overflow past 2^63.
bool checked_pow(std::uint64_t base, std::int64_t exp, std::uint64_t* out) {
  std::uint64_t result = 1;
  for (std::int64_t e = 0; e < exp; ++e) {
    if (!checked_mul(result, base, &result)) return false;
    if (result > (std::uint64_t{1} << 63)) return false;
  }
  *out = result;
  return true;
}

// C(m + t - 1, t - 1): number of count vectors over t configurations.
bool composition_count(std::int64_t m, std::uint64_t t, std::uint64_t* out) {
  // Product form of the binomial, guarded against overflow.
  long double value = 1.0L;
  for (std::uint64_t k = 1; k < t; ++k) {
    value *= static_cast<long double>(m + k) / static_cast<long double>(k);
    if (value > 2e18L) return false;
  }
  *out = static_cast<std::uint64_t>(value + 0.5L);
  return true;
}

void check_sampled_closure(const SelectionProblem& problem) {
  for (std::size_t r = 0; r < problem.data.rows.size(); ++r) {
    int observed = -1, parent = -1;
    if (!ancestrally_closed(problem.structure, problem.data.rows[r], &observed,
                            &parent)) {
      fail(ErrorKind::Precondition,
           "case " + std::to_string(r) + " observes '" +
               problem.structure.variable(observed).name +
               "' but not its parent '" +
               problem.structure.variable(parent).name +
               "'; general missingness is outside the closed-form path (use "
               "the latent strategy for latent variables)");
    }
  }
}

std::vector<int> declared_latents(const NetworkStructure& structure) {
  std::vector<int> latents;
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (structure.variable(i).latent) latents.push_back(i);
  }
  return latents;
}

// Hidden-variable scope of one unsampled case, its configuration count,
// and the per-configuration count-cell lists.
struct UnsampledScope {
  CaseAssignment pattern;
  std::vector<int> hidden;        // declaration order
  std::uint64_t num_configs = 1;  // product of hidden arities
  bool restrict_to_a = false;
  std::vector<bool> a_mask;

  // Precomputed cell lists when the configuration space is small.
  std::vector<std::vector<detail::Cell>> cells;
};

constexpr std::uint64_t kPrecomputeLimit = 8192;

// Cells of every fully observed family of `row`, optionally filtered to
// the A variables.
void collect_cells(const NetworkStructure& structure, const CaseAssignment& row,
                   const std::vector<bool>* a_only,
                   std::vector<detail::Cell>& out) {
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (row[i] == kMissing) continue;
    if (a_only != nullptr && !(*a_only)[i]) continue;
    bool closed = true;
    for (int p : structure.parents(i)) {
      if (row[p] == kMissing) {
        closed = false;
        break;
      }
    }
    if (!closed) continue;
    out.push_back({i, parent_config_index(structure, i, row), row[i]});
  }
}

UnsampledScope build_unsampled_scope(const SelectionProblem& problem,
                                     TermCountMode mode, bool a_cells_only) {
  const auto& structure = problem.structure;
  UnsampledScope scope;
  scope.pattern = unsampled_case_pattern(structure);
  scope.restrict_to_a = a_cells_only;

  const int s = structure.selection_variable();
  scope.a_mask.assign(structure.num_variables(), false);
  scope.a_mask[s] = true;
  for (int v : ancestors(structure, s)) scope.a_mask[v] = true;

  for (int v = 0; v < structure.num_variables(); ++v) {
    if (scope.pattern[v] != kMissing) continue;
    if (mode == TermCountMode::Ancestral && !scope.a_mask[v]) continue;
    scope.hidden.push_back(v);
    if (!checked_mul(scope.num_configs, structure.variable(v).arity(),
                     &scope.num_configs)) {
      fail(ErrorKind::Budget, "term count exceeds budget");
    }
  }

  // Observed values outside the summation scope must sit in ancestrally
  // closed positions, or the closed-form factorization does not apply.
  for (int v = 0; v < structure.num_variables(); ++v) {
    if (scope.pattern[v] == kMissing) continue;
    for (int p : structure.parents(v)) {
      const bool summed =
          scope.pattern[p] == kMissing &&
          (mode == TermCountMode::Full || scope.a_mask[p]);
      if (!summed && scope.pattern[p] == kMissing) {
        fail(ErrorKind::Precondition,
             "unsampled cases observe '" + structure.variable(v).name +
                 "' whose parent '" + structure.variable(p).name +
                 "' is neither observed nor summed over");
      }
    }
  }

  if (scope.num_configs <= kPrecomputeLimit) {
    scope.cells.resize(scope.num_configs);
    CaseAssignment row = scope.pattern;
    for (std::uint64_t t = 0; t < scope.num_configs; ++t) {
      std::uint64_t rest = t;
      for (std::size_t h = scope.hidden.size(); h-- > 0;) {
        const int v = scope.hidden[h];
        const int arity = structure.variable(v).arity();
        row[v] = static_cast<int>(rest % arity);
        rest /= arity;
      }
      collect_cells(structure, row,
                    a_cells_only ? &scope.a_mask : nullptr, scope.cells[t]);
    }
  }
  return scope;
}

// Adds the cells of configuration t (times `count`) to the current term.
void add_unsampled_config(const NetworkStructure& structure,
                          UnsampledScope& scope, detail::ScoreTable& table,
                          std::uint64_t t, std::int64_t count,
                          CaseAssignment& scratch,
                          std::vector<detail::Cell>& cell_scratch) {
  if (!scope.cells.empty()) {
    table.add_cells(scope.cells[t], count);
    return;
  }
  scratch = scope.pattern;
  std::uint64_t rest = t;
  for (std::size_t h = scope.hidden.size(); h-- > 0;) {
    const int v = scope.hidden[h];
    const int arity = structure.variable(v).arity();
    scratch[v] = static_cast<int>(rest % arity);
    rest /= arity;
  }
  cell_scratch.clear();
  collect_cells(structure, scratch,
                scope.restrict_to_a ? &scope.a_mask : nullptr, cell_scratch);
  table.add_cells(cell_scratch, count);
}

std::uint64_t require_terms_within_budget(std::uint64_t configs,
                                          std::int64_t m_f,
                                          const EnumerationBudget& budget) {
  std::uint64_t terms = 0;
  if (!checked_pow(configs, m_f, &terms)) {
    fail(ErrorKind::Budget, "term count exceeds budget");
  }
  if (terms > budget.max_terms) {
    fail(ErrorKind::Budget,
         "enumeration needs " + std::to_string(terms) +
             " terms; the budget allows " + std::to_string(budget.max_terms));
  }
  return terms;
}

LogScore enumerate_ordered(const SelectionProblem& problem, std::int64_t m_f,
                           const EnumerationBudget& budget, TermCountMode mode,
                           const std::string& tag) {
  problem.validate();
  if (m_f < 0) fail(ErrorKind::Precondition, "m_F must be nonnegative");
  check_sampled_closure(problem);
  const auto& structure = problem.structure;
  const FamilyPrior prior = problem.priors.assemble(structure, m_f);
  detail::ScoreTable table(prior, tally_counts(structure, problem.data));
  if (m_f == 0) return {table.base_score(), tag};

  UnsampledScope scope = build_unsampled_scope(problem, mode, false);
  require_terms_within_budget(scope.num_configs, m_f, budget);

  std::vector<std::uint64_t> digits(m_f, 0);
  CaseAssignment scratch;
  std::vector<detail::Cell> cell_scratch;
  LogSumExp acc;
  while (true) {
    table.begin_term();
    for (std::uint64_t d : digits) {
      add_unsampled_config(structure, scope, table, d, 1, scratch, cell_scratch);
    }
    acc.add(table.base_score() + table.term_delta());
    // Lexicographic odometer, rightmost digit fastest.
    std::size_t pos = digits.size();
    while (pos > 0) {
      if (++digits[pos - 1] < scope.num_configs) break;
      digits[pos - 1] = 0;
      --pos;
    }
    if (pos == 0) break;
  }
  return {acc.value(), tag};
}

// Lexicographic successor of a composition (fixed sum over fixed length).
bool next_composition(std::vector<std::int64_t>& c) {
  const std::size_t t = c.size();
  if (t <= 1) return false;
  if (c[t - 1] > 0) {
    ++c[t - 2];
    --c[t - 1];
    return true;
  }
  std::size_t j = t - 2;
  while (j >= 1 && c[j] == 0) --j;
  if (j < 1) return false;
  const std::int64_t r = c[j];
  c[j] = 0;
  ++c[j - 1];
  c[t - 1] = r - 1;
  return true;
}

}  // namespace

std::uint64_t term_count(const SelectionProblem& problem, TermCountMode mode,
                         std::int64_t m_f) {
  problem.validate();
  if (m_f < 0) fail(ErrorKind::Precondition, "m_F must be nonnegative");
  UnsampledScope scope = build_unsampled_scope(problem, mode, false);
  std::uint64_t terms = 0;
  if (!checked_pow(scope.num_configs, m_f, &terms)) {
    fail(ErrorKind::Budget, "term count exceeds budget");
  }
  return terms;
}

std::uint64_t term_count(const SelectionProblem& problem, TermCountMode mode) {
  return term_count(problem, mode, problem.population.point_value());
}

LogScore score_full_enumeration(const SelectionProblem& problem,
                                std::int64_t m_f,
                                const EnumerationBudget& budget) {
  return enumerate_ordered(problem, m_f, budget, TermCountMode::Full, "full");
}

LogScore score_ancestral_enumeration(const SelectionProblem& problem,
                                     std::int64_t m_f,
                                     const EnumerationBudget& budget) {
  return enumerate_ordered(problem, m_f, budget, TermCountMode::Ancestral,
                           "ancestral");
}

LogScore score_count_collapsed(const SelectionProblem& problem,
                               std::int64_t m_f,
                               const EnumerationBudget& budget) {
  problem.validate();
  if (m_f < 0) fail(ErrorKind::Precondition, "m_F must be nonnegative");
  check_sampled_closure(problem);
  const auto& structure = problem.structure;
  const FamilyPrior prior = problem.priors.assemble(structure, m_f);
  detail::ScoreTable table(prior, tally_counts(structure, problem.data));
  if (m_f == 0) return {table.base_score(), "collapsed"};

  UnsampledScope scope =
      build_unsampled_scope(problem, TermCountMode::Ancestral, false);
  std::uint64_t vectors = 0;
  if (!composition_count(m_f, scope.num_configs, &vectors)) {
    fail(ErrorKind::Budget, "term count exceeds budget");
  }
  if (vectors > budget.max_terms) {
    fail(ErrorKind::Budget,
         "count-collapsed sum needs " + std::to_string(vectors) +
             " terms; the budget allows " + std::to_string(budget.max_terms));
  }

  const double log_m_factorial = std::lgamma(static_cast<double>(m_f) + 1.0);
  std::vector<std::int64_t> counts(scope.num_configs, 0);
  counts.back() = m_f;
  CaseAssignment scratch;
  std::vector<detail::Cell> cell_scratch;
  LogSumExp acc;
  while (true) {
    table.begin_term();
    double log_multinomial = log_m_factorial;
    for (std::uint64_t t = 0; t < scope.num_configs; ++t) {
      if (counts[t] == 0) continue;
      add_unsampled_config(structure, scope, table, t, counts[t], scratch,
                           cell_scratch);
      log_multinomial -= std::lgamma(static_cast<double>(counts[t]) + 1.0);
    }
    acc.add(table.base_score() + table.term_delta() + log_multinomial);
    if (!next_composition(counts)) break;
  }
  return {acc.value(), "collapsed"};
}

LogScore score_with_latents(const SelectionProblem& problem,
                            const std::vector<int>& latent_vars,
                            std::int64_t m_f,
                            const EnumerationBudget& budget) {
  problem.validate();
  if (m_f < 0) fail(ErrorKind::Precondition, "m_F must be nonnegative");
  if (latent_vars.empty()) {
    return score_ancestral_enumeration(problem, m_f, budget);
  }
  const auto& structure = problem.structure;
  const int n = structure.num_variables();

  std::vector<bool> latent_mask(n, false);
  for (int v : latent_vars) {
    if (v < 0 || v >= n) {
      fail(ErrorKind::Precondition, "latent variable index out of range");
    }
    if (!structure.variable(v).latent) {
      fail(ErrorKind::Precondition, "variable '" + structure.variable(v).name +
                                        "' is not declared latent");
    }
    latent_mask[v] = true;
  }
  for (const auto& row : problem.data.rows) {
    for (int v : latent_vars) {
      if (row[v] != kMissing) {
        fail(ErrorKind::Precondition,
             "latent variable has data: '" + structure.variable(v).name + "'");
      }
    }
  }
  for (std::size_t r = 0; r < problem.data.rows.size(); ++r) {
    for (int i = 0; i < n; ++i) {
      if (!latent_mask[i] && problem.data.rows[r][i] == kMissing) {
        fail(ErrorKind::Precondition,
             "case " + std::to_string(r) + ": the latent path requires '" +
                 structure.variable(i).name +
                 "' to be observed (only latent variables may be missing)");
      }
    }
  }

  const FamilyPrior prior = problem.priors.assemble(structure, m_f);
  detail::ScoreTable table(prior, tally_counts(structure, problem.data));

  // Families whose counts depend on the latent completions.
  std::vector<int> latent_families;
  for (int i = 0; i < n; ++i) {
    bool touches = latent_mask[i];
    for (int p : structure.parents(i)) touches = touches || latent_mask[p];
    if (touches) latent_families.push_back(i);
  }

  std::uint64_t latent_configs = 1;
  for (int v : latent_vars) {
    if (!checked_mul(latent_configs, structure.variable(v).arity(),
                     &latent_configs)) {
      fail(ErrorKind::Budget, "term count exceeds budget");
    }
  }
  UnsampledScope scope =
      build_unsampled_scope(problem, TermCountMode::Ancestral, false);

  const std::int64_t m_t = problem.data.num_cases();
  std::uint64_t sampled_terms = 0, unsampled_terms = 0, terms = 0;
  if (!checked_pow(latent_configs, m_t, &sampled_terms) ||
      !checked_pow(scope.num_configs, m_f, &unsampled_terms) ||
      !checked_mul(sampled_terms, unsampled_terms, &terms)) {
    fail(ErrorKind::Budget, "term count exceeds budget");
  }
  if (terms > budget.max_terms) {
    fail(ErrorKind::Budget,
         "latent enumeration needs " + std::to_string(terms) +
             " terms; the budget allows " + std::to_string(budget.max_terms));
  }

  // Cell lists per (sampled case, latent configuration).
  std::vector<std::vector<std::vector<detail::Cell>>> case_cells(m_t);
  std::vector<int> ordered_latents = latent_vars;
  std::sort(ordered_latents.begin(), ordered_latents.end());
  for (std::int64_t r = 0; r < m_t; ++r) {
    case_cells[r].resize(latent_configs);
    CaseAssignment row = problem.data.rows[r];
    for (std::uint64_t l = 0; l < latent_configs; ++l) {
      std::uint64_t rest = l;
      for (std::size_t h = ordered_latents.size(); h-- > 0;) {
        const int v = ordered_latents[h];
        const int arity = structure.variable(v).arity();
        row[v] = static_cast<int>(rest % arity);
        rest /= arity;
      }
      auto& cells = case_cells[r][l];
      for (int i : latent_families) {
        cells.push_back({i, parent_config_index(structure, i, row), row[i]});
      }
    }
  }

  // One odometer over the sampled cases' latent digits followed by the
  // unsampled cases' ancestral digits, lexicographic throughout.
  std::vector<std::uint64_t> digits(m_t + m_f, 0);
  CaseAssignment scratch;
  std::vector<detail::Cell> cell_scratch;
  LogSumExp acc;
  while (true) {
    table.begin_term();
    for (std::int64_t r = 0; r < m_t; ++r) {
      table.add_cells(case_cells[r][digits[r]], 1);
    }
    for (std::int64_t u = 0; u < m_f; ++u) {
      add_unsampled_config(structure, scope, table, digits[m_t + u], 1,
                           scratch, cell_scratch);
    }
    acc.add(table.base_score() + table.term_delta());
    std::size_t pos = digits.size();
    while (pos > 0) {
      const std::uint64_t radix =
          pos <= static_cast<std::size_t>(m_t) ? latent_configs : scope.num_configs;
      if (++digits[pos - 1] < radix) break;
      digits[pos - 1] = 0;
      --pos;
    }
    if (pos == 0) break;
  }
  return {acc.value(), "latent"};
}

LogScore score_with_latents(const SelectionProblem& problem,
                            const std::vector<std::string>& latent_vars,
                            std::int64_t m_f,
                            const EnumerationBudget& budget) {
  std::vector<int> ids;
  for (const auto& name : latent_vars) {
    ids.push_back(problem.structure.require(name));
  }
  return score_with_latents(problem, ids, m_f, budget);
}

Strategy parse_strategy(std::string_view name) {
  if (name == "auto") return Strategy::Auto;
  if (name == "full") return Strategy::Full;
  if (name == "ancestral") return Strategy::Ancestral;
  if (name == "collapsed") return Strategy::Collapsed;
  if (name == "tree") return Strategy::Tree;
  if (name == "bic") return Strategy::Bic;
  fail(ErrorKind::Precondition, "unknown strategy '" + std::string(name) +
                                    "' (expected auto|full|ancestral|"
                                    "collapsed|tree|bic)");
}

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Auto: return "auto";
    case Strategy::Full: return "full";
    case Strategy::Ancestral: return "ancestral";
    case Strategy::Collapsed: return "collapsed";
    case Strategy::Tree: return "tree";
    case Strategy::Bic: return "bic";
  }
  return "?";
}

namespace {

bool ancestors_form_tree(const NetworkStructure& structure) {
  const int s = structure.selection_variable();
  if (structure.parents(s).size() > 1) return false;
  for (int v : ancestors(structure, s)) {
    if (structure.parents(v).size() > 1) return false;
  }
  return true;
}

bool all_cases_complete(const Dataset& data) {
  for (const auto& row : data.rows) {
    for (int v : row) {
      if (v == kMissing) return false;
    }
  }
  return true;
}

SelectionProblem with_point_population(const SelectionProblem& problem,
                                       std::int64_t m_f) {
  SelectionProblem copy = problem;
  copy.population = PopulationSpec::point(m_f);
  return copy;
}

LogScore score_single_m_f(const SelectionProblem& problem, std::int64_t m_f,
                          Strategy strategy, const EnumerationBudget& budget) {
  switch (strategy) {
    case Strategy::Full:
      return score_full_enumeration(problem, m_f, budget);
    case Strategy::Ancestral:
      return score_ancestral_enumeration(problem, m_f, budget);
    case Strategy::Collapsed:
      return score_count_collapsed(problem, m_f, budget);
    case Strategy::Tree:
      return tree_fastpath_score(with_point_population(problem, m_f), budget);
    case Strategy::Bic: {
      const BicScore bic = bic_heuristic_score(problem, m_f);
      return {bic.bic, "bic"};
    }
    case Strategy::Auto:
      break;
  }

  const auto latents = declared_latents(problem.structure);
  if (!latents.empty()) {
    return score_with_latents(problem, latents, m_f, budget);
  }
  const int s = problem.structure.selection_variable();
  if (s >= 0 && problem.structure.parents(s).empty()) {
    LogScore score = score_ancestral_enumeration(problem, m_f, budget);
    score.method = "direct";
    return score;
  }
  if (m_f == 0) {
    LogScore score = score_ancestral_enumeration(problem, 0, budget);
    score.method = "direct";
    return score;
  }
  if (problem.priors.mode == PriorMode::Bde &&
      ancestors_form_tree(problem.structure) &&
      all_cases_complete(problem.data)) {
    return tree_fastpath_score(with_point_population(problem, m_f), budget);
  }
  {
    UnsampledScope scope =
        build_unsampled_scope(problem, TermCountMode::Ancestral, false);
    std::uint64_t vectors = 0;
    if (composition_count(m_f, scope.num_configs, &vectors) &&
        vectors <= budget.max_terms) {
      return score_count_collapsed(problem, m_f, budget);
    }
    std::uint64_t terms = 0;
    if (checked_pow(scope.num_configs, m_f, &terms) &&
        terms <= budget.max_terms) {
      return score_ancestral_enumeration(problem, m_f, budget);
    }
  }
  {
    UnsampledScope scope =
        build_unsampled_scope(problem, TermCountMode::Full, false);
    std::uint64_t terms = 0;
    if (checked_pow(scope.num_configs, m_f, &terms) &&
        terms <= budget.max_terms) {
      return score_full_enumeration(problem, m_f, budget);
    }
  }
  fail(ErrorKind::Budget,
       "no exact method fits the term budget for m_F=" + std::to_string(m_f) +
           "; rerun with strategy bic for the heuristic approximation");
}

}  // namespace

LogScore score_population_mixture(const SelectionProblem& problem,
                                  const EnumerationBudget& budget,
                                  Strategy inner) {
  problem.validate();
  const MfTable& table = problem.population.table_for(problem.structure);
  if (table.size() == 1) {
    return score_single_m_f(problem, table.front().first, inner, budget);
  }
  LogSumExp acc;
  std::vector<std::string> tags;
  for (const auto& [m_f, prob] : table) {
    const LogScore component = score_single_m_f(problem, m_f, inner, budget);
    acc.add(std::log(prob) + component.value);
    tags.push_back(component.method);
  }
  return {acc.value(), "mixture[" + join(tags, ",") + "]"};
}

LogScore marginal_likelihood(const SelectionProblem& problem, Strategy strategy,
                             const EnumerationBudget& budget) {
  problem.validate();
  const MfTable& table = problem.population.table_for(problem.structure);
  if (table.size() > 1 && strategy == Strategy::Bic) {
    fail(ErrorKind::Precondition,
         "the bic strategy requires a point-mass m_F prior");
  }
  return score_population_mixture(problem, budget, strategy);
}

double family_log_score(const SelectionProblem& problem, int variable,
                        std::int64_t m_f) {
  const auto& structure = problem.structure;
  const FamilyPrior prior = problem.priors.assemble(structure, m_f);
  SufficientCounts counts = SufficientCounts::zeros(structure);
  std::vector<bool> mask(structure.num_variables(), false);
  mask[variable] = true;
  for (const auto& row : problem.data.rows) {
    counts.add_case(structure, row, &mask);
  }
  // Unsampled-case contributions to this family (e.g. manipulation
  // variables observed at "ne") are fixed counts.
  const CaseAssignment pattern = unsampled_case_pattern(structure);
  if (m_f > 0 && pattern[variable] != kMissing) {
    bool closed = true;
    for (int p : structure.parents(variable)) {
      closed = closed && pattern[p] != kMissing;
    }
    if (closed) {
      counts.n[variable][parent_config_index(structure, variable, pattern)]
              [pattern[variable]] += m_f;
    }
  }
  return log_ch_score(counts, prior).value;
}

double coupled_a_log_score(const SelectionProblem& problem, std::int64_t m_f,
                           const EnumerationBudget& budget) {
  problem.validate();
  if (m_f < 0) fail(ErrorKind::Precondition, "m_F must be nonnegative");
  check_sampled_closure(problem);
  const auto& structure = problem.structure;
  const FamilyPrior prior = problem.priors.assemble(structure, m_f);

  const int s = structure.selection_variable();
  std::vector<int> a_vars = ancestors(structure, s);
  a_vars.push_back(s);
  std::sort(a_vars.begin(), a_vars.end());
  detail::ScoreTable table(prior,
                           tally_counts(structure, problem.data, a_vars));
  if (m_f == 0) return table.base_score();

  UnsampledScope scope =
      build_unsampled_scope(problem, TermCountMode::Ancestral, true);
  std::uint64_t vectors = 0;
  if (!composition_count(m_f, scope.num_configs, &vectors) ||
      vectors > budget.max_terms) {
    fail(ErrorKind::Budget, "term count exceeds budget");
  }

  const double log_m_factorial = std::lgamma(static_cast<double>(m_f) + 1.0);
  std::vector<std::int64_t> counts(scope.num_configs, 0);
  counts.back() = m_f;
  CaseAssignment scratch;
  std::vector<detail::Cell> cell_scratch;
  LogSumExp acc;
  while (true) {
    table.begin_term();
    double log_multinomial = log_m_factorial;
    for (std::uint64_t t = 0; t < scope.num_configs; ++t) {
      if (counts[t] == 0) continue;
      add_unsampled_config(structure, scope, table, t, counts[t], scratch,
                           cell_scratch);
      log_multinomial -= std::lgamma(static_cast<double>(counts[t]) + 1.0);
    }
    acc.add(table.base_score() + table.term_delta() + log_multinomial);
    if (!next_composition(counts)) break;
  }
  return acc.value();
}

}  // namespace selbayes
