#include "selbayes/transform.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace selbayes {

namespace {

// Is there a directed path u -> ... -> v that does not use the direct
// edge u -> v?  Fills `path` (u..v) when found.
bool other_path(const NetworkStructure& structure, int u, int v,
                std::vector<int>* path) {
  const auto children = structure.children();
  std::vector<int> from(structure.num_variables(), -1);
  std::deque<int> frontier;
  for (int c : children[u]) {
    if (c == v) continue;  // skip the direct edge
    if (from[c] < 0) {
      from[c] = u;
      frontier.push_back(c);
    }
  }
  while (!frontier.empty()) {
    const int w = frontier.front();
    frontier.pop_front();
    if (w == v) {
      if (path != nullptr) {
        path->clear();
        for (int x = v; x != u; x = from[x]) path->push_back(x);
        path->push_back(u);
        std::reverse(path->begin(), path->end());
      }
      return true;
    }
    for (int c : children[w]) {
      if (from[c] < 0) {
        from[c] = w;
        frontier.push_back(c);
      }
    }
  }
  return false;
}

}  // namespace

NetworkStructure reverse_arc(const NetworkStructure& structure, int parent,
                             int child) {
  if (!structure.has_edge(parent, child)) {
    fail(ErrorKind::Precondition,
         "reverse_arc: no edge " + structure.variable(parent).name + " -> " +
             structure.variable(child).name);
  }
  std::vector<int> blocking;
  if (other_path(structure, parent, child, &blocking)) {
    std::vector<std::string> names;
    for (int v : blocking) names.push_back(structure.variable(v).name);
    fail(ErrorKind::Precondition,
         "reverse_arc: reversing " + structure.variable(parent).name + " -> " +
             structure.variable(child).name +
             " would close a cycle through " + join(names, " -> "));
  }

  std::vector<std::vector<int>> parents;
  parents.reserve(structure.num_variables());
  for (int i = 0; i < structure.num_variables(); ++i) {
    parents.push_back(structure.parents(i));
  }
  auto& child_parents = parents[child];
  child_parents.erase(
      std::find(child_parents.begin(), child_parents.end(), parent));
  auto add_unique = [](std::vector<int>& list, int v) {
    if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
  };
  // Each endpoint inherits the other's remaining parents.
  for (int p : child_parents) add_unique(parents[parent], p);
  for (int p : structure.parents(parent)) add_unique(child_parents, p);
  add_unique(parents[parent], child);
  return structure.with_parents(std::move(parents));
}

NetworkStructure reverse_arc(const NetworkStructure& structure,
                             const std::string& parent,
                             const std::string& child) {
  return reverse_arc(structure, structure.require(parent),
                     structure.require(child));
}

ReversalPlan make_s_root(const NetworkStructure& structure) {
  const int s = structure.selection_variable();
  if (s < 0) {
    fail(ErrorKind::Precondition,
         "make_s_root: the structure has no selection variable");
  }
  ReversalPlan plan;
  plan.tree_valid = structure.parents(s).size() <= 1;
  for (int v : ancestors(structure, s)) {
    plan.tree_valid = plan.tree_valid && structure.parents(v).size() <= 1;
  }

  NetworkStructure current = structure;
  auto record = [&](int p, int c) {
    plan.reversed_edges.emplace_back(current.variable(p).name,
                                     current.variable(c).name);
    current = reverse_arc(current, p, c);
  };

  if (plan.tree_valid) {
    // With every ancestor holding at most one parent, the ancestor set is
    // a single chain into S.  Flipping from the chain's far end keeps each
    // reversal a pure flip, so the result mirrors the chain.
    std::vector<int> chain{s};
    while (!current.parents(chain.back()).empty()) {
      chain.push_back(current.parents(chain.back()).front());
    }
    for (std::size_t i = chain.size(); i-- > 1;) {
      record(chain[i], chain[i - 1]);
    }
  } else {
    while (!current.parents(s).empty()) {
      int pick = -1;
      for (int p : current.parents(s)) {  // declaration order
        if (!other_path(current, p, s, nullptr)) {
          pick = p;
          break;
        }
      }
      // A latest-in-topological-order parent always qualifies, so a valid
      // pick exists on any DAG.
      record(pick, s);
    }
  }
  plan.result = current;
  return plan;
}

namespace {

// Adds m_F copies of the unsampled observation pattern to `counts`,
// requiring the pattern's observed set to be ancestrally closed in
// `structure` (it is whenever S and the manipulation variables are roots).
void add_unsampled_bulk(const NetworkStructure& structure,
                        SufficientCounts& counts, std::int64_t m_f) {
  const CaseAssignment pattern = unsampled_case_pattern(structure);
  int observed = -1, parent = -1;
  if (!ancestrally_closed(structure, pattern, &observed, &parent)) {
    fail(ErrorKind::Precondition,
         "unsampled cases observe '" + structure.variable(observed).name +
             "' whose parent '" + structure.variable(parent).name +
             "' is unobserved in the transformed structure");
  }
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (pattern[i] == kMissing) continue;
    counts.n[i][parent_config_index(structure, i, pattern)][pattern[i]] += m_f;
  }
}

}  // namespace

LogScore tree_fastpath_score(const SelectionProblem& problem,
                             const EnumerationBudget& /*budget*/) {
  problem.validate();
  if (problem.priors.mode != PriorMode::Bde) {
    fail(ErrorKind::Precondition,
         "fast path requires likelihood-equivalent priors (bde mode)");
  }
  const std::int64_t m_f = problem.population.point_value();
  ReversalPlan plan = make_s_root(problem.structure);
  if (!plan.tree_valid) {
    fail(ErrorKind::Precondition,
         "tree fast path requires S and its ancestors to form a tree");
  }
  const GeneratingNetwork p0 = problem.priors.bde_joint(problem.structure, m_f);
  const FamilyPrior prior =
      build_bde_prior(plan.result, BdeSpec{problem.priors.ess, p0});

  for (std::size_t r = 0; r < problem.data.rows.size(); ++r) {
    int observed = -1, parent = -1;
    if (!ancestrally_closed(plan.result, problem.data.rows[r], &observed,
                            &parent)) {
      fail(ErrorKind::Precondition,
           "case " + std::to_string(r) + " observes '" +
               plan.result.variable(observed).name + "' but not its parent '" +
               plan.result.variable(parent).name +
               "' in the transformed structure; the fast path needs cases "
               "closed under the reversal");
    }
  }
  SufficientCounts counts = tally_counts(plan.result, problem.data);
  add_unsampled_bulk(plan.result, counts, m_f);
  LogScore score = log_ch_score(counts, prior);
  score.method = "tree";
  return score;
}

BicScore bic_heuristic_score(const SelectionProblem& problem,
                             std::int64_t m_f) {
  problem.validate();
  if (m_f < 0) fail(ErrorKind::Precondition, "m_F must be nonnegative");
  for (std::size_t r = 0; r < problem.data.rows.size(); ++r) {
    for (int i = 0; i < problem.structure.num_variables(); ++i) {
      if (problem.data.rows[r][i] == kMissing) {
        fail(ErrorKind::Precondition,
             "bic heuristic requires fully observed sampled cases; case " +
                 std::to_string(r) + " is missing '" +
                 problem.structure.variable(i).name + "'");
      }
    }
  }

  ReversalPlan plan = make_s_root(problem.structure);
  SufficientCounts counts = tally_counts(plan.result, problem.data);
  add_unsampled_bulk(plan.result, counts, m_f);

  BicScore result;
  result.param_count = parameter_count(problem.structure);

  // Maximum-likelihood fit by relative frequencies; every observed set is
  // ancestrally closed in the S-rooted transform, so the closed-form fit
  // is the exact maximizer.
  double log_likelihood = 0.0;
  for (int i = 0; i < plan.result.num_variables(); ++i) {
    for (std::size_t j = 0; j < counts.n[i].size(); ++j) {
      std::int64_t row_total = 0;
      for (std::int64_t c : counts.n[i][j]) row_total += c;
      if (row_total == 0) {
        result.diagnostics.push_back(
            "variable '" + plan.result.variable(i).name +
            "': parent configuration " + std::to_string(j) +
            " has no observations; its ML row is undefined");
        continue;
      }
      for (std::int64_t c : counts.n[i][j]) {
        if (c == 0) continue;  // 0 * ln 0 = 0
        log_likelihood += static_cast<double>(c) *
                          std::log(static_cast<double>(c) /
                                   static_cast<double>(row_total));
      }
    }
  }
  result.log_likelihood = log_likelihood;

  const std::int64_t population = problem.data.num_cases() + m_f;
  if (population > 0) {
    result.bic = log_likelihood -
                 0.5 * static_cast<double>(result.param_count) *
                     std::log(static_cast<double>(population));
  } else {
    result.bic = log_likelihood;
    result.diagnostics.push_back("empty population; no BIC penalty applied");
  }
  return result;
}

}  // namespace selbayes
