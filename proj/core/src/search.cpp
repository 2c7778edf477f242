#include "selbayes/search.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "selbayes/rng.hpp"
#include "selbayes/transform.hpp"

namespace selbayes {

void SearchConstraints::validate(const NetworkStructure& structure) const {
  std::set<std::pair<int, int>> req, forb;
  for (const auto& [p, c] : required_edges) {
    req.insert({structure.require(p), structure.require(c)});
  }
  for (const auto& [p, c] : forbidden_edges) {
    forb.insert({structure.require(p), structure.require(c)});
  }
  for (const auto& e : req) {
    if (forb.count(e)) {
      fail(ErrorKind::Precondition,
           "edge " + structure.variable(e.first).name + " -> " +
               structure.variable(e.second).name +
               " is both required and forbidden");
    }
  }
  // Required edges must be acyclic among themselves.
  std::vector<std::pair<std::string, std::string>> edges = required_edges;
  NetworkStructure probe(structure.variables(), edges);  // throws on a cycle
  if (max_parents < 0) {
    fail(ErrorKind::Precondition, "max_parents must be nonnegative");
  }
}

namespace {

struct SearchSpace {
  const SelectionProblem* base = nullptr;
  const SearchConstraints* constraints = nullptr;
  std::vector<int> domain_vars;
  int s = -1;
  std::set<std::pair<int, int>> required;
  std::set<std::pair<int, int>> forbidden;
  std::vector<std::pair<int, int>> universe;  // searchable directed edges
};

bool acyclic(const std::vector<std::vector<int>>& parents) {
  const int n = static_cast<int>(parents.size());
  std::vector<int> pending(n, 0);
  std::vector<std::vector<int>> children(n);
  for (int c = 0; c < n; ++c) {
    pending[c] = static_cast<int>(parents[c].size());
    for (int p : parents[c]) children[p].push_back(c);
  }
  std::vector<int> ready;
  for (int i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.push_back(i);
  }
  int placed = 0;
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    ++placed;
    for (int c : children[v]) {
      if (--pending[c] == 0) ready.push_back(c);
    }
  }
  return placed == n;
}

SearchSpace build_space(const SelectionProblem& base,
                        const SearchConstraints& constraints) {
  constraints.validate(base.structure);
  SearchSpace space;
  space.base = &base;
  space.constraints = &constraints;
  const auto& structure = base.structure;
  space.s = structure.selection_variable();
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (structure.variable(i).role == VarRole::Domain) {
      space.domain_vars.push_back(i);
    }
  }
  for (const auto& [p, c] : constraints.forbidden_edges) {
    space.forbidden.insert({structure.require(p), structure.require(c)});
  }
  for (int p : space.domain_vars) {
    for (int c : space.domain_vars) {
      if (p == c || space.forbidden.count({p, c})) continue;
      space.universe.emplace_back(p, c);
    }
    if (!constraints.fixed_s_parents && space.s >= 0 &&
        !space.forbidden.count({p, space.s})) {
      space.universe.emplace_back(p, space.s);
    }
  }
  std::sort(space.universe.begin(), space.universe.end());
  for (const auto& [pn, cn] : constraints.required_edges) {
    const std::pair<int, int> e{structure.require(pn), structure.require(cn)};
    if (!std::binary_search(space.universe.begin(), space.universe.end(), e)) {
      fail(ErrorKind::Precondition,
           "required edge " + pn + " -> " + cn + " is not searchable");
    }
    space.required.insert(e);
  }
  if (constraints.manipulation_constraints) {
    for (int i = 0; i < structure.num_variables(); ++i) {
      const auto& v = structure.variable(i);
      if (v.role != VarRole::Manipulation) continue;
      if (!structure.parents(i).empty()) {
        fail(ErrorKind::Precondition,
             "manipulation variable '" + v.name + "' must have no parents");
      }
      if (!structure.has_edge(i, structure.require(v.target))) {
        fail(ErrorKind::Precondition,
             "edge " + v.name + " -> " + v.target + " is required");
      }
    }
  }
  return space;
}

// Candidate parent lists: the base graph with the searchable positions
// replaced by `searched`.
std::vector<std::vector<int>> candidate_parents(
    const SearchSpace& space, const std::set<std::pair<int, int>>& searched) {
  const auto& structure = space.base->structure;
  std::vector<std::vector<int>> parents;
  parents.reserve(structure.num_variables());
  std::vector<bool> domain_mask(structure.num_variables(), false);
  for (int d : space.domain_vars) domain_mask[d] = true;
  for (int c = 0; c < structure.num_variables(); ++c) {
    std::vector<int> ps;
    const bool searched_into =
        domain_mask[c] ||
        (c == space.s && !space.constraints->fixed_s_parents);
    for (int p : structure.parents(c)) {
      if (searched_into && domain_mask[p]) continue;  // replaced below
      ps.push_back(p);
    }
    parents.push_back(std::move(ps));
  }
  for (const auto& [p, c] : searched) parents[c].push_back(p);
  for (auto& ps : parents) std::sort(ps.begin(), ps.end());
  return parents;
}

bool within_max_parents(const SearchSpace& space,
                        const std::vector<std::vector<int>>& parents) {
  for (int d : space.domain_vars) {
    if (static_cast<int>(parents[d].size()) > space.constraints->max_parents) {
      return false;
    }
  }
  if (space.s >= 0 && !space.constraints->fixed_s_parents &&
      static_cast<int>(parents[space.s].size()) >
          space.constraints->max_parents) {
    return false;
  }
  return true;
}

bool admissible_edges(const SearchSpace& space,
                      const std::set<std::pair<int, int>>& searched) {
  for (const auto& e : space.required) {
    if (!searched.count(e)) return false;
  }
  for (const auto& e : searched) {
    if (space.forbidden.count(e)) return false;
  }
  const auto parents = candidate_parents(space, searched);
  return within_max_parents(space, parents) && acyclic(parents);
}

std::set<std::pair<int, int>> searched_edges_of(
    const SearchSpace& space, const NetworkStructure& candidate) {
  std::set<std::pair<int, int>> searched;
  for (const auto& e : space.universe) {
    if (candidate.has_edge(e.first, e.second)) searched.insert(e);
  }
  return searched;
}

// Scores candidates with caching.  For point-mass populations without
// latent variables the score splits into out-of-A family terms plus one
// coupled A term, both cached; otherwise whole structures are cached.
class CachedScorer {
 public:
  CachedScorer(const SelectionProblem& base, const EnumerationBudget& budget)
      : base_(base), budget_(budget) {
    bool latents = false;
    for (const auto& v : base.structure.variables()) {
      latents = latents || v.latent;
    }
    decomposable_ = !latents && base.population.per_structure.empty() &&
                    base.population.m_f_prior.size() == 1;
    if (decomposable_) m_f_ = base.population.m_f_prior.front().first;
  }

  LogScore score(const NetworkStructure& candidate) {
    SelectionProblem problem = base_;
    problem.structure = candidate;
    if (!decomposable_) {
      const std::string key = candidate.canonical_encoding();
      auto it = whole_.find(key);
      if (it == whole_.end()) {
        it = whole_.emplace(key, marginal_likelihood(problem, Strategy::Auto,
                                                     budget_)).first;
      }
      return it->second;
    }

    const int s = candidate.selection_variable();
    std::vector<bool> in_a(candidate.num_variables(), false);
    in_a[s] = true;
    for (int v : ancestors(candidate, s)) in_a[v] = true;

    double out_sum = 0.0;
    for (int i = 0; i < candidate.num_variables(); ++i) {
      if (in_a[i]) continue;
      std::string key = candidate.variable(i).name + "<-";
      for (int p : candidate.parents(i)) {
        key += candidate.variable(p).name + ",";
      }
      auto it = families_.find(key);
      if (it == families_.end()) {
        it = families_.emplace(key, family_log_score(problem, i, m_f_)).first;
      }
      out_sum += it->second;
    }

    std::string a_key;
    for (int i = 0; i < candidate.num_variables(); ++i) {
      if (!in_a[i]) continue;
      a_key += candidate.variable(i).name + "<-";
      for (int p : candidate.parents(i)) {
        a_key += candidate.variable(p).name + ",";
      }
      a_key += ";";
    }
    auto it = coupled_.find(a_key);
    if (it == coupled_.end()) {
      const LogScore whole = marginal_likelihood(problem, Strategy::Auto, budget_);
      it = coupled_.emplace(a_key,
                            LogScore{whole.value - out_sum, whole.method})
               .first;
    }
    return {out_sum + it->second.value, it->second.method};
  }

 private:
  const SelectionProblem& base_;
  EnumerationBudget budget_;
  bool decomposable_ = false;
  std::int64_t m_f_ = 0;
  std::map<std::string, LogScore> whole_;
  std::map<std::string, double> families_;
  std::map<std::string, LogScore> coupled_;
};

void require_bde(const SelectionProblem& base) {
  if (base.priors.mode != PriorMode::Bde) {
    fail(ErrorKind::Precondition,
         "structure search requires bde priors (explicit tables are bound to "
         "one structure's parent sets)");
  }
}

}  // namespace

double log_structure_prior(const NetworkStructure& candidate,
                           const StructurePrior& prior,
                           const SearchConstraints& constraints,
                           const NetworkStructure& base) {
  SelectionProblem probe;
  probe.structure = base;
  SearchSpace space = build_space(probe, constraints);

  // Admissibility: searchable parts within constraints, everything else
  // exactly as in the base structure.
  const auto searched = searched_edges_of(space, candidate);
  if (!admissible_edges(space, searched)) return kNegInf;
  const auto expect = candidate_parents(space, searched);
  for (int i = 0; i < base.num_variables(); ++i) {
    if (candidate.parents(i) != expect[i]) return kNegInf;
  }

  if (prior.mode == StructurePrior::Mode::Uniform) return 0.0;
  double total = 0.0;
  for (const auto& [p, c] : space.universe) {
    const std::pair<std::string, std::string> name_pair{
        base.variable(p).name, base.variable(c).name};
    const auto it = prior.edge_probabilities.find(name_pair);
    const double pe = it == prior.edge_probabilities.end()
                          ? prior.default_probability
                          : it->second;
    if (!(pe > 0.0) || !(pe < 1.0)) {
      fail(ErrorKind::Precondition,
           "per-edge probability for " + name_pair.first + " -> " +
               name_pair.second + " must lie in (0,1)");
    }
    total += candidate.has_edge(p, c) ? std::log(pe) : std::log1p(-pe);
  }
  return total;
}

PosteriorResult exhaustive_posterior(const SelectionProblem& base,
                                     const StructurePrior& prior,
                                     const SearchConstraints& constraints,
                                     const EnumerationBudget& budget) {
  base.validate();
  require_bde(base);
  SearchSpace space = build_space(base, constraints);
  if (space.domain_vars.size() > 4) {
    fail(ErrorKind::Precondition,
         "exhaustive posterior handles at most 4 domain variables; use the "
         "greedy mode");
  }

  // Unordered domain pairs, each absent / forward / backward.
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t a = 0; a < space.domain_vars.size(); ++a) {
    for (std::size_t b = a + 1; b < space.domain_vars.size(); ++b) {
      pairs.emplace_back(space.domain_vars[a], space.domain_vars[b]);
    }
  }
  std::vector<int> s_parent_pool;
  if (!constraints.fixed_s_parents && space.s >= 0) {
    s_parent_pool = space.domain_vars;
  }

  CachedScorer scorer(base, budget);
  std::vector<ScoredStructure> scored;
  std::vector<int> choice(pairs.size(), 0);
  while (true) {
    std::set<std::pair<int, int>> searched;
    bool valid = true;
    for (std::size_t i = 0; i < pairs.size() && valid; ++i) {
      const auto [u, v] = pairs[i];
      if (choice[i] == 1) {
        valid = !space.forbidden.count({u, v});
        searched.insert({u, v});
      } else if (choice[i] == 2) {
        valid = !space.forbidden.count({v, u});
        searched.insert({v, u});
      }
    }
    if (valid) {
      const std::uint64_t subsets = std::uint64_t{1} << s_parent_pool.size();
      for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        auto with_s = searched;
        bool s_ok = true;
        for (std::size_t b = 0; b < s_parent_pool.size(); ++b) {
          if (mask & (std::uint64_t{1} << b)) {
            const std::pair<int, int> e{s_parent_pool[b], space.s};
            if (space.forbidden.count(e)) {
              s_ok = false;
              break;
            }
            with_s.insert(e);
          }
        }
        if (!s_ok || !admissible_edges(space, with_s)) continue;
        NetworkStructure candidate =
            base.structure.with_parents(candidate_parents(space, with_s));
        ScoredStructure entry;
        const LogScore ml = scorer.score(candidate);
        entry.structure = std::move(candidate);
        entry.log_marginal_likelihood = ml.value;
        entry.method = ml.method;
        entry.log_structure_prior =
            log_structure_prior(entry.structure, prior, constraints,
                                base.structure);
        entry.log_unnormalized_posterior =
            entry.log_marginal_likelihood + entry.log_structure_prior;
        scored.push_back(std::move(entry));
      }
    }
    std::size_t pos = choice.size();
    while (pos > 0) {
      if (++choice[pos - 1] < 3) break;
      choice[pos - 1] = 0;
      --pos;
    }
    if (pos == 0) break;
  }
  if (scored.empty()) {
    fail(ErrorKind::Precondition, "no admissible structure under the constraints");
  }

  LogSumExp norm;
  std::sort(scored.begin(), scored.end(),
            [](const ScoredStructure& a, const ScoredStructure& b) {
              return a.structure.canonical_encoding() <
                     b.structure.canonical_encoding();
            });
  for (const auto& entry : scored) norm.add(entry.log_unnormalized_posterior);
  for (auto& entry : scored) {
    entry.posterior = std::exp(entry.log_unnormalized_posterior - norm.value());
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredStructure& a, const ScoredStructure& b) {
                     return a.log_unnormalized_posterior >
                            b.log_unnormalized_posterior;
                   });

  PosteriorResult result;
  for (const auto& [p, c] : space.universe) {
    double mass = 0.0;
    for (const auto& entry : scored) {
      if (entry.structure.has_edge(p, c)) mass += entry.posterior;
    }
    result.edge_posteriors.emplace_back(base.structure.variable(p).name,
                                        base.structure.variable(c).name, mass);
  }
  result.ranked = std::move(scored);
  return result;
}

GreedyResult greedy_search(const SelectionProblem& base,
                           const StructurePrior& prior,
                           const SearchConstraints& constraints, int restarts,
                           std::uint64_t seed,
                           const EnumerationBudget& budget) {
  base.validate();
  require_bde(base);
  if (restarts < 1) {
    fail(ErrorKind::Precondition, "greedy search needs at least one restart");
  }
  SearchSpace space = build_space(base, constraints);
  if (!admissible_edges(space, space.required)) {
    fail(ErrorKind::Precondition,
         "no admissible starting structure under the constraints");
  }

  CachedScorer scorer(base, budget);
  auto posterior_of = [&](const std::set<std::pair<int, int>>& searched,
                          NetworkStructure* out) -> double {
    NetworkStructure candidate =
        base.structure.with_parents(candidate_parents(space, searched));
    const LogScore ml = scorer.score(candidate);
    const double lp =
        log_structure_prior(candidate, prior, constraints, base.structure);
    if (out != nullptr) *out = std::move(candidate);
    return ml.value + lp;
  };

  Rng rng(seed);
  GreedyResult result;
  bool have_best = false;
  double best_score = kNegInf;
  std::string best_encoding;

  for (int restart = 0; restart < restarts; ++restart) {
    std::set<std::pair<int, int>> current = space.required;
    if (restart > 0) {
      // Random admissible start: optional edges follow a random topological
      // order, which keeps them acyclic; the combination with required
      // edges is re-checked and retried a bounded number of times.
      for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<int> order = space.domain_vars;
        rng.shuffle(order);
        std::vector<int> rank(base.structure.num_variables(), 0);
        for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = int(i);
        std::set<std::pair<int, int>> trial = space.required;
        for (const auto& e : space.universe) {
          const bool to_s = e.second == space.s;
          if (!to_s && rank[e.first] >= rank[e.second]) {
            rng.uniform01();  // keep the draw count independent of order
            continue;
          }
          if (rng.bernoulli(0.5)) trial.insert(e);
        }
        if (admissible_edges(space, trial)) {
          current = trial;
          break;
        }
      }
      if (!admissible_edges(space, current)) current = space.required;
    }

    NetworkStructure current_structure;
    double current_score = posterior_of(current, &current_structure);
    result.trace.push_back("restart " + std::to_string(restart) + ": start " +
                           current_structure.canonical_encoding() + " score " +
                           format_g12(current_score));

    while (true) {
      double step_best = current_score;
      std::set<std::pair<int, int>> step_edges;
      std::string step_desc;
      std::string step_encoding;

      auto consider = [&](std::set<std::pair<int, int>> next,
                          const std::string& desc) {
        if (!admissible_edges(space, next)) return;
        NetworkStructure candidate;
        const double score = posterior_of(next, &candidate);
        const std::string encoding = candidate.canonical_encoding();
        if (score > step_best ||
            (score == step_best && !step_desc.empty() &&
             encoding < step_encoding)) {
          step_best = score;
          step_edges = std::move(next);
          step_desc = desc;
          step_encoding = encoding;
        }
      };

      for (const auto& e : space.universe) {
        const std::string name = base.structure.variable(e.first).name +
                                 "->" + base.structure.variable(e.second).name;
        if (current.count(e)) {
          if (!space.required.count(e)) {
            auto del = current;
            del.erase(e);
            consider(std::move(del), "delete " + name);
            const std::pair<int, int> rev{e.second, e.first};
            if (std::binary_search(space.universe.begin(),
                                   space.universe.end(), rev)) {
              auto flipped = current;
              flipped.erase(e);
              flipped.insert(rev);
              consider(std::move(flipped), "reverse " + name);
            }
          }
        } else {
          auto add = current;
          add.insert(e);
          consider(std::move(add), "add " + name);
        }
      }
      if (step_desc.empty() || !(step_best > current_score)) break;
      current = std::move(step_edges);
      current_score = step_best;
      current_structure =
          base.structure.with_parents(candidate_parents(space, current));
      result.trace.push_back("restart " + std::to_string(restart) + ": " +
                             step_desc + " score " + format_g12(current_score));
    }

    const std::string encoding = current_structure.canonical_encoding();
    result.trace.push_back("restart " + std::to_string(restart) +
                           ": local optimum " + encoding + " score " +
                           format_g12(current_score));
    if (!have_best || current_score > best_score ||
        (current_score == best_score && encoding < best_encoding)) {
      have_best = true;
      best_score = current_score;
      best_encoding = encoding;
      const LogScore ml = scorer.score(current_structure);
      result.best.structure = current_structure;
      result.best.log_marginal_likelihood = ml.value;
      result.best.method = ml.method;
      result.best.log_structure_prior = log_structure_prior(
          current_structure, prior, constraints, base.structure);
      result.best.log_unnormalized_posterior =
          result.best.log_marginal_likelihood +
          result.best.log_structure_prior;
    }
  }
  return result;
}

}  // namespace selbayes
