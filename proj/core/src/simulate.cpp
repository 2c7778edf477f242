#include "selbayes/simulate.hpp"

#include <algorithm>

#include "selbayes/rng.hpp"

namespace selbayes {

std::string SelectionMechanism::summary() const {
  switch (kind) {
    case Kind::Mechanistic:
      return "mechanistic";
    case Kind::Quota: {
      std::string out = "quota(";
      for (std::size_t i = 0; i < quotas.size(); ++i) {
        if (i > 0) out += ",";
        out += quotas[i].state + "=" + std::to_string(quotas[i].count);
      }
      return out + ")";
    }
    case Kind::Composite: {
      std::string out = "composite(";
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += ",";
        out += parts[i].summary();
      }
      return out + ")";
    }
  }
  return "?";
}

std::int64_t Population::count_state(int variable, int state) const {
  std::int64_t count = 0;
  for (const auto& row : cases) {
    if (row[variable] == state) ++count;
  }
  return count;
}

std::int64_t Population::count_state(const std::string& variable,
                                     const std::string& state) const {
  const int v = structure.require(variable);
  const int k = structure.variable(v).state_index(state);
  if (k < 0) {
    fail(ErrorKind::Precondition,
         "unknown state '" + state + "' for variable '" + variable + "'");
  }
  return count_state(v, k);
}

Population forward_sample(const GeneratingNetwork& network, std::int64_t n,
                          std::uint64_t seed) {
  if (n < 0) fail(ErrorKind::Precondition, "forward_sample: n must be >= 0");
  network.validate();
  const auto& structure = network.structure;
  const auto order = topological_order(structure);
  const auto children = structure.children();

  Population population;
  population.structure = structure;
  population.cases.reserve(n);
  Rng rng(seed);
  for (std::int64_t t = 0; t < n; ++t) {
    CaseAssignment row(structure.num_variables(), kMissing);
    for (int v : order) {
      const auto& spec = structure.variable(v);
      if (spec.role == VarRole::Manipulation) {
        row[v] = spec.state_index("ne");
        continue;
      }
      if (spec.role == VarRole::Selection) {
        if (children[v].empty()) continue;  // apply_selection's job
        if (network.cpts[v].empty()) {
          fail(ErrorKind::Precondition,
               "selection variable '" + spec.name +
                   "' has children but no conditional table to sample from");
        }
      }
      if (network.cpts[v].empty()) {
        fail(ErrorKind::Precondition,
             "variable '" + spec.name + "' has no conditional table");
      }
      row[v] = rng.categorical(
          network.cpts[v][parent_config_index(structure, v, row)]);
    }
    population.cases.push_back(std::move(row));
  }
  return population;
}

namespace {

bool predicate_holds(const NetworkStructure& structure,
                     const std::vector<PredicateTest>& tests,
                     const CaseAssignment& row) {
  for (const auto& test : tests) {
    const int v = structure.require(test.variable);
    const int k = structure.variable(v).state_index(test.state);
    if (k < 0) {
      fail(ErrorKind::Precondition, "unknown state '" + test.state +
                                        "' for variable '" + test.variable +
                                        "'");
    }
    const bool match = row[v] == k;
    if (match == test.negated) return false;
  }
  return true;
}

void apply_part(Population& population, const GeneratingNetwork& network,
                const SelectionMechanism& part, int s, Rng& rng) {
  const auto& structure = population.structure;
  switch (part.kind) {
    case SelectionMechanism::Kind::Mechanistic: {
      if (network.cpts[s].empty()) {
        fail(ErrorKind::Precondition,
             "mechanistic selection requires S's conditional table in the "
             "generating network");
      }
      for (auto& row : population.cases) {
        if (row[s] != kMissing) continue;
        row[s] = rng.categorical(
            network.cpts[s][parent_config_index(structure, s, row)]);
      }
      break;
    }
    case SelectionMechanism::Kind::Quota: {
      for (const auto& quota : part.quotas) {
        const int k = structure.variable(s).state_index(quota.state);
        if (k < 0) {
          fail(ErrorKind::Precondition,
               "quota names unknown selection state '" + quota.state + "'");
        }
        if (k == structure.variable(s).unsampled_state) {
          fail(ErrorKind::Precondition,
               "quota may not assign the unsampled state");
        }
        if (quota.count < 0) {
          fail(ErrorKind::Precondition, "quota counts must be nonnegative");
        }
        std::vector<std::int64_t> eligible;
        for (std::size_t r = 0; r < population.cases.size(); ++r) {
          if (population.cases[r][s] != kMissing) continue;
          if (predicate_holds(structure, quota.tests, population.cases[r])) {
            eligible.push_back(static_cast<std::int64_t>(r));
          }
        }
        if (static_cast<std::int64_t>(eligible.size()) < quota.count) {
          fail(ErrorKind::Precondition,
               "quota for state '" + quota.state + "' needs " +
                   std::to_string(quota.count) + " cases but only " +
                   std::to_string(eligible.size()) + " are eligible");
        }
        rng.shuffle(eligible);
        for (std::int64_t i = 0; i < quota.count; ++i) {
          population.cases[eligible[i]][s] = k;
        }
      }
      break;
    }
    case SelectionMechanism::Kind::Composite: {
      for (const auto& inner : part.parts) {
        apply_part(population, network, inner, s, rng);
      }
      break;
    }
  }
}

}  // namespace

namespace {

void require_matching_structures(const NetworkStructure& a,
                                 const NetworkStructure& b) {
  bool match = a.num_variables() == b.num_variables();
  for (int i = 0; match && i < a.num_variables(); ++i) {
    match = a.variable(i).name == b.variable(i).name &&
            a.variable(i).arity() == b.variable(i).arity();
  }
  if (!match) {
    fail(ErrorKind::Precondition,
         "population and generating network cover different variables");
  }
}

}  // namespace

Population apply_selection(const Population& population,
                           const GeneratingNetwork& network,
                           const SelectionMechanism& mechanism,
                           std::uint64_t seed) {
  require_matching_structures(population.structure, network.structure);
  Population result = population;
  const int s = result.structure.selection_variable();
  if (s < 0) {
    fail(ErrorKind::Precondition,
         "apply_selection: the structure has no selection variable");
  }
  Rng rng(seed);
  apply_part(result, network, mechanism, s, rng);
  const int unsampled = result.structure.variable(s).unsampled_state;
  for (auto& row : result.cases) {
    if (row[s] == kMissing) row[s] = unsampled;
  }
  return result;
}

Population apply_manipulation(const Population& population,
                              const GeneratingNetwork& network,
                              const ManipulationDesign& design,
                              std::uint64_t seed) {
  require_matching_structures(population.structure, network.structure);
  Population result = population;
  const auto& structure = result.structure;
  Rng rng(seed);
  for (const auto& entry : design.entries) {
    const int q = structure.require(entry.variable);
    const auto& qspec = structure.variable(q);
    if (qspec.role != VarRole::Manipulation) {
      fail(ErrorKind::Precondition,
           "'" + entry.variable + "' is not a manipulation variable");
    }
    const int target = structure.require(qspec.target);
    const int target_arity = structure.variable(target).arity();
    if (static_cast<int>(entry.assignment.size()) != target_arity) {
      fail(ErrorKind::Precondition,
           "assignment distribution for '" + entry.variable + "' must cover " +
               std::to_string(target_arity) + " states");
    }
    if (!(entry.fraction >= 0.0 && entry.fraction <= 1.0) ||
        !(entry.compliance >= 0.0 && entry.compliance <= 1.0)) {
      fail(ErrorKind::Precondition,
           "enrollment fraction and compliance must lie in [0,1]");
    }
    const int ne = qspec.state_index("ne");
    if (network.cpts[target].empty()) {
      fail(ErrorKind::Precondition,
           "manipulation target '" + qspec.target +
               "' has no conditional table to resample from");
    }
    for (auto& row : result.cases) {
      if (!rng.bernoulli(entry.fraction)) {
        row[q] = ne;
        continue;
      }
      const int assigned = rng.categorical(entry.assignment);
      row[q] = assigned;  // Q states 0..arity-1 mirror the target's
      if (rng.bernoulli(entry.compliance)) {
        row[target] = assigned;
      } else {
        row[target] = rng.categorical(
            network.cpts[target][parent_config_index(structure, target, row)]);
      }
    }
  }
  return result;
}

ProjectResult project(const Population& population) {
  const auto& structure = population.structure;
  const int s = structure.selection_variable();
  if (s < 0) {
    fail(ErrorKind::Precondition,
         "project: the structure has no selection variable");
  }
  const int unsampled = structure.variable(s).unsampled_state;
  ProjectResult result;
  result.archive = population;
  std::int64_t m_f = 0;
  for (std::size_t r = 0; r < population.cases.size(); ++r) {
    const auto& row = population.cases[r];
    if (row[s] == kMissing) {
      fail(ErrorKind::Precondition,
           "project: case " + std::to_string(r) + " has no selection value");
    }
    if (row[s] == unsampled) {
      ++m_f;
      continue;
    }
    CaseAssignment observed = row;
    for (int i = 0; i < structure.num_variables(); ++i) {
      if (structure.variable(i).latent) observed[i] = kMissing;
    }
    result.dataset.rows.push_back(std::move(observed));
  }
  result.population_spec = PopulationSpec::point(m_f);
  return result;
}

}  // namespace selbayes
