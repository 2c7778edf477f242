#include "selbayes/priors.hpp"

#include <cmath>

namespace selbayes {

void SelectionPriorSpec::validate() const {
  if (per_m_f.empty()) {
    fail(ErrorKind::Validation, "selection prior covers no m_F candidates");
  }
  for (const auto& [m_f, rows] : per_m_f) {
    if (m_f < 0) {
      fail(ErrorKind::Validation, "selection prior has a negative m_F");
    }
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto& row = rows[j];
      if (!(row.ess > 0.0) || !std::isfinite(row.ess)) {
        fail(ErrorKind::Validation,
             "selection prior row " + std::to_string(j) + " for m_F=" +
                 std::to_string(m_f) + " needs a positive finite ESS");
      }
      double sum = 0.0;
      for (double m : row.means) {
        if (!(m >= 0.0)) {
          fail(ErrorKind::Validation, "selection prior mean below 0");
        }
        sum += m;
      }
      if (std::fabs(sum - 1.0) > 1e-12) {
        fail(ErrorKind::Validation,
             "selection prior row " + std::to_string(j) + " for m_F=" +
                 std::to_string(m_f) + " means do not sum to 1");
      }
    }
  }
}

std::string SelectionPriorSpec::covered_candidates() const {
  std::string out;
  for (const auto& [m_f, rows] : per_m_f) {
    if (!out.empty()) out += ", ";
    out += std::to_string(m_f);
  }
  return out;
}

namespace {

void require_same_variables(const NetworkStructure& a,
                            const NetworkStructure& b,
                            const std::string& what) {
  if (a.num_variables() != b.num_variables()) {
    fail(ErrorKind::Precondition, what + ": variable sets differ");
  }
  for (int i = 0; i < a.num_variables(); ++i) {
    if (a.variable(i).name != b.variable(i).name ||
        a.variable(i).arity() != b.variable(i).arity()) {
      fail(ErrorKind::Precondition,
           what + ": variable '" + a.variable(i).name +
               "' differs between the structures");
    }
  }
}

}  // namespace

FamilyPrior build_bde_prior(const NetworkStructure& structure,
                            const BdeSpec& spec) {
  if (!(spec.ess > 0.0) || !std::isfinite(spec.ess)) {
    fail(ErrorKind::Precondition, "BDe prior needs a positive finite ESS");
  }
  const auto& p0 = spec.prior_joint;
  p0.validate();
  require_same_variables(structure, p0.structure, "build_bde_prior");

  const int n = structure.num_variables();
  std::uint64_t space = 1;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t arity = structure.variable(i).arity();
    if (space > kEnumerationCap / arity) {
      fail(ErrorKind::Budget,
           "BDe prior: joint state space exceeds the enumeration cap");
    }
    space *= arity;
  }

  FamilyPrior prior;
  prior.alpha.resize(n);
  for (int i = 0; i < n; ++i) {
    prior.alpha[i].assign(parent_config_count(structure, i),
                          std::vector<double>(structure.variable(i).arity(), 0.0));
  }

  // One pass over P0's joint accumulates every family's marginals.
  CaseAssignment row(n, 0);
  while (true) {
    const double p = joint_probability(p0, row);
    if (p > 0.0) {
      for (int i = 0; i < n; ++i) {
        prior.alpha[i][parent_config_index(structure, i, row)][row[i]] +=
            spec.ess * p;
      }
    }
    int pos = n;
    while (pos > 0) {
      if (++row[pos - 1] < structure.variable(pos - 1).arity()) break;
      row[pos - 1] = 0;
      --pos;
    }
    if (pos == 0) break;
  }

  for (int i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < prior.alpha[i].size(); ++j) {
      double row_mass = 0.0;
      for (double a : prior.alpha[i][j]) row_mass += a;
      if (row_mass <= 0.0) {
        fail(ErrorKind::Precondition,
             "BDe prior undefined for impossible configuration (variable '" +
                 structure.variable(i).name + "', configuration " +
                 std::to_string(j) + ")");
      }
    }
  }
  return prior;
}

FamilyPrior build_selection_prior(const NetworkStructure& structure,
                                  const SelectionPriorSpec& spec,
                                  std::int64_t m_f) {
  spec.validate();
  const int s = structure.selection_variable();
  if (s < 0) {
    fail(ErrorKind::Precondition,
         "build_selection_prior: structure has no selection variable");
  }
  const auto it = spec.per_m_f.find(m_f);
  if (it == spec.per_m_f.end()) {
    fail(ErrorKind::Precondition,
         "selection prior does not cover m_F=" + std::to_string(m_f) +
             " (covered: " + spec.covered_candidates() + ")");
  }
  const auto& rows = it->second;
  const std::int64_t configs = parent_config_count(structure, s);
  if (static_cast<std::int64_t>(rows.size()) != configs) {
    fail(ErrorKind::Precondition,
         "selection prior for m_F=" + std::to_string(m_f) + " has " +
             std::to_string(rows.size()) + " rows but S has " +
             std::to_string(configs) + " parent configurations");
  }
  const int arity = structure.variable(s).arity();
  FamilyPrior prior;
  prior.alpha.resize(structure.num_variables());
  prior.alpha[s].resize(configs);
  for (std::int64_t j = 0; j < configs; ++j) {
    if (static_cast<int>(rows[j].means.size()) != arity) {
      fail(ErrorKind::Precondition,
           "selection prior row " + std::to_string(j) +
               " has the wrong number of states");
    }
    prior.alpha[s][j].resize(arity);
    for (int k = 0; k < arity; ++k) {
      prior.alpha[s][j][k] = rows[j].ess * rows[j].means[k];
    }
  }
  return prior;
}

PriorDiagnostics validate_prior(const FamilyPrior& prior,
                                const NetworkStructure& structure) {
  PriorDiagnostics diag;
  const int n = structure.num_variables();
  if (static_cast<int>(prior.alpha.size()) != n) {
    diag.issues.push_back("prior covers " + std::to_string(prior.alpha.size()) +
                          " variables, structure has " + std::to_string(n));
    return diag;
  }
  for (int i = 0; i < n; ++i) {
    const auto& v = structure.variable(i);
    const std::int64_t configs = parent_config_count(structure, i);
    if (static_cast<std::int64_t>(prior.alpha[i].size()) != configs) {
      diag.issues.push_back("variable '" + v.name + "': expected " +
                            std::to_string(configs) + " rows, found " +
                            std::to_string(prior.alpha[i].size()));
      continue;
    }
    for (std::int64_t j = 0; j < configs; ++j) {
      if (static_cast<int>(prior.alpha[i][j].size()) != v.arity()) {
        diag.issues.push_back("variable '" + v.name + "', row " +
                              std::to_string(j) + ": wrong width");
        continue;
      }
      for (int k = 0; k < v.arity(); ++k) {
        const double a = prior.alpha[i][j][k];
        if (!(a > 0.0) || !std::isfinite(a)) {
          diag.issues.push_back("variable '" + v.name + "', row " +
                                std::to_string(j) + ", state '" + v.states[k] +
                                "': alpha must be positive and finite");
        }
      }
    }
  }
  return diag;
}

GeneratingNetwork uniform_network(const NetworkStructure& structure) {
  GeneratingNetwork net;
  net.structure = structure;
  net.cpts.resize(structure.num_variables());
  for (int i = 0; i < structure.num_variables(); ++i) {
    const int arity = structure.variable(i).arity();
    net.cpts[i].assign(parent_config_count(structure, i),
                       std::vector<double>(arity, 1.0 / arity));
  }
  return net;
}

GeneratingNetwork PriorSpec::bde_joint(const NetworkStructure& structure,
                                       std::int64_t m_f) const {
  if (mode != PriorMode::Bde) {
    fail(ErrorKind::Precondition, "bde_joint requires bde prior mode");
  }
  GeneratingNetwork p0 =
      prior_network.has_value() ? *prior_network : uniform_network(structure);
  if (!selection.has_value()) return p0;

  const int s = structure.selection_variable();
  if (s < 0) {
    fail(ErrorKind::Precondition,
         "selection prior given but the structure has no selection variable");
  }
  const int s0 = p0.structure.index_of(structure.variable(s).name);
  if (s0 < 0 || p0.structure.parents(s0).size() != structure.parents(s).size()) {
    fail(ErrorKind::Precondition,
         "prior network must give S the same parents as the model for the "
         "selection override");
  }
  for (std::size_t k = 0; k < structure.parents(s).size(); ++k) {
    if (p0.structure.variable(p0.structure.parents(s0)[k]).name !=
        structure.variable(structure.parents(s)[k]).name) {
      fail(ErrorKind::Precondition,
           "prior network must give S the same parents as the model for the "
           "selection override");
    }
  }
  const auto it = selection->per_m_f.find(m_f);
  if (it == selection->per_m_f.end()) {
    fail(ErrorKind::Precondition,
         "selection prior does not cover m_F=" + std::to_string(m_f) +
             " (covered: " + selection->covered_candidates() + ")");
  }
  const auto& rows = it->second;
  if (static_cast<std::int64_t>(rows.size()) !=
      parent_config_count(p0.structure, s0)) {
    fail(ErrorKind::Precondition,
         "selection prior row count does not match S's parent configurations");
  }
  p0.cpts[s0].assign(rows.size(), {});
  for (std::size_t j = 0; j < rows.size(); ++j) {
    p0.cpts[s0][j] = rows[j].means;
  }
  p0.validate();
  return p0;
}

FamilyPrior PriorSpec::assemble(const NetworkStructure& structure,
                                std::int64_t m_f) const {
  if (mode == PriorMode::Bde) {
    return build_bde_prior(structure, BdeSpec{ess, bde_joint(structure, m_f)});
  }
  if (!tables.has_value()) {
    fail(ErrorKind::Precondition, "explicit prior mode without tables");
  }
  FamilyPrior prior = *tables;
  prior.alpha.resize(structure.num_variables());
  const int s = structure.selection_variable();
  if (selection.has_value()) {
    if (s < 0) {
      fail(ErrorKind::Precondition,
           "selection prior given but the structure has no selection variable");
    }
    FamilyPrior fragment = build_selection_prior(structure, *selection, m_f);
    prior.alpha[s] = std::move(fragment.alpha[s]);
  }
  const auto diag = validate_prior(prior, structure);
  if (!diag.ok()) {
    fail(ErrorKind::Precondition,
         "explicit prior does not fit the structure: " +
             join(diag.issues, "; "));
  }
  return prior;
}

}  // namespace selbayes
