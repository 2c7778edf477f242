#include "selbayes/dataset.hpp"

#include <cmath>

namespace selbayes {

void Dataset::validate(const NetworkStructure& structure) const {
  const int n = structure.num_variables();
  const int s = structure.selection_variable();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (static_cast<int>(row.size()) != n) {
      fail(ErrorKind::Validation,
           "case " + std::to_string(r) + " has wrong width");
    }
    for (int i = 0; i < n; ++i) {
      if (row[i] == kMissing) continue;
      if (row[i] < 0 || row[i] >= structure.variable(i).arity()) {
        fail(ErrorKind::Validation,
             "case " + std::to_string(r) + ": invalid state for '" +
                 structure.variable(i).name + "'");
      }
    }
    if (s >= 0) {
      if (row[s] == kMissing) {
        fail(ErrorKind::Validation,
             "case " + std::to_string(r) + ": S never has a missing value");
      }
      if (row[s] == structure.variable(s).unsampled_state) {
        fail(ErrorKind::Validation,
             "case " + std::to_string(r) +
                 " carries the unsampled selection state; unsampled cases "
                 "belong in the population spec, not the dataset");
      }
    }
  }
}

PopulationSpec PopulationSpec::point(std::int64_t m_f) {
  PopulationSpec spec;
  spec.m_f_prior = {{m_f, 1.0}};
  spec.validate();
  return spec;
}

PopulationSpec PopulationSpec::categorical(const MfTable& table) {
  PopulationSpec spec;
  spec.m_f_prior = table;
  spec.validate();
  return spec;
}

bool PopulationSpec::is_point() const {
  return per_structure.empty() && m_f_prior.size() == 1;
}

std::int64_t PopulationSpec::point_value() const {
  if (!is_point()) {
    fail(ErrorKind::Precondition,
         "population spec is not a point mass over m_F");
  }
  return m_f_prior.front().first;
}

const MfTable& PopulationSpec::table_for(
    const NetworkStructure& structure) const {
  if (!per_structure.empty()) {
    const auto it = per_structure.find(structure.canonical_encoding());
    if (it != per_structure.end()) return it->second;
  }
  return m_f_prior;
}

namespace {

void validate_table(const MfTable& table, const std::string& what) {
  if (table.empty()) fail(ErrorKind::Validation, what + " is empty");
  double total = 0.0;
  std::int64_t prev = -1;
  for (const auto& [value, prob] : table) {
    if (value < 0) fail(ErrorKind::Validation, what + " has a negative m_F");
    if (value <= prev) {
      fail(ErrorKind::Validation, what + " values must be strictly increasing");
    }
    prev = value;
    if (!(prob > 0.0) || !(prob <= 1.0)) {
      fail(ErrorKind::Validation, what + " has a probability outside (0,1]");
    }
    total += prob;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    fail(ErrorKind::Validation, what + " probabilities do not sum to 1");
  }
}

}  // namespace

void PopulationSpec::validate() const {
  validate_table(m_f_prior, "m_F prior");
  for (const auto& [key, table] : per_structure) {
    validate_table(table, "m_F prior for structure '" + key + "'");
  }
}

CaseAssignment unsampled_case_pattern(const NetworkStructure& structure) {
  const int s = structure.selection_variable();
  if (s < 0) {
    fail(ErrorKind::Precondition,
         "unsampled cases require a selection variable");
  }
  CaseAssignment row(structure.num_variables(), kMissing);
  row[s] = structure.variable(s).unsampled_state;
  for (int i = 0; i < structure.num_variables(); ++i) {
    const auto& v = structure.variable(i);
    if (v.role == VarRole::Manipulation) row[i] = v.state_index("ne");
  }
  return row;
}

bool ancestrally_closed(const NetworkStructure& structure,
                        const CaseAssignment& row, int* observed_var,
                        int* missing_parent) {
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (row[i] == kMissing) continue;
    for (int p : structure.parents(i)) {
      if (row[p] == kMissing) {
        if (observed_var != nullptr) *observed_var = i;
        if (missing_parent != nullptr) *missing_parent = p;
        return false;
      }
    }
  }
  return true;
}

}  // namespace selbayes
