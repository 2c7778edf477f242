#include "selbayes/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace selbayes {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      fail(ErrorKind::Validation, where + ": unknown field '" + key + "'");
    }
  }
}

json parse_json(const std::string& text, const std::string& origin) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    fail(ErrorKind::Validation, origin + ": not valid JSON");
  }
  return doc;
}

std::vector<VariableSpec> parse_variables(const json& doc,
                                          const std::string& origin) {
  if (!doc.contains("variables") || !doc["variables"].is_array()) {
    fail(ErrorKind::Validation, origin + ": 'variables' array is required");
  }
  std::vector<VariableSpec> variables;
  for (const auto& v : doc["variables"]) {
    check_keys(v, {"name", "role", "states", "latent", "target", "unsampled"},
               origin + ": variable");
    VariableSpec spec;
    spec.name = v.at("name").get<std::string>();
    const std::string role = v.value("role", std::string("domain"));
    if (role == "domain") {
      spec.role = VarRole::Domain;
    } else if (role == "selection") {
      spec.role = VarRole::Selection;
    } else if (role == "manipulation") {
      spec.role = VarRole::Manipulation;
    } else {
      fail(ErrorKind::Validation, origin + ": variable '" + spec.name +
                                      "' has unknown role '" + role + "'");
    }
    if (!v.contains("states") || !v["states"].is_array()) {
      fail(ErrorKind::Validation,
           origin + ": variable '" + spec.name + "' needs a 'states' array");
    }
    for (const auto& s : v["states"]) spec.states.push_back(s.get<std::string>());
    spec.latent = v.value("latent", false);
    spec.target = v.value("target", std::string());
    if (spec.role == VarRole::Selection) {
      if (!v.contains("unsampled")) {
        fail(ErrorKind::Validation,
             origin + ": selection variable '" + spec.name +
                 "' must name its 'unsampled' state");
      }
      const std::string label = v["unsampled"].get<std::string>();
      spec.unsampled_state = spec.state_index(label);
      if (spec.unsampled_state < 0) {
        fail(ErrorKind::Validation,
             origin + ": unsampled state '" + label +
                 "' is not among the states of '" + spec.name + "'");
      }
    } else if (v.contains("unsampled")) {
      fail(ErrorKind::Validation, origin + ": 'unsampled' is selection-only");
    }
    variables.push_back(std::move(spec));
  }
  return variables;
}

std::vector<std::pair<std::string, std::string>> parse_edges(
    const json& doc, const std::string& origin) {
  std::vector<std::pair<std::string, std::string>> edges;
  if (!doc.contains("edges")) return edges;
  if (!doc["edges"].is_array()) {
    fail(ErrorKind::Validation, origin + ": 'edges' must be an array of pairs");
  }
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2) {
      fail(ErrorKind::Validation,
           origin + ": each edge must be a [parent, child] pair");
    }
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return edges;
}

// Rows must sum to 1 within 1e-9 on parse; they are renormalized exactly
// so downstream invariants hold at 1e-12.
std::vector<std::vector<double>> parse_table(const json& rows,
                                             const std::string& where) {
  if (!rows.is_array()) {
    fail(ErrorKind::Validation, where + ": expected an array of rows");
  }
  std::vector<std::vector<double>> table;
  for (const auto& row : rows) {
    if (!row.is_array() || row.empty()) {
      fail(ErrorKind::Validation, where + ": each row must be a number array");
    }
    std::vector<double> values;
    for (const auto& cell : row) values.push_back(cell.get<double>());
    table.push_back(std::move(values));
  }
  return table;
}

std::vector<std::vector<double>> normalize_rows(
    std::vector<std::vector<double>> table, const std::string& where) {
  for (std::size_t j = 0; j < table.size(); ++j) {
    double sum = 0.0;
    for (double v : table[j]) {
      if (!(v >= 0.0)) {
        fail(ErrorKind::Validation,
             where + ": row " + std::to_string(j) + " has a negative entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      fail(ErrorKind::Validation,
           where + ": row " + std::to_string(j) + " sums to " +
               format_g12(sum) + ", expected 1");
    }
    for (double& v : table[j]) v /= sum;
  }
  return table;
}

GeneratingNetwork parse_generator(const NetworkStructure& structure,
                                  const json& cpts, const std::string& origin) {
  GeneratingNetwork net;
  net.structure = structure;
  net.cpts.resize(structure.num_variables());
  for (const auto& [name, rows] : cpts.items()) {
    const int i = structure.require(name);
    auto table = normalize_rows(parse_table(rows, origin + ": cpt '" + name + "'"),
                                origin + ": cpt '" + name + "'");
    net.cpts[i] = std::move(table);
  }
  for (int i = 0; i < structure.num_variables(); ++i) {
    const auto& v = structure.variable(i);
    if (net.cpts[i].empty() && v.role == VarRole::Domain) {
      fail(ErrorKind::Validation,
           origin + ": cpts must cover domain variable '" + v.name + "'");
    }
  }
  net.validate();
  return net;
}

PriorSpec parse_priors(const NetworkStructure& structure, const json& doc,
                       const std::string& origin) {
  PriorSpec priors;  // bde, uniform P0, ess 1
  if (doc.contains("priors")) {
    const json& p = doc["priors"];
    check_keys(p, {"mode", "ess", "prior_network", "tables"},
               origin + ": priors");
    const std::string mode = p.value("mode", std::string("bde"));
    if (mode == "bde") {
      priors.mode = PriorMode::Bde;
    } else if (mode == "explicit") {
      priors.mode = PriorMode::Explicit;
    } else {
      fail(ErrorKind::Validation,
           origin + ": priors.mode must be 'bde' or 'explicit'");
    }
    priors.ess = p.value("ess", 1.0);
    if (!(priors.ess > 0.0)) {
      fail(ErrorKind::Validation, origin + ": priors.ess must be positive");
    }
    if (p.contains("prior_network")) {
      const json& pn = p["prior_network"];
      check_keys(pn, {"edges", "cpts"}, origin + ": priors.prior_network");
      NetworkStructure prior_structure(
          structure.variables(),
          parse_edges(pn, origin + ": priors.prior_network"));
      if (!pn.contains("cpts")) {
        fail(ErrorKind::Validation,
             origin + ": priors.prior_network needs 'cpts'");
      }
      priors.prior_network = parse_generator(
          prior_structure, pn["cpts"], origin + ": priors.prior_network");
    }
    if (p.contains("tables")) {
      FamilyPrior tables;
      tables.alpha.resize(structure.num_variables());
      for (const auto& [name, rows] : p["tables"].items()) {
        const int i = structure.require(name);
        tables.alpha[i] =
            parse_table(rows, origin + ": priors.tables '" + name + "'");
      }
      priors.tables = std::move(tables);
    }
    if (priors.mode == PriorMode::Explicit && !priors.tables.has_value()) {
      fail(ErrorKind::Validation,
           origin + ": explicit prior mode needs 'tables'");
    }
  }
  if (doc.contains("selection_prior")) {
    const json& sp = doc["selection_prior"];
    check_keys(sp, {"per_mF"}, origin + ": selection_prior");
    if (!sp.contains("per_mF") || !sp["per_mF"].is_object()) {
      fail(ErrorKind::Validation,
           origin + ": selection_prior needs a 'per_mF' object");
    }
    SelectionPriorSpec selection;
    for (const auto& [key, rows] : sp["per_mF"].items()) {
      std::int64_t m_f = 0;
      try {
        m_f = std::stoll(key);
      } catch (...) {
        fail(ErrorKind::Validation,
             origin + ": selection_prior key '" + key +
                 "' is not an integer m_F");
      }
      if (!rows.is_array()) {
        fail(ErrorKind::Validation,
             origin + ": selection_prior for m_F=" + key +
                 " must be an array of rows");
      }
      std::vector<SelectionPriorRow> parsed;
      for (const auto& row : rows) {
        check_keys(row, {"ess", "means"},
                   origin + ": selection_prior row for m_F=" + key);
        SelectionPriorRow r;
        r.ess = row.value("ess", 1.0);
        if (!row.contains("means") || !row["means"].is_array()) {
          fail(ErrorKind::Validation,
               origin + ": selection_prior row for m_F=" + key +
                   " needs 'means'");
        }
        for (const auto& m : row["means"]) r.means.push_back(m.get<double>());
        parsed.push_back(std::move(r));
      }
      selection.per_m_f[m_f] = std::move(parsed);
    }
    selection.validate();
    priors.selection = std::move(selection);
  }
  return priors;
}

MfTable parse_m_f_table(const json& obj, const std::string& where) {
  MfTable table;
  for (const auto& [key, prob] : obj.items()) {
    std::int64_t value = 0;
    try {
      value = std::stoll(key);
    } catch (...) {
      fail(ErrorKind::Validation,
           where + ": key '" + key + "' is not an integer m_F");
    }
    table.emplace_back(value, prob.get<double>());
  }
  std::sort(table.begin(), table.end());
  return table;
}

PopulationSpec parse_population(const NetworkStructure& structure,
                                const json& doc, const std::string& origin,
                                bool* declared) {
  *declared = false;
  PopulationSpec population;
  if (!doc.contains("population")) return population;
  *declared = true;
  const json& p = doc["population"];
  check_keys(p, {"m_F", "m_F_table", "per_structure"}, origin + ": population");
  if (p.contains("m_F") == p.contains("m_F_table")) {
    fail(ErrorKind::Validation,
         origin + ": population needs exactly one of 'm_F' or 'm_F_table'");
  }
  if (p.contains("m_F")) {
    population.m_f_prior = {{p["m_F"].get<std::int64_t>(), 1.0}};
  } else {
    population.m_f_prior =
        parse_m_f_table(p["m_F_table"], origin + ": population.m_F_table");
  }
  if (p.contains("per_structure")) {
    for (const auto& [encoding, table] : p["per_structure"].items()) {
      population.per_structure[encoding] =
          parse_m_f_table(table, origin + ": population.per_structure");
    }
  }
  population.validate();
  return population;
}

}  // namespace

NetworkSpecFile parse_network_spec(const std::string& json_text,
                                   const std::string& origin) {
  const json doc = parse_json(json_text, origin);
  if (!doc.is_object()) {
    fail(ErrorKind::Validation, origin + ": top level must be an object");
  }
  check_keys(doc,
             {"variables", "edges", "cpts", "priors", "selection_prior",
              "population"},
             origin);

  // Collect every validation problem before giving up.
  std::vector<std::string> errors;
  NetworkSpecFile spec;
  bool have_structure = false;
  try {
    spec.structure = NetworkStructure(parse_variables(doc, origin),
                                      parse_edges(doc, origin));
    have_structure = true;
  } catch (const Error& e) {
    errors.push_back(e.what());
  }
  if (have_structure) {
    if (doc.contains("cpts")) {
      try {
        spec.generator = parse_generator(spec.structure, doc["cpts"], origin);
      } catch (const Error& e) {
        errors.push_back(e.what());
      }
    }
    try {
      spec.priors = parse_priors(spec.structure, doc, origin);
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
    try {
      spec.population = parse_population(spec.structure, doc, origin,
                                         &spec.population_declared);
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) {
    fail(ErrorKind::Validation, join(errors, "\n"));
  }
  return spec;
}

NetworkSpecFile load_network_spec(const std::string& path) {
  return parse_network_spec(read_text_file(path), path);
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      if (!current.empty() && current.back() == '\r') current.pop_back();
      lines.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) {
    if (current.back() == '\r') current.pop_back();
    lines.push_back(std::move(current));
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

// Column mapping: the header must be a permutation of the declared
// variable names.
std::vector<int> parse_header(const std::vector<std::string>& fields,
                              const NetworkStructure& structure,
                              const std::string& origin) {
  std::vector<int> columns;
  std::vector<bool> seen(structure.num_variables(), false);
  for (const auto& name : fields) {
    const int i = structure.index_of(name);
    if (i < 0) {
      fail(ErrorKind::Validation,
           origin + ": header names unknown variable '" + name + "'");
    }
    if (seen[i]) {
      fail(ErrorKind::Validation,
           origin + ": header repeats variable '" + name + "'");
    }
    seen[i] = true;
    columns.push_back(i);
  }
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (!seen[i]) {
      fail(ErrorKind::Validation, origin + ": header is missing variable '" +
                                      structure.variable(i).name + "'");
    }
  }
  return columns;
}

}  // namespace

LoadedDataset parse_dataset(const std::string& text,
                            const NetworkStructure& structure,
                            const std::string& origin) {
  const auto lines = split_lines(text);
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  if (first >= lines.size()) {
    fail(ErrorKind::Validation, origin + ": missing header row");
  }
  const auto columns = parse_header(split_csv(lines[first]), structure, origin);
  const int s = structure.selection_variable();

  LoadedDataset result;
  std::int64_t row_number = 0;
  for (std::size_t ln = first + 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    ++row_number;
    const auto fields = split_csv(lines[ln]);
    if (fields.size() != columns.size()) {
      fail(ErrorKind::Validation,
           origin + ": row " + std::to_string(row_number) + " has " +
               std::to_string(fields.size()) + " fields, expected " +
               std::to_string(columns.size()));
    }
    CaseAssignment row(structure.num_variables(), kMissing);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const int var = columns[c];
      if (fields[c] == "?") continue;
      const int state = structure.variable(var).state_index(fields[c]);
      if (state < 0) {
        fail(ErrorKind::Validation,
             origin + ": row " + std::to_string(row_number) + ", column '" +
                 structure.variable(var).name + "': unknown state '" +
                 fields[c] + "'");
      }
      row[var] = state;
    }
    if (s >= 0) {
      if (row[s] == kMissing) {
        fail(ErrorKind::Validation,
             origin + ": row " + std::to_string(row_number) +
                 ": S never has a missing value");
      }
      if (row[s] == structure.variable(s).unsampled_state) {
        ++result.unsampled_rows;  // implied case; values beyond S are unused
        continue;
      }
    }
    result.dataset.rows.push_back(std::move(row));
  }
  result.dataset.validate(structure);
  return result;
}

LoadedDataset load_dataset(const std::string& path,
                           const NetworkStructure& structure) {
  return parse_dataset(read_text_file(path), structure, path);
}

std::string dataset_text(const NetworkStructure& structure,
                         const Dataset& dataset,
                         std::int64_t unsampled_rows) {
  std::string out;
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (i > 0) out += ',';
    out += structure.variable(i).name;
  }
  out += '\n';
  auto append_row = [&](const CaseAssignment& row) {
    for (int i = 0; i < structure.num_variables(); ++i) {
      if (i > 0) out += ',';
      out += row[i] == kMissing ? "?" : structure.variable(i).states[row[i]];
    }
    out += '\n';
  };
  for (const auto& row : dataset.rows) append_row(row);
  if (unsampled_rows > 0) {
    const CaseAssignment pattern = unsampled_case_pattern(structure);
    for (std::int64_t r = 0; r < unsampled_rows; ++r) append_row(pattern);
  }
  return out;
}

PopulationSpec combine_population(const NetworkSpecFile& spec,
                                  std::int64_t unsampled_rows) {
  if (unsampled_rows == 0) return spec.population;
  if (spec.population_declared &&
      (spec.population.m_f_prior.size() != 1 ||
       !spec.population.per_structure.empty())) {
    fail(ErrorKind::Validation,
         "the data file carries explicit unsampled rows, which cannot be "
         "combined with a non-point m_F prior in the network spec");
  }
  const std::int64_t base =
      spec.population_declared ? spec.population.m_f_prior.front().first : 0;
  return PopulationSpec::point(base + unsampled_rows);
}

SearchConstraints load_constraints(const std::string& path,
                                   const NetworkStructure& structure) {
  const json doc = parse_json(read_text_file(path), path);
  check_keys(doc,
             {"required", "forbidden", "fixed_s_parents",
              "manipulation_constraints", "max_parents"},
             path);
  SearchConstraints constraints;
  auto read_edges = [&](const char* key,
                        std::vector<std::pair<std::string, std::string>>& out) {
    if (!doc.contains(key)) return;
    for (const auto& e : doc[key]) {
      if (!e.is_array() || e.size() != 2) {
        fail(ErrorKind::Validation,
             std::string(path) + ": each " + key + " entry must be a pair");
      }
      out.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  };
  read_edges("required", constraints.required_edges);
  read_edges("forbidden", constraints.forbidden_edges);
  constraints.fixed_s_parents = doc.value("fixed_s_parents", true);
  constraints.manipulation_constraints =
      doc.value("manipulation_constraints", true);
  constraints.max_parents = doc.value("max_parents", 3);
  constraints.validate(structure);
  return constraints;
}

namespace {

SelectionMechanism parse_mechanism(const json& doc, const std::string& origin) {
  check_keys(doc, {"kind", "quotas", "parts"}, origin);
  SelectionMechanism mechanism;
  const std::string kind = doc.value("kind", std::string("mechanistic"));
  if (kind == "mechanistic") {
    mechanism.kind = SelectionMechanism::Kind::Mechanistic;
  } else if (kind == "quota") {
    mechanism.kind = SelectionMechanism::Kind::Quota;
    if (!doc.contains("quotas") || !doc["quotas"].is_array()) {
      fail(ErrorKind::Validation, origin + ": quota mechanism needs 'quotas'");
    }
    for (const auto& q : doc["quotas"]) {
      check_keys(q, {"state", "count", "where"}, origin + ": quota");
      QuotaEntry entry;
      entry.state = q.at("state").get<std::string>();
      entry.count = q.at("count").get<std::int64_t>();
      if (q.contains("where")) {
        for (const auto& t : q["where"]) {
          check_keys(t, {"var", "is", "not"}, origin + ": quota predicate");
          PredicateTest test;
          test.variable = t.at("var").get<std::string>();
          if (t.contains("is") == t.contains("not")) {
            fail(ErrorKind::Validation,
                 origin + ": predicate needs exactly one of 'is' or 'not'");
          }
          if (t.contains("is")) {
            test.state = t["is"].get<std::string>();
          } else {
            test.state = t["not"].get<std::string>();
            test.negated = true;
          }
          entry.tests.push_back(std::move(test));
        }
      }
      mechanism.quotas.push_back(std::move(entry));
    }
  } else if (kind == "composite") {
    mechanism.kind = SelectionMechanism::Kind::Composite;
    if (!doc.contains("parts") || !doc["parts"].is_array()) {
      fail(ErrorKind::Validation, origin + ": composite mechanism needs 'parts'");
    }
    for (const auto& part : doc["parts"]) {
      mechanism.parts.push_back(parse_mechanism(part, origin + ": part"));
    }
  } else {
    fail(ErrorKind::Validation,
         origin + ": kind must be mechanistic|quota|composite");
  }
  return mechanism;
}

}  // namespace

SelectionMechanism load_selection_mechanism(const std::string& path) {
  return parse_mechanism(parse_json(read_text_file(path), path), path);
}

ManipulationDesign load_manipulation_design(const std::string& path) {
  const json doc = parse_json(read_text_file(path), path);
  check_keys(doc, {"entries"}, path);
  ManipulationDesign design;
  if (!doc.contains("entries") || !doc["entries"].is_array()) {
    fail(ErrorKind::Validation, path + ": needs an 'entries' array");
  }
  for (const auto& e : doc["entries"]) {
    check_keys(e, {"variable", "fraction", "assignment", "compliance"},
               std::string(path) + ": entry");
    ManipulationEntry entry;
    entry.variable = e.at("variable").get<std::string>();
    entry.fraction = e.value("fraction", 0.0);
    entry.compliance = e.value("compliance", 1.0);
    if (!e.contains("assignment") || !e["assignment"].is_array()) {
      fail(ErrorKind::Validation,
           std::string(path) + ": entry '" + entry.variable +
               "' needs an 'assignment' distribution");
    }
    double sum = 0.0;
    for (const auto& p : e["assignment"]) {
      entry.assignment.push_back(p.get<double>());
      sum += entry.assignment.back();
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      fail(ErrorKind::Validation,
           std::string(path) + ": assignment for '" + entry.variable +
               "' must sum to 1");
    }
    design.entries.push_back(std::move(entry));
  }
  return design;
}

std::string population_text(
    const Population& population,
    const std::vector<std::pair<std::string, std::string>>& comments) {
  std::string out;
  for (const auto& [key, value] : comments) {
    out += "# " + key + "=" + value + "\n";
  }
  const auto& structure = population.structure;
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (i > 0) out += ',';
    out += structure.variable(i).name;
  }
  out += '\n';
  for (std::size_t r = 0; r < population.cases.size(); ++r) {
    const auto& row = population.cases[r];
    for (int i = 0; i < structure.num_variables(); ++i) {
      if (row[i] == kMissing) {
        fail(ErrorKind::Precondition,
             "population case " + std::to_string(r) + " is incomplete on '" +
                 structure.variable(i).name + "'");
      }
      if (i > 0) out += ',';
      out += structure.variable(i).states[row[i]];
    }
    out += '\n';
  }
  return out;
}

void save_population(
    const std::string& path, const Population& population,
    const std::vector<std::pair<std::string, std::string>>& comments) {
  write_text_file(path, population_text(population, comments));
}

Population load_population(const std::string& path,
                           const NetworkStructure& structure) {
  const auto lines = split_lines(read_text_file(path));
  std::size_t first = 0;
  while (first < lines.size() &&
         (lines[first].empty() || lines[first][0] == '#')) {
    ++first;
  }
  if (first >= lines.size()) {
    fail(ErrorKind::Validation, path + ": missing header row");
  }
  const auto columns = parse_header(split_csv(lines[first]), structure, path);
  Population population;
  population.structure = structure;
  std::int64_t row_number = 0;
  for (std::size_t ln = first + 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    ++row_number;
    const auto fields = split_csv(lines[ln]);
    if (fields.size() != columns.size()) {
      fail(ErrorKind::Validation,
           path + ": row " + std::to_string(row_number) + " has " +
               std::to_string(fields.size()) + " fields, expected " +
               std::to_string(columns.size()));
    }
    CaseAssignment row(structure.num_variables(), kMissing);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const int var = columns[c];
      const int state = structure.variable(var).state_index(fields[c]);
      if (state < 0) {
        fail(ErrorKind::Validation,
             path + ": row " + std::to_string(row_number) + ", column '" +
                 structure.variable(var).name + "': unknown state '" +
                 fields[c] + "' (population files have no missing cells)");
      }
      row[var] = state;
    }
    population.cases.push_back(std::move(row));
  }
  return population;
}

}  // namespace selbayes
