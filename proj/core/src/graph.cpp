#include "selbayes/graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <set>
#include <tuple>
#include <unordered_set>

namespace selbayes {

std::string to_string(VarRole role) {
  switch (role) {
    case VarRole::Domain: return "domain";
    case VarRole::Selection: return "selection";
    case VarRole::Manipulation: return "manipulation";
  }
  return "?";
}

int VariableSpec::state_index(std::string_view state) const {
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k] == state) return static_cast<int>(k);
  }
  return -1;
}

namespace {

void validate_variable_specs(const std::vector<VariableSpec>& vars) {
  std::unordered_set<std::string> names;
  int selection_count = 0;
  for (const auto& v : vars) {
    if (v.name.empty()) fail(ErrorKind::Validation, "variable with empty name");
    if (!names.insert(v.name).second) {
      fail(ErrorKind::Validation, "duplicate variable name '" + v.name + "'");
    }
    if (v.states.size() < 2) {
      fail(ErrorKind::Validation,
           "variable '" + v.name + "' needs at least 2 states");
    }
    std::unordered_set<std::string> labels;
    for (const auto& s : v.states) {
      if (!labels.insert(s).second) {
        fail(ErrorKind::Validation,
             "variable '" + v.name + "' has duplicate state label '" + s + "'");
      }
    }
    if (v.latent && v.role != VarRole::Domain) {
      fail(ErrorKind::Validation,
           "variable '" + v.name + "': only domain variables may be latent");
    }
    if (v.role == VarRole::Selection) {
      ++selection_count;
      if (v.unsampled_state < 0 || v.unsampled_state >= v.arity()) {
        fail(ErrorKind::Validation,
             "selection variable '" + v.name +
                 "' must declare exactly one unsampled state");
      }
    } else if (v.unsampled_state != -1) {
      fail(ErrorKind::Validation,
           "variable '" + v.name + "': unsampled state is selection-only");
    }
    if (v.role == VarRole::Manipulation) {
      if (v.target.empty()) {
        fail(ErrorKind::Validation,
             "manipulation variable '" + v.name + "' has no target");
      }
      if (v.states.empty() || v.states.back() != "ne") {
        fail(ErrorKind::Validation,
             "manipulation variable '" + v.name +
                 "' must list its target's states followed by \"ne\"");
      }
    } else if (!v.target.empty()) {
      fail(ErrorKind::Validation,
           "variable '" + v.name + "': target is manipulation-only");
    }
  }
  if (selection_count > 1) {
    fail(ErrorKind::Validation, "at most one selection variable is allowed");
  }
  // Target cross-checks need the whole list.
  for (const auto& v : vars) {
    if (v.role != VarRole::Manipulation) continue;
    const VariableSpec* target = nullptr;
    for (const auto& w : vars) {
      if (w.name == v.target) target = &w;
    }
    if (target == nullptr) {
      fail(ErrorKind::Validation, "manipulation variable '" + v.name +
                                      "' targets unknown variable '" +
                                      v.target + "'");
    }
    std::vector<std::string> expect = target->states;
    expect.push_back("ne");
    if (v.states != expect) {
      fail(ErrorKind::Validation,
           "manipulation variable '" + v.name +
               "' must have states equal to its target's plus \"ne\"");
    }
  }
}

}  // namespace

NetworkStructure::NetworkStructure(
    std::vector<VariableSpec> variables,
    const std::vector<std::pair<std::string, std::string>>& edges)
    : vars_(std::move(variables)), parents_(vars_.size()) {
  validate_variable_specs(vars_);
  std::set<std::pair<int, int>> seen;
  for (const auto& [parent, child] : edges) {
    const int p = require(parent);
    const int c = require(child);
    if (p == c) fail(ErrorKind::Validation, "self-loop on '" + parent + "'");
    if (!seen.insert({p, c}).second) {
      fail(ErrorKind::Validation,
           "duplicate edge " + parent + " -> " + child);
    }
    parents_[c].push_back(p);
  }
  for (auto& ps : parents_) std::sort(ps.begin(), ps.end());
  check_acyclic();
}

int NetworkStructure::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int NetworkStructure::require(std::string_view name) const {
  const int i = index_of(name);
  if (i < 0) {
    fail(ErrorKind::Validation, "unknown variable '" + std::string(name) + "'");
  }
  return i;
}

int NetworkStructure::selection_variable() const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].role == VarRole::Selection) return static_cast<int>(i);
  }
  return -1;
}

bool NetworkStructure::has_edge(int parent, int child) const {
  const auto& ps = parents_[child];
  return std::binary_search(ps.begin(), ps.end(), parent);
}

std::vector<std::pair<int, int>> NetworkStructure::edge_list() const {
  std::vector<std::pair<int, int>> edges;
  for (int c = 0; c < num_variables(); ++c) {
    for (int p : parents_[c]) edges.emplace_back(p, c);
  }
  return edges;
}

std::vector<std::vector<int>> NetworkStructure::children() const {
  std::vector<std::vector<int>> ch(vars_.size());
  for (int c = 0; c < num_variables(); ++c) {
    for (int p : parents_[c]) ch[p].push_back(c);
  }
  return ch;
}

std::string NetworkStructure::canonical_encoding() const {
  std::string out;
  for (int i = 0; i < num_variables(); ++i) {
    if (i > 0) out += ';';
    out += vars_[i].name;
    out += "<-";
    for (std::size_t k = 0; k < parents_[i].size(); ++k) {
      if (k > 0) out += ',';
      out += vars_[parents_[i][k]].name;
    }
  }
  return out;
}

NetworkStructure NetworkStructure::with_parents(
    std::vector<std::vector<int>> parents) const {
  NetworkStructure copy;
  copy.vars_ = vars_;
  copy.parents_ = std::move(parents);
  for (auto& ps : copy.parents_) std::sort(ps.begin(), ps.end());
  copy.check_acyclic();
  return copy;
}

void NetworkStructure::check_acyclic() const {
  topological_order(*this);  // throws on a cycle
}

void GeneratingNetwork::validate() const {
  const int n = structure.num_variables();
  if (static_cast<int>(cpts.size()) != n) {
    fail(ErrorKind::Validation, "cpts must cover every variable");
  }
  for (int i = 0; i < n; ++i) {
    const auto& v = structure.variable(i);
    // Selection and manipulation variables may omit their tables; forward
    // sampling assigns them through the selection mechanism / design.
    if (cpts[i].empty() && v.role != VarRole::Domain) continue;
    const std::int64_t configs = parent_config_count(structure, i);
    if (static_cast<std::int64_t>(cpts[i].size()) != configs) {
      fail(ErrorKind::Validation,
           "cpt for '" + v.name + "' must have one row per parent configuration");
    }
    for (std::int64_t j = 0; j < configs; ++j) {
      const auto& row = cpts[i][j];
      if (static_cast<int>(row.size()) != v.arity()) {
        fail(ErrorKind::Validation,
             "cpt row for '" + v.name + "' has wrong width");
      }
      double sum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0) || !(p <= 1.0)) {
          fail(ErrorKind::Validation,
               "cpt for '" + v.name + "' has entry outside [0,1]");
        }
        sum += p;
      }
      if (std::fabs(sum - 1.0) > 1e-12) {
        fail(ErrorKind::Validation,
             "cpt row " + std::to_string(j) + " for '" + v.name +
                 "' does not sum to 1");
      }
    }
  }
}

std::int64_t parent_config_count(const NetworkStructure& structure, int i) {
  std::int64_t count = 1;
  for (int p : structure.parents(i)) count *= structure.variable(p).arity();
  return count;
}

int parent_config_index(const NetworkStructure& structure, int i,
                        const CaseAssignment& assignment) {
  int j = 0;
  for (int p : structure.parents(i)) {
    const int s = assignment[p];
    if (s < 0) {
      fail(ErrorKind::Precondition, "parent '" + structure.variable(p).name +
                                        "' of '" + structure.variable(i).name +
                                        "' is unassigned");
    }
    j = j * structure.variable(p).arity() + s;
  }
  return j;
}

std::vector<int> decode_parent_config(const NetworkStructure& structure, int i,
                                      std::int64_t j) {
  const auto& ps = structure.parents(i);
  std::vector<int> states(ps.size());
  for (std::size_t k = ps.size(); k-- > 0;) {
    const int arity = structure.variable(ps[k]).arity();
    states[k] = static_cast<int>(j % arity);
    j /= arity;
  }
  return states;
}

std::vector<int> ancestors(const NetworkStructure& structure, int node) {
  if (node < 0 || node >= structure.num_variables()) {
    fail(ErrorKind::Precondition, "ancestors: node index out of range");
  }
  std::vector<bool> seen(structure.num_variables(), false);
  std::deque<int> frontier(structure.parents(node).begin(),
                           structure.parents(node).end());
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop_front();
    if (seen[v]) continue;
    seen[v] = true;
    for (int p : structure.parents(v)) frontier.push_back(p);
  }
  std::vector<int> result;
  for (int v = 0; v < structure.num_variables(); ++v) {
    if (seen[v]) result.push_back(v);
  }
  return result;
}

std::vector<std::string> ancestors(const NetworkStructure& structure,
                                   std::string_view node) {
  std::vector<std::string> names;
  for (int v : ancestors(structure, structure.require(node))) {
    names.push_back(structure.variable(v).name);
  }
  return names;
}

std::vector<int> topological_order(const NetworkStructure& structure) {
  const int n = structure.num_variables();
  std::vector<int> pending(n);
  for (int i = 0; i < n; ++i) {
    pending[i] = static_cast<int>(structure.parents(i).size());
  }
  const auto children = structure.children();
  std::vector<int> order;
  order.reserve(n);
  std::vector<bool> placed(n, false);
  // Kahn's algorithm, always taking the lowest-index ready node so ties
  // fall back to declaration order.
  for (int step = 0; step < n; ++step) {
    int next = -1;
    for (int i = 0; i < n; ++i) {
      if (!placed[i] && pending[i] == 0) {
        next = i;
        break;
      }
    }
    if (next < 0) {
      // Walk parent links from any remaining node to print one cycle.
      int v = 0;
      while (placed[v]) ++v;
      std::vector<int> trail;
      std::vector<int> visit_pos(n, -1);
      while (visit_pos[v] < 0) {
        visit_pos[v] = static_cast<int>(trail.size());
        trail.push_back(v);
        int next_parent = -1;
        for (int p : structure.parents(v)) {
          if (!placed[p]) {
            next_parent = p;
            break;
          }
        }
        v = next_parent;
      }
      std::string cycle;
      for (std::size_t k = visit_pos[v]; k < trail.size(); ++k) {
        cycle += structure.variable(trail[k]).name + " <- ";
      }
      cycle += structure.variable(v).name;
      fail(ErrorKind::Validation, "graph has a cycle: " + cycle);
    }
    placed[next] = true;
    order.push_back(next);
    for (int c : children[next]) --pending[c];
  }
  return order;
}

namespace {

// Ancestors of the conditioning set including the set itself.
std::vector<bool> ancestral_closure(const NetworkStructure& structure,
                                    const std::vector<int>& given) {
  std::vector<bool> in(structure.num_variables(), false);
  std::deque<int> frontier;
  for (int z : given) {
    if (!in[z]) {
      in[z] = true;
      frontier.push_back(z);
    }
  }
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop_front();
    for (int p : structure.parents(v)) {
      if (!in[p]) {
        in[p] = true;
        frontier.push_back(p);
      }
    }
  }
  return in;
}

}  // namespace

bool d_separated(const NetworkStructure& structure, int x, int y,
                 const std::vector<int>& given) {
  const int n = structure.num_variables();
  auto check = [&](int v, const char* what) {
    if (v < 0 || v >= n) {
      fail(ErrorKind::Precondition,
           std::string("d_separated: ") + what + " out of range");
    }
  };
  check(x, "x");
  check(y, "y");
  for (int z : given) check(z, "conditioning variable");
  if (x == y) fail(ErrorKind::Precondition, "d_separated: x and y must differ");
  std::vector<bool> observed(n, false);
  for (int z : given) observed[z] = true;
  if (observed[x] || observed[y]) {
    fail(ErrorKind::Precondition,
         "d_separated: x and y must not be in the conditioning set");
  }

  const auto an_given = ancestral_closure(structure, given);
  const auto children = structure.children();

  // Reachability over (node, arrival direction) states.  Arriving "from a
  // child" lets the walk continue to parents and children when the node is
  // unobserved; arriving "from a parent" continues to children when
  // unobserved, and bounces to parents when the node has an observed
  // descendant (the collider rule).
  enum Dir { FromChild = 0, FromParent = 1 };
  std::vector<std::array<bool, 2>> visited(n, {false, false});
  std::deque<std::pair<int, int>> frontier;
  frontier.push_back({x, FromChild});
  while (!frontier.empty()) {
    const auto [v, dir] = frontier.front();
    frontier.pop_front();
    if (visited[v][dir]) continue;
    visited[v][dir] = true;
    if (v == y) return false;
    if (dir == FromChild) {
      if (!observed[v]) {
        for (int p : structure.parents(v)) frontier.push_back({p, FromChild});
        for (int c : children[v]) frontier.push_back({c, FromParent});
      }
    } else {
      if (!observed[v]) {
        for (int c : children[v]) frontier.push_back({c, FromParent});
      }
      if (an_given[v]) {
        for (int p : structure.parents(v)) frontier.push_back({p, FromChild});
      }
    }
  }
  return true;
}

bool d_separated(const NetworkStructure& structure, std::string_view x,
                 std::string_view y, const std::vector<std::string>& given) {
  std::vector<int> g;
  for (const auto& name : given) g.push_back(structure.require(name));
  return d_separated(structure, structure.require(x), structure.require(y), g);
}

double joint_probability(const GeneratingNetwork& network,
                         const CaseAssignment& assignment) {
  const auto& structure = network.structure;
  if (static_cast<int>(assignment.size()) != structure.num_variables()) {
    fail(ErrorKind::Precondition,
         "joint_probability: assignment must cover every variable");
  }
  double prob = 1.0;
  for (int i = 0; i < structure.num_variables(); ++i) {
    const int k = assignment[i];
    if (k < 0 || k >= structure.variable(i).arity()) {
      fail(ErrorKind::Precondition,
           "joint_probability: invalid state for '" +
               structure.variable(i).name + "'");
    }
    if (network.cpts[i].empty()) {
      fail(ErrorKind::Precondition, "variable '" + structure.variable(i).name +
                                        "' has no conditional table");
    }
    prob *= network.cpts[i][parent_config_index(structure, i, assignment)][k];
  }
  return prob;
}

std::vector<double> infer_conditional(const GeneratingNetwork& network,
                                      const CaseAssignment& evidence, int query,
                                      std::uint64_t enumeration_cap) {
  const auto& structure = network.structure;
  const int n = structure.num_variables();
  if (query < 0 || query >= n) {
    fail(ErrorKind::Precondition, "infer_conditional: query out of range");
  }
  if (static_cast<int>(evidence.size()) != n) {
    fail(ErrorKind::Precondition,
         "infer_conditional: evidence vector must cover every variable");
  }
  if (evidence[query] >= 0) {
    fail(ErrorKind::Precondition,
         "infer_conditional: query must not be part of the evidence");
  }
  std::vector<int> hidden;
  std::uint64_t space = 1;
  for (int i = 0; i < n; ++i) {
    const int arity = structure.variable(i).arity();
    if (evidence[i] >= arity) {
      fail(ErrorKind::Precondition,
           "infer_conditional: invalid evidence state for '" +
               structure.variable(i).name + "'");
    }
    if (evidence[i] < 0) {
      hidden.push_back(i);
      if (space > enumeration_cap / arity) {
        fail(ErrorKind::Budget, "enumeration too large");
      }
      space *= arity;
    }
  }

  const auto& qvar = structure.variable(query);
  std::vector<double> mass(qvar.arity(), 0.0);
  CaseAssignment full = evidence;
  for (int h : hidden) full[h] = 0;
  // Lexicographic odometer over the hidden variables.
  while (true) {
    mass[full[query]] += joint_probability(network, full);
    std::size_t pos = hidden.size();
    while (pos > 0) {
      const int v = hidden[pos - 1];
      if (++full[v] < structure.variable(v).arity()) break;
      full[v] = 0;
      --pos;
    }
    if (pos == 0) break;
  }

  double total = 0.0;
  for (double m : mass) total += m;
  if (total <= 0.0) fail(ErrorKind::Precondition, "impossible evidence");
  for (double& m : mass) m /= total;
  return mass;
}

std::int64_t parameter_count(const NetworkStructure& structure) {
  std::int64_t total = 0;
  for (int i = 0; i < structure.num_variables(); ++i) {
    total += static_cast<std::int64_t>(structure.variable(i).arity() - 1) *
             parent_config_count(structure, i);
  }
  return total;
}

bool markov_equivalent(const NetworkStructure& m1, const NetworkStructure& m2) {
  const int n = m1.num_variables();
  if (n != m2.num_variables()) {
    fail(ErrorKind::Precondition,
         "markov_equivalent: structures have different variable sets");
  }
  // Map m2's indices onto m1's by variable name.
  std::vector<int> remap(n, -1);
  for (int i = 0; i < n; ++i) {
    const int j = m2.index_of(m1.variable(i).name);
    if (j < 0) {
      fail(ErrorKind::Precondition,
           "markov_equivalent: variable '" + m1.variable(i).name +
               "' missing from the second structure");
    }
    remap[j] = i;
  }

  auto skeleton = [&](const NetworkStructure& m,
                      const std::vector<int>* map) {
    std::set<std::pair<int, int>> edges;
    for (auto [p, c] : m.edge_list()) {
      if (map != nullptr) {
        p = (*map)[p];
        c = (*map)[c];
      }
      edges.insert({std::min(p, c), std::max(p, c)});
    }
    return edges;
  };
  const auto sk1 = skeleton(m1, nullptr);
  const auto sk2 = skeleton(m2, &remap);
  if (sk1 != sk2) return false;

  auto v_structures = [&](const NetworkStructure& m, const std::vector<int>* map,
                          const std::set<std::pair<int, int>>& skel) {
    std::set<std::tuple<int, int, int>> vs;
    for (int c = 0; c < n; ++c) {
      const auto& ps = m.parents(c);
      for (std::size_t a = 0; a < ps.size(); ++a) {
        for (std::size_t b = a + 1; b < ps.size(); ++b) {
          int u = ps[a], v = ps[b], mid = c;
          if (map != nullptr) {
            u = (*map)[u];
            v = (*map)[v];
            mid = (*map)[mid];
          }
          if (u > v) std::swap(u, v);
          if (!skel.count({u, v})) vs.insert({u, mid, v});  // unshielded
        }
      }
    }
    return vs;
  };
  return v_structures(m1, nullptr, sk1) == v_structures(m2, &remap, sk1);
}

}  // namespace selbayes
