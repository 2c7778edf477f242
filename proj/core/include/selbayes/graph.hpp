#ifndef SELBAYES_GRAPH_HPP
#define SELBAYES_GRAPH_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "selbayes/util.hpp"

namespace selbayes {

enum class VarRole { Domain, Selection, Manipulation };

std::string to_string(VarRole role);

// A typed variable of a causal network.  Domain variables may be declared
// latent (never measured).  A selection variable has one distinguished
// "unsampled" state; all of its other states are sampled states.  A
// manipulation variable records the intended setting of its target and
// carries the target's states plus the extra state "ne" (not enrolled).
struct VariableSpec {
  std::string name;
  VarRole role = VarRole::Domain;
  std::vector<std::string> states;
  bool latent = false;        // meaningful for role == Domain only
  std::string target;         // role == Manipulation only
  int unsampled_state = -1;   // role == Selection only

  int arity() const { return static_cast<int>(states.size()); }
  // Index of `state` in `states`, or -1.
  int state_index(std::string_view state) const;
};

// Directed acyclic graph over a fixed list of variables.  Parent lists are
// kept sorted by declaration index; every query that returns sets or
// orders breaks ties by declaration order, so results are reproducible.
class NetworkStructure {
 public:
  NetworkStructure() = default;
  // Validates variable specs, resolves edge endpoints, rejects self-loops,
  // duplicate edges and cycles.
  NetworkStructure(std::vector<VariableSpec> variables,
                   const std::vector<std::pair<std::string, std::string>>& edges);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  const std::vector<VariableSpec>& variables() const { return vars_; }
  const VariableSpec& variable(int i) const { return vars_[i]; }
  const std::vector<int>& parents(int i) const { return parents_[i]; }

  // Index of a variable by name, or -1.
  int index_of(std::string_view name) const;
  // Like index_of but fails with the offending name.
  int require(std::string_view name) const;
  // Index of the selection variable, or -1 when the model has none.
  int selection_variable() const;

  bool has_edge(int parent, int child) const;
  // Edges ordered by (child, parent) declaration index.
  std::vector<std::pair<int, int>> edge_list() const;
  std::vector<std::vector<int>> children() const;

  // "A<-B,C;D<-A" with both families and parents in declaration order.
  // Used for search tie-breaking and cache keys.
  std::string canonical_encoding() const;

  // Returns a copy with the given parent lists (same variables).  The new
  // graph is re-validated for acyclicity.
  NetworkStructure with_parents(std::vector<std::vector<int>> parents) const;

 private:
  void check_acyclic() const;

  std::vector<VariableSpec> vars_;
  std::vector<std::vector<int>> parents_;
};

// A complete joint assignment, one state index per variable, aligned with
// the structure's declaration order.  -1 marks an unassigned value in the
// partial-assignment contexts that accept it.
using CaseAssignment = std::vector<int>;

// Structure plus conditional probability tables: cpts[i][j][k] is
// P(variable i = state k | parent configuration j).  Parent configurations
// are mixed-radix numbers over the parents in declaration order, first
// parent most significant.
struct GeneratingNetwork {
  NetworkStructure structure;
  std::vector<std::vector<std::vector<double>>> cpts;

  // Shape agreement and row normalization within 1e-12.
  void validate() const;
};

// Number of joint parent configurations of variable i.
std::int64_t parent_config_count(const NetworkStructure& structure, int i);
// Mixed-radix index of variable i's parent configuration in `assignment`
// (which must assign every parent of i).
int parent_config_index(const NetworkStructure& structure, int i,
                        const CaseAssignment& assignment);
// Inverse of parent_config_index: states of i's parents for config j.
std::vector<int> decode_parent_config(const NetworkStructure& structure, int i,
                                      std::int64_t j);

// Joint state spaces larger than this are refused rather than enumerated.
constexpr std::uint64_t kEnumerationCap = std::uint64_t{1} << 22;

// Transitive parent closure of `node`, excluding the node itself, sorted
// by declaration index.
std::vector<int> ancestors(const NetworkStructure& structure, int node);
std::vector<std::string> ancestors(const NetworkStructure& structure,
                                   std::string_view node);

// Parents before children; ties broken by declaration order.
std::vector<int> topological_order(const NetworkStructure& structure);

// True iff every path between x and y is blocked given the conditioning
// set, under the standard d-separation rules.
bool d_separated(const NetworkStructure& structure, int x, int y,
                 const std::vector<int>& given);
bool d_separated(const NetworkStructure& structure, std::string_view x,
                 std::string_view y, const std::vector<std::string>& given);

// Product over variables of P(x_i | parents) read from the tables.
double joint_probability(const GeneratingNetwork& network,
                         const CaseAssignment& assignment);

// Exact posterior over `query`'s states by full enumeration of the
// completions of `evidence` (-1 entries are unobserved).
std::vector<double> infer_conditional(const GeneratingNetwork& network,
                                      const CaseAssignment& evidence, int query,
                                      std::uint64_t enumeration_cap = kEnumerationCap);

// Number of free parameters: sum over variables of
// (arity - 1) * product of parent arities.
std::int64_t parameter_count(const NetworkStructure& structure);

// Same skeleton and same unshielded colliders.  Variables are matched by
// name; a mismatched variable set is an error.
bool markov_equivalent(const NetworkStructure& m1, const NetworkStructure& m2);

}  // namespace selbayes

#endif  // SELBAYES_GRAPH_HPP
