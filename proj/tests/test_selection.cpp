#include <doctest.h>

#include <cmath>

#include "selbayes/rng.hpp"
#include "selbayes/selection.hpp"
#include "selbayes/transform.hpp"
#include "support/helpers.hpp"

using namespace selbayes;
using namespace selbayes::testing;

namespace {

// Explicit-prior problem over binary X -> S.
SelectionProblem x_to_s_problem(std::int64_t m_f) {
  NetworkStructure structure({binary("X"), selection_tf()}, {{"X", "S"}});
  PriorSpec priors;
  priors.mode = PriorMode::Explicit;
  FamilyPrior tables;
  tables.alpha = {{{1.0, 1.0}}, {}};
  priors.tables = tables;
  SelectionPriorSpec selection;
  for (std::int64_t m = 0; m <= 6; ++m) {
    selection.per_m_f[m] = {{2.0, {0.75, 0.25}}, {2.0, {0.25, 0.75}}};
  }
  priors.selection = selection;
  SelectionProblem problem;
  problem.structure = structure;
  problem.priors = priors;
  problem.data.rows = {{0, 0}};  // one sampled case: X=T, S=T
  problem.population = PopulationSpec::point(m_f);
  return problem;
}

// Random explicit-prior selection problem used by the cross-method checks.
SelectionProblem random_problem(Rng& rng, int num_domain, std::int64_t max_m_t,
                                std::int64_t m_f) {
  std::vector<std::string> names;
  for (int i = 0; i < num_domain; ++i) names.push_back("X" + std::to_string(i));
  NetworkStructure domain = random_domain_dag(names, rng, 0.5);

  std::vector<VariableSpec> vars = domain.variables();
  vars.push_back(selection_tf());
  std::vector<std::pair<std::string, std::string>> edges;
  for (auto [p, c] : domain.edge_list()) {
    edges.push_back({domain.variable(p).name, domain.variable(c).name});
  }
  const int num_parents = 1 + static_cast<int>(rng.below(2));
  std::vector<int> pool(num_domain);
  for (int i = 0; i < num_domain; ++i) pool[i] = i;
  rng.shuffle(pool);
  for (int k = 0; k < num_parents; ++k) {
    edges.push_back({names[pool[k]], "S"});
  }
  NetworkStructure structure(vars, edges);

  SelectionProblem problem;
  problem.structure = structure;
  problem.priors.mode = PriorMode::Explicit;
  FamilyPrior tables = random_explicit_prior(structure, rng);
  const int s = structure.require("S");
  SelectionPriorSpec selection;
  std::vector<SelectionPriorRow> rows;
  for (std::int64_t j = 0; j < parent_config_count(structure, s); ++j) {
    SelectionPriorRow row;
    double total = 0.0;
    row.means.resize(2);
    for (double& m : row.means) {
      m = 0.5 + 1.5 * rng.uniform01();
      total += m;
    }
    row.ess = total;
    for (double& m : row.means) m /= total;  // alpha = ess*means in [0.5, 2]
    rows.push_back(row);
  }
  selection.per_m_f[m_f] = rows;
  problem.priors.selection = selection;
  tables.alpha[s].clear();
  problem.priors.tables = std::move(tables);

  const std::int64_t m_t = 1 + static_cast<std::int64_t>(rng.below(max_m_t));
  for (std::int64_t t = 0; t < m_t; ++t) {
    CaseAssignment row(structure.num_variables());
    for (int i = 0; i < structure.num_variables(); ++i) {
      row[i] = static_cast<int>(rng.below(2));
    }
    row[s] = 0;  // sampled
    problem.data.rows.push_back(row);
  }
  problem.population = PopulationSpec::point(m_f);
  return problem;
}

std::vector<int> domain_vars_of(const NetworkStructure& structure) {
  std::vector<int> out;
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (structure.variable(i).role == VarRole::Domain) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("term counts") {
  // The worked scenario: five binary domain variables, m_F = 4, full sum
  // over 2^20 completions.
  std::vector<VariableSpec> vars;
  for (const char* n : {"X1", "X2", "X3", "X4", "X5"}) vars.push_back(binary(n));
  vars.push_back(selection_tf());
  NetworkStructure structure(vars, {{"X4", "S"}});
  SelectionProblem problem;
  problem.structure = structure;
  problem.population = PopulationSpec::point(4);
  CHECK(term_count(problem, TermCountMode::Full) == 1048576);
  CHECK(term_count(problem, TermCountMode::Full) == (std::uint64_t{1} << 20));

  CHECK(term_count(problem, TermCountMode::Full, 0) == 1);

  // Ancestral mode: only X4 is an ancestor, so 2^4 at m_F = 4.
  CHECK(term_count(problem, TermCountMode::Ancestral, 4) == 16);

  // Two binary ancestors at m_F = 3: 4^3.
  NetworkStructure two({binary("A"), binary("B"), binary("C"), selection_tf()},
                       {{"A", "B"}, {"B", "S"}});
  SelectionProblem p2;
  p2.structure = two;
  p2.population = PopulationSpec::point(3);
  CHECK(term_count(p2, TermCountMode::Ancestral, 3) == 64);

  CHECK_THROWS_WITH_AS(term_count(problem, TermCountMode::Full, 100'000'000),
                       "term count exceeds budget", Error);
}

TEST_CASE("full enumeration: m_F = 0 reduces to the sampled-cases score") {
  auto problem = x_to_s_problem(0);
  const auto full = score_full_enumeration(problem, 0, EnumerationBudget{});
  const auto direct = score_ancestral(
      problem.structure, problem.priors.assemble(problem.structure, 0),
      problem.data);
  CHECK(full.value == direct.value);
}

TEST_CASE("full enumeration matches the two-term hand sum") {
  // One sampled case (X=T, S=T), one unsampled case, binary X -> S.
  // alpha_X = (1,1); alpha_S rows: X=T -> (1.5, 0.5), X=F -> (0.5, 1.5).
  auto problem = x_to_s_problem(1);
  const double term_t = (1.0 / 2.0) * (1.5 / 2.0)     // sampled case
                        * (2.0 / 3.0) * (0.5 / 3.0);  // unsampled with X=T
  const double term_f = (1.0 / 2.0) * (1.5 / 2.0)
                        * (1.0 / 3.0) * (1.5 / 2.0);  // unsampled with X=F
  const auto got = score_full_enumeration(problem, 1, EnumerationBudget{});
  CHECK(got.value ==
        doctest::Approx(std::log(term_t + term_f)).epsilon(1e-12));

  // The generic prequential-product oracle agrees.
  const auto prior = problem.priors.assemble(problem.structure, 1);
  const double oracle = oracle_selection_log_score(
      problem.structure, prior, problem.data.rows, {0}, 1);
  CHECK(got.value == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("ancestral enumeration equals full when A covers everything") {
  auto problem = x_to_s_problem(2);
  const auto full = score_full_enumeration(problem, 2, EnumerationBudget{});
  const auto anc = score_ancestral_enumeration(problem, 2, EnumerationBudget{});
  CHECK(full.value == doctest::Approx(anc.value).epsilon(1e-12));
}

TEST_CASE("ancestral enumeration: S a root means no summation") {
  NetworkStructure structure({binary("X"), selection_tf()}, {{"S", "X"}});
  SelectionProblem problem;
  problem.structure = structure;
  problem.priors.mode = PriorMode::Explicit;
  FamilyPrior tables;
  tables.alpha = {{{1.0, 1.0}, {1.0, 1.0}}, {{1.5, 0.5}}};
  problem.priors.tables = tables;
  problem.data.rows = {{0, 0}, {1, 0}};
  problem.population = PopulationSpec::point(3);

  const auto got = score_ancestral_enumeration(problem, 3, EnumerationBudget{});
  // Hand product: sampled cases contribute S and X|S factors; each of the
  // three unsampled cases contributes only an S-family predictive factor.
  const double hand = std::log((1.5 / 2.0) * (1.0 / 2.0)    // case 1: S=T, X=T
                               * (2.5 / 3.0) * (1.0 / 3.0)  // case 2: S=T, X=F
                               * (0.5 / 4.0) * (1.5 / 5.0) * (2.5 / 6.0));
  CHECK(got.value == doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("ancestral enumeration: four-term hand check") {
  // m_F = 2 with one binary ancestor gives 2^2 = 4 completions.
  auto problem = x_to_s_problem(2);
  const auto prior = problem.priors.assemble(problem.structure, 2);
  const double oracle = oracle_selection_log_score(
      problem.structure, prior, problem.data.rows, {0}, 2);
  const auto got = score_ancestral_enumeration(problem, 2, EnumerationBudget{});
  CHECK(got.value == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("count-collapsed equals ordered enumeration") {
  auto p1 = x_to_s_problem(1);
  CHECK(score_count_collapsed(p1, 1, EnumerationBudget{}).value ==
        doctest::Approx(
            score_ancestral_enumeration(p1, 1, EnumerationBudget{}).value)
            .epsilon(1e-12));

  // m_F = 3 with one binary ancestor: 4 count vectors replace 8 ordered
  // completions.
  auto p3 = x_to_s_problem(3);
  CHECK(score_count_collapsed(p3, 3, EnumerationBudget{}).value ==
        doctest::Approx(
            score_ancestral_enumeration(p3, 3, EnumerationBudget{}).value)
            .epsilon(1e-9));

  auto p0 = x_to_s_problem(0);
  CHECK(score_count_collapsed(p0, 0, EnumerationBudget{}).value ==
        score_ancestral_enumeration(p0, 0, EnumerationBudget{}).value);
}

TEST_CASE("cross-method exactness on random instances") {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t m_f = static_cast<std::int64_t>(rng.below(4));
    auto problem = random_problem(rng, 3, 5, m_f);
    const EnumerationBudget budget;
    const double full = score_full_enumeration(problem, m_f, budget).value;
    const double anc = score_ancestral_enumeration(problem, m_f, budget).value;
    const double col = score_count_collapsed(problem, m_f, budget).value;
    CHECK(std::fabs(full - anc) <= 1e-9);
    CHECK(std::fabs(anc - col) <= 1e-9);
    const auto prior = problem.priors.assemble(problem.structure, m_f);
    const double oracle = oracle_selection_log_score(
        problem.structure, prior, problem.data.rows,
        domain_vars_of(problem.structure), m_f);
    CHECK(full == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("population mixture") {
  SUBCASE("point mass reproduces the single-m_F score exactly") {
    auto problem = x_to_s_problem(2);
    const auto single =
        score_ancestral_enumeration(problem, 2, EnumerationBudget{});
    const auto mixed = score_population_mixture(problem, EnumerationBudget{},
                                                Strategy::Ancestral);
    CHECK(mixed.value == single.value);
  }

  SUBCASE("uniform prior over {0} equals the sampled-cases-only score") {
    auto problem = x_to_s_problem(0);
    const auto mixed = score_population_mixture(problem, EnumerationBudget{});
    const auto sampled =
        score_ancestral_enumeration(problem, 0, EnumerationBudget{});
    CHECK(mixed.value == sampled.value);
  }

  SUBCASE("two-point prior matches the hand mixture") {
    auto problem = x_to_s_problem(1);
    problem.population = PopulationSpec::categorical({{1, 0.5}, {2, 0.5}});
    const double s1 =
        score_ancestral_enumeration(problem, 1, EnumerationBudget{}).value;
    const double s2 =
        score_ancestral_enumeration(problem, 2, EnumerationBudget{}).value;
    const double hand = std::log(0.5 * std::exp(s1) + 0.5 * std::exp(s2));
    const auto mixed = score_population_mixture(problem, EnumerationBudget{},
                                                Strategy::Ancestral);
    CHECK(mixed.value == doctest::Approx(hand).epsilon(1e-12));
    CHECK(mixed.method == "mixture[ancestral,ancestral]");
  }

  SUBCASE("candidates outside the selection prior coverage fail") {
    auto problem = x_to_s_problem(1);
    problem.population = PopulationSpec::categorical({{1, 0.5}, {40, 0.5}});
    CHECK_THROWS_AS(score_population_mixture(problem, EnumerationBudget{}),
                    Error);
  }
}

TEST_CASE("mixture over twenty seeded instances matches hand mixtures") {
  Rng rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    auto problem = random_problem(rng, 3, 4, 1);
    auto selection = *problem.priors.selection;
    selection.per_m_f[2] = selection.per_m_f[1];
    problem.priors.selection = selection;
    problem.population = PopulationSpec::categorical({{1, 0.3}, {2, 0.7}});
    const double s1 =
        score_ancestral_enumeration(problem, 1, EnumerationBudget{}).value;
    const double s2 =
        score_ancestral_enumeration(problem, 2, EnumerationBudget{}).value;
    const double hand = std::log(0.3 * std::exp(s1) + 0.7 * std::exp(s2));
    const double got =
        score_population_mixture(problem, EnumerationBudget{}).value;
    CHECK(got == doctest::Approx(hand).epsilon(1e-9));
  }
}

TEST_CASE("per-structure m_F tables are honored") {
  auto problem = x_to_s_problem(1);
  PopulationSpec population = PopulationSpec::point(1);
  population.per_structure[problem.structure.canonical_encoding()] = {{2, 1.0}};
  problem.population = population;
  const double got =
      marginal_likelihood(problem, Strategy::Ancestral, EnumerationBudget{})
          .value;
  const double want =
      score_ancestral_enumeration(problem, 2, EnumerationBudget{}).value;
  CHECK(got == want);
}

TEST_CASE("latent extension") {
  SUBCASE("empty latent set reduces to the ancestral enumeration") {
    auto problem = x_to_s_problem(2);
    CHECK(score_with_latents(problem, std::vector<int>{}, 2,
                             EnumerationBudget{})
              .value ==
          score_ancestral_enumeration(problem, 2, EnumerationBudget{}).value);
  }

  SUBCASE("one binary latent, one sampled case, m_F = 0: two-term sum") {
    VariableSpec latent = binary("L");
    latent.latent = true;
    NetworkStructure structure({latent, binary("Y"), selection_tf()},
                               {{"L", "Y"}});
    SelectionProblem problem;
    problem.structure = structure;
    problem.priors.mode = PriorMode::Explicit;
    FamilyPrior tables;
    tables.alpha = {{{1.0, 1.0}}, {{1.5, 0.5}, {0.5, 1.5}}, {{1.0, 1.0}}};
    problem.priors.tables = tables;
    problem.data.rows = {{kMissing, 0, 0}};
    problem.population = PopulationSpec::point(0);

    const double term_l_true = 0.5 * (1.5 / 2.0) * 0.5;
    const double term_l_false = 0.5 * (0.5 / 2.0) * 0.5;
    const auto got = score_with_latents(
        problem, std::vector<std::string>{"L"}, 0, EnumerationBudget{});
    CHECK(got.value ==
          doctest::Approx(std::log(term_l_true + term_l_false)).epsilon(1e-12));
    CHECK(got.method == "latent");
  }

  SUBCASE("latent variables with data are rejected") {
    VariableSpec latent = binary("L");
    latent.latent = true;
    NetworkStructure structure({latent, selection_tf()}, {});
    SelectionProblem problem;
    problem.structure = structure;
    problem.priors.mode = PriorMode::Explicit;
    FamilyPrior tables;
    tables.alpha = {{{1.0, 1.0}}, {{1.0, 1.0}}};
    problem.priors.tables = tables;
    problem.data.rows = {{0, 0}};
    problem.population = PopulationSpec::point(0);
    CHECK_THROWS_WITH_AS(
        score_with_latents(problem, std::vector<std::string>{"L"}, 0,
                           EnumerationBudget{}),
        "latent variable has data: 'L'", Error);
  }
}

TEST_CASE("latent extension cross-checked against composed enumeration") {
  VariableSpec latent = binary("L");
  latent.latent = true;
  NetworkStructure structure({latent, binary("X"), selection_tf()},
                             {{"L", "X"}, {"X", "S"}});
  SelectionProblem problem;
  problem.structure = structure;
  problem.priors.mode = PriorMode::Explicit;
  FamilyPrior tables;
  tables.alpha = {{{0.8, 1.2}},
                  {{1.5, 0.5}, {0.5, 1.5}},
                  {{1.2, 0.8}, {0.7, 1.3}}};
  problem.priors.tables = tables;
  problem.data.rows = {{kMissing, 0, 0}, {kMissing, 1, 0}};
  problem.population = PopulationSpec::point(1);

  const auto got = score_with_latents(problem, std::vector<std::string>{"L"},
                                      1, EnumerationBudget{});

  // Sum over the 4 joint latent completions of the sampled cases, each
  // scored by the unsampled-completion oracle over {L, X}.
  const auto prior = problem.priors.assemble(structure, 1);
  long double total = 0.0L;
  for (int l0 = 0; l0 < 2; ++l0) {
    for (int l1 = 0; l1 < 2; ++l1) {
      std::vector<CaseAssignment> rows = problem.data.rows;
      rows[0][0] = l0;
      rows[1][0] = l1;
      total += expl(static_cast<long double>(
          oracle_selection_log_score(structure, prior, rows, {0, 1}, 1)));
    }
  }
  CHECK(got.value ==
        doctest::Approx(static_cast<double>(logl(total))).epsilon(1e-9));
}

TEST_CASE("mixture-of-cases shape: latents, manipulation, multi-valued S") {
  // Three fatigue-clinic cases, two experimental, two randomly sampled
  // observational, two unsampled; X1 and X3 latent; X2 manipulated
  // through QX2.
  VariableSpec x1 = binary("X1");
  x1.latent = true;
  VariableSpec x3 = binary("X3");
  x3.latent = true;
  VariableSpec qx2;
  qx2.name = "QX2";
  qx2.role = VarRole::Manipulation;
  qx2.target = "X2";
  qx2.states = {"T", "F", "ne"};
  VariableSpec s;
  s.name = "S";
  s.role = VarRole::Selection;
  s.states = {"fc", "ex", "ob", "us"};
  s.unsampled_state = 3;

  NetworkStructure structure(
      {qx2, x1, binary("X2"), x3, binary("X4"), binary("X5"), s},
      {{"QX2", "X2"}, {"X1", "X2"}, {"X3", "X4"}, {"X4", "S"}});

  SelectionProblem problem;
  problem.structure = structure;
  problem.priors.mode = PriorMode::Explicit;
  FamilyPrior tables;
  tables.alpha.resize(structure.num_variables());
  for (int i = 0; i < structure.num_variables(); ++i) {
    if (structure.variable(i).name == "S") continue;
    tables.alpha[i].assign(
        parent_config_count(structure, i),
        std::vector<double>(structure.variable(i).arity(), 1.0));
  }
  problem.priors.tables = tables;
  SelectionPriorSpec selection;
  selection.per_m_f[2] = {{1.0, {0.55, 0.15, 0.2, 0.1}},
                          {1.0, {0.05, 0.15, 0.2, 0.6}}};
  problem.priors.selection = selection;

  const int ne = 2;
  auto row = [&](int q, int x2v, int x4, int x5, int sv) {
    CaseAssignment r(structure.num_variables(), kMissing);
    r[0] = q;
    r[2] = x2v;
    r[4] = x4;
    r[5] = x5;
    r[6] = sv;
    return r;
  };
  problem.data.rows = {
      row(ne, 1, 0, 0, 0), row(ne, 0, 0, 1, 0), row(ne, 1, 0, 1, 0),  // fc
      row(0, 0, 0, 0, 1),  row(1, 1, 1, 1, 1),                        // ex
      row(ne, 0, 1, 1, 2), row(ne, 1, 1, 1, 2),                       // ob
  };
  problem.population = PopulationSpec::point(2);

  const auto got = score_with_latents(
      problem, std::vector<std::string>{"X1", "X3"}, 2, EnumerationBudget{});
  CHECK(std::isfinite(got.value));
  CHECK(got.value < 0.0);
  const auto dispatched =
      marginal_likelihood(problem, Strategy::Auto, EnumerationBudget{});
  CHECK(dispatched.method == "latent");
  CHECK(dispatched.value == got.value);
}

TEST_CASE("multi-valued S against the full-enumeration oracle") {
  VariableSpec s;
  s.name = "S";
  s.role = VarRole::Selection;
  s.states = {"fc", "sc", "us"};
  s.unsampled_state = 2;
  NetworkStructure structure({binary("X1"), binary("X4"), s},
                             {{"X1", "X4"}, {"X4", "S"}});

  SelectionProblem problem;
  problem.structure = structure;
  problem.priors.mode = PriorMode::Explicit;
  FamilyPrior tables;
  tables.alpha = {{{1.0, 1.0}}, {{1.5, 0.5}, {0.5, 1.5}}, {}};
  problem.priors.tables = tables;
  SelectionPriorSpec selection;
  selection.per_m_f[2] = {{1.0, {0.6, 0.3, 0.1}}, {1.0, {0.1, 0.2, 0.7}}};
  problem.priors.selection = selection;
  problem.data.rows = {{0, 0, 0}, {1, 0, 0}, {0, 1, 1}, {1, 1, 1}, {0, 0, 1}};
  problem.population = PopulationSpec::point(2);

  const auto got =
      marginal_likelihood(problem, Strategy::Ancestral, EnumerationBudget{});
  const auto prior = problem.priors.assemble(structure, 2);
  const double oracle = oracle_selection_log_score(
      structure, prior, problem.data.rows, {0, 1}, 2);
  CHECK(got.value == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(got.method == "ancestral");
}

TEST_CASE("multi-valued S collapses to binary when only one state is used") {
  VariableSpec s3;
  s3.name = "S";
  s3.role = VarRole::Selection;
  s3.states = {"fc", "sc", "us"};
  s3.unsampled_state = 2;
  NetworkStructure m3({binary("X"), s3}, {{"X", "S"}});

  VariableSpec s2;
  s2.name = "S";
  s2.role = VarRole::Selection;
  s2.states = {"fc", "rest"};
  s2.unsampled_state = 1;
  NetworkStructure m2({binary("X"), s2}, {{"X", "S"}});

  SelectionProblem p3;
  p3.structure = m3;
  p3.priors.mode = PriorMode::Explicit;
  FamilyPrior t3;
  t3.alpha = {{{1.0, 1.0}}, {{0.7, 0.4, 0.9}, {0.3, 0.8, 0.9}}};
  p3.priors.tables = t3;
  p3.data.rows = {{0, 0}, {1, 0}, {0, 0}};
  p3.population = PopulationSpec::point(0);

  SelectionProblem p2;
  p2.structure = m2;
  p2.priors.mode = PriorMode::Explicit;
  FamilyPrior t2;
  t2.alpha = {{{1.0, 1.0}}, {{0.7, 1.3}, {0.3, 1.7}}};
  p2.priors.tables = t2;
  p2.data.rows = p3.data.rows;
  p2.population = PopulationSpec::point(0);

  CHECK(
      marginal_likelihood(p3, Strategy::Ancestral, EnumerationBudget{}).value ==
      doctest::Approx(
          marginal_likelihood(p2, Strategy::Ancestral, EnumerationBudget{})
              .value)
          .epsilon(1e-12));
}

TEST_CASE("S as a parent of domain variables") {
  // X -> S -> Y: children of S sit outside A, so the ancestral reduction
  // still applies for unsampled cases.
  NetworkStructure structure({binary("X"), binary("Y"), selection_tf()},
                             {{"X", "S"}, {"S", "Y"}});
  SelectionProblem problem;
  problem.structure = structure;
  problem.priors.mode = PriorMode::Explicit;
  FamilyPrior tables;
  tables.alpha = {{{1.0, 1.0}}, {{1.2, 0.8}, {0.6, 1.4}}, {}};
  problem.priors.tables = tables;
  SelectionPriorSpec selection;
  selection.per_m_f[2] = {{1.0, {0.8, 0.2}}, {1.0, {0.3, 0.7}}};
  problem.priors.selection = selection;
  problem.data.rows = {{0, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  problem.population = PopulationSpec::point(2);

  const double full =
      score_full_enumeration(problem, 2, EnumerationBudget{}).value;
  const double anc =
      score_ancestral_enumeration(problem, 2, EnumerationBudget{}).value;
  CHECK(std::fabs(full - anc) <= 1e-9);
}

TEST_CASE("selected-population dependence as d-separation facts") {
  NetworkStructure bprime(
      {binary("X2"), binary("X3"), binary("X4"), selection_tf()},
      {{"X2", "X4"}, {"X3", "X4"}, {"X4", "S"}});
  CHECK(d_separated(bprime, "X2", "X3", {}));
  CHECK_FALSE(d_separated(bprime, "X2", "X3", {"S"}));
}

TEST_CASE("auto strategy dispatch") {
  SUBCASE("S-root problems score identically under every exact strategy") {
    NetworkStructure structure({binary("X"), selection_tf()}, {{"S", "X"}});
    SelectionProblem problem;
    problem.structure = structure;  // bde priors by default
    problem.data.rows = {{0, 0}, {1, 0}};
    problem.population = PopulationSpec::point(3);
    const EnumerationBudget budget;
    const auto autod = marginal_likelihood(problem, Strategy::Auto, budget);
    CHECK(autod.method == "direct");
    for (Strategy strategy : {Strategy::Full, Strategy::Ancestral,
                              Strategy::Collapsed, Strategy::Tree}) {
      CHECK(std::fabs(marginal_likelihood(problem, strategy, budget).value -
                      autod.value) <= 1e-9);
    }
  }

  SUBCASE("tree-ancestor BDe problems take the tree fast path") {
    NetworkStructure structure({binary("X"), selection_tf()}, {{"X", "S"}});
    SelectionProblem problem;
    problem.structure = structure;
    problem.data.rows = {{0, 0}, {1, 0}};
    problem.population = PopulationSpec::point(2);
    const auto autod =
        marginal_likelihood(problem, Strategy::Auto, EnumerationBudget{});
    CHECK(autod.method == "tree");
    const auto anc =
        score_ancestral_enumeration(problem, 2, EnumerationBudget{});
    CHECK(std::fabs(autod.value - anc.value) <= 1e-9);
  }

  SUBCASE("budget exhaustion points to the bic strategy") {
    auto problem = x_to_s_problem(4);
    EnumerationBudget tiny{2};
    CHECK_THROWS_AS(marginal_likelihood(problem, Strategy::Auto, tiny), Error);
    try {
      marginal_likelihood(problem, Strategy::Auto, tiny);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Budget);
      CHECK(std::string(e.what()).find("bic") != std::string::npos);
    }
  }
}

TEST_CASE("selection-free reduction: ranking matches plain scoring") {
  // m_F = 0 and S a root with a fixed prior: ranking domain structures by
  // the selection-aware score equals ranking by the plain domain score.
  Rng rng(107);
  std::vector<std::vector<std::pair<std::string, std::string>>> domain_edges{
      {}, {{"A", "B"}}, {{"B", "A"}}};

  Dataset domain_data;
  for (int t = 0; t < 30; ++t) {
    const int a = static_cast<int>(rng.below(2));
    const int b = rng.bernoulli(a == 0 ? 0.85 : 0.2) ? 0 : 1;
    domain_data.rows.push_back({a, b});
  }

  std::vector<double> with_s, without_s;
  for (const auto& edges : domain_edges) {
    NetworkStructure domain({binary("A"), binary("B")}, edges);
    PriorSpec priors;
    without_s.push_back(
        score_ancestral(domain, priors.assemble(domain, 0), domain_data).value);

    NetworkStructure structure({binary("A"), binary("B"), selection_tf()},
                               edges);
    SelectionProblem problem;
    problem.structure = structure;
    for (const auto& row : domain_data.rows) {
      problem.data.rows.push_back({row[0], row[1], 0});
    }
    problem.population = PopulationSpec::point(0);
    with_s.push_back(
        marginal_likelihood(problem, Strategy::Auto, EnumerationBudget{})
            .value);
  }
  for (std::size_t i = 0; i < with_s.size(); ++i) {
    for (std::size_t j = 0; j < with_s.size(); ++j) {
      CHECK((with_s[i] < with_s[j]) == (without_s[i] < without_s[j]));
    }
  }
}

TEST_CASE("family decomposition matches the full score") {
  Rng rng(109);
  for (int trial = 0; trial < 10; ++trial) {
    auto problem = random_problem(rng, 3, 5, 2);
    const double whole =
        marginal_likelihood(problem, Strategy::Collapsed, EnumerationBudget{})
            .value;
    const int s = problem.structure.selection_variable();
    std::vector<bool> in_a(problem.structure.num_variables(), false);
    in_a[s] = true;
    for (int v : ancestors(problem.structure, s)) in_a[v] = true;
    double total = coupled_a_log_score(problem, 2, EnumerationBudget{});
    for (int i = 0; i < problem.structure.num_variables(); ++i) {
      if (!in_a[i]) total += family_log_score(problem, i, 2);
    }
    CHECK(whole == doctest::Approx(total).epsilon(1e-9));
  }
}
