#include "selbayes/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>

#include "selbayes/io.hpp"
#include "selbayes/selection.hpp"
#include "selbayes/transform.hpp"
#include "selbayes/util.hpp"

namespace selbayes {

void RunReport::add(const std::string& key, const std::string& value) {
  fields.emplace_back(key, value);
}
void RunReport::add(const std::string& key, const char* value) {
  fields.emplace_back(key, std::string(value));
}
void RunReport::add(const std::string& key, double value) {
  fields.emplace_back(key, format_g12(value));
}
void RunReport::add(const std::string& key, std::int64_t value) {
  fields.emplace_back(key, std::to_string(value));
}
void RunReport::add(const std::string& key, std::uint64_t value) {
  fields.emplace_back(key, std::to_string(value));
}

std::string RunReport::text() const {
  std::string out = "selbayes report\n";
  for (const auto& [key, value] : fields) {
    out += key + ": " + value + "\n";
  }
  return out;
}

namespace {

bool log_enabled() {
  const char* env = std::getenv("SELBAYES_LOG");
  return env != nullptr && env[0] != '\0' && !(env[0] == '0' && env[1] == '\0');
}

std::string file_fingerprint(const std::string& path) {
  return to_hex16(fnv1a64(read_text_file(path)));
}

void add_input(RunReport& report, const std::string& key,
               const std::string& path) {
  report.add(key, path);
  report.add(key + ".fnv1a64", file_fingerprint(path));
}

std::string population_summary(const PopulationSpec& population) {
  if (population.m_f_prior.size() == 1) {
    return "point:" + std::to_string(population.m_f_prior.front().first);
  }
  std::string out = "table:";
  for (std::size_t i = 0; i < population.m_f_prior.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(population.m_f_prior[i].first) + "=" +
           format_g12(population.m_f_prior[i].second);
  }
  return out;
}

std::string archive_path_for(const std::string& out_path) {
  const auto dot = out_path.rfind('.');
  if (dot == std::string::npos || dot == 0) return out_path + ".archive";
  return out_path.substr(0, dot) + ".archive" + out_path.substr(dot);
}

struct CommonArgs {
  std::string network;
  std::string data;
  std::string out;
  std::uint64_t budget = std::uint64_t{1} << 20;
};

void run_score(const CommonArgs& args, const std::string& strategy_name,
               RunReport& report) {
  const NetworkSpecFile spec = load_network_spec(args.network);
  add_input(report, "network", args.network);
  Dataset data;
  std::int64_t unsampled_rows = 0;
  if (!args.data.empty()) {
    add_input(report, "data", args.data);
    LoadedDataset loaded = load_dataset(args.data, spec.structure);
    data = std::move(loaded.dataset);
    unsampled_rows = loaded.unsampled_rows;
  }
  const PopulationSpec population = combine_population(spec, unsampled_rows);
  const Strategy strategy = parse_strategy(strategy_name);
  report.add("strategy", strategy_name);
  report.add("budget", args.budget);
  report.add("m_T", data.num_cases());

  if (spec.structure.selection_variable() < 0) {
    const FamilyPrior prior = spec.priors.assemble(spec.structure, 0);
    const LogScore score = score_ancestral(spec.structure, prior, data);
    report.add("method", "direct");
    report.add("log_marginal_likelihood", score.value);
    return;
  }

  SelectionProblem problem{spec.structure, spec.priors, std::move(data),
                           population};
  report.add("m_F", population_summary(population));
  if (strategy == Strategy::Bic) {
    const BicScore bic =
        bic_heuristic_score(problem, problem.population.point_value());
    report.add("method", "bic");
    report.add("log_likelihood", bic.log_likelihood);
    report.add("param_count", bic.param_count);
    report.add("bic", bic.bic);
    report.add("log_marginal_likelihood", bic.bic);
    for (std::size_t i = 0; i < bic.diagnostics.size(); ++i) {
      report.add("diagnostic." + std::to_string(i), bic.diagnostics[i]);
    }
    return;
  }
  const LogScore score =
      marginal_likelihood(problem, strategy, EnumerationBudget{args.budget});
  report.add("method", score.method);
  report.add("log_marginal_likelihood", score.value);
}

void add_posterior_result(const PosteriorResult& result, RunReport& report) {
  report.add("structures", static_cast<std::int64_t>(result.ranked.size()));
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    const auto& entry = result.ranked[i];
    const std::string prefix = "rank." + std::to_string(i + 1);
    report.add(prefix + ".structure", entry.structure.canonical_encoding());
    report.add(prefix + ".log_marginal_likelihood",
               entry.log_marginal_likelihood);
    report.add(prefix + ".log_structure_prior", entry.log_structure_prior);
    report.add(prefix + ".posterior", entry.posterior);
    report.add(prefix + ".method", entry.method);
  }
  for (const auto& [p, c, prob] : result.edge_posteriors) {
    report.add("edge_posterior." + p + "->" + c, prob);
  }
}

void run_posterior(const CommonArgs& args, const std::string& constraints_path,
                   RunReport& report) {
  const NetworkSpecFile spec = load_network_spec(args.network);
  add_input(report, "network", args.network);
  add_input(report, "data", args.data);
  LoadedDataset loaded = load_dataset(args.data, spec.structure);
  SearchConstraints constraints;
  if (!constraints_path.empty()) {
    add_input(report, "constraints", constraints_path);
    constraints = load_constraints(constraints_path, spec.structure);
  }
  SelectionProblem problem{spec.structure, spec.priors,
                           std::move(loaded.dataset),
                           combine_population(spec, loaded.unsampled_rows)};
  report.add("budget", args.budget);
  report.add("m_T", problem.data.num_cases());
  report.add("m_F", population_summary(problem.population));
  const PosteriorResult result = exhaustive_posterior(
      problem, StructurePrior{}, constraints, EnumerationBudget{args.budget});
  add_posterior_result(result, report);
}

void run_search(const CommonArgs& args, const std::string& mode,
                const std::string& constraints_path, int restarts,
                std::uint64_t seed, bool seed_given, RunReport& report,
                std::ostream& err) {
  const NetworkSpecFile spec = load_network_spec(args.network);
  add_input(report, "network", args.network);
  add_input(report, "data", args.data);
  LoadedDataset loaded = load_dataset(args.data, spec.structure);
  SearchConstraints constraints;
  if (!constraints_path.empty()) {
    add_input(report, "constraints", constraints_path);
    constraints = load_constraints(constraints_path, spec.structure);
  }
  SelectionProblem problem{spec.structure, spec.priors,
                           std::move(loaded.dataset),
                           combine_population(spec, loaded.unsampled_rows)};
  report.add("mode", mode);
  report.add("budget", args.budget);
  report.add("m_T", problem.data.num_cases());
  report.add("m_F", population_summary(problem.population));

  if (mode == "exhaustive") {
    const PosteriorResult result = exhaustive_posterior(
        problem, StructurePrior{}, constraints, EnumerationBudget{args.budget});
    add_posterior_result(result, report);
    return;
  }
  if (mode != "greedy") {
    fail(ErrorKind::Precondition, "search mode must be exhaustive or greedy");
  }
  if (!seed_given) {
    fail(ErrorKind::Precondition, "greedy search requires --seed");
  }
  (void)err;
  report.add("restarts", static_cast<std::int64_t>(restarts));
  report.add("seed", seed);
  const GreedyResult result =
      greedy_search(problem, StructurePrior{}, constraints, restarts, seed,
                    EnumerationBudget{args.budget});
  report.add("best.structure", result.best.structure.canonical_encoding());
  report.add("best.log_marginal_likelihood",
             result.best.log_marginal_likelihood);
  report.add("best.log_structure_prior", result.best.log_structure_prior);
  report.add("best.method", result.best.method);
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    report.add("trace." + std::to_string(i), result.trace[i]);
  }
}

void run_simulate(const std::string& network_path, std::int64_t n,
                  const std::string& selection_path,
                  const std::string& manipulation_path, std::uint64_t seed,
                  const std::string& out_path, RunReport& report) {
  const NetworkSpecFile spec = load_network_spec(network_path);
  add_input(report, "network", network_path);
  if (!spec.generator.has_value()) {
    fail(ErrorKind::Precondition,
         "simulate needs a generating network ('cpts' in the network spec)");
  }
  report.add("n", n);
  report.add("seed", seed);

  // Stage seeds are derived from --seed so one flag pins the whole run:
  // forward sampling uses seed, manipulation seed+1, selection seed+2.
  Population population = forward_sample(*spec.generator, n, seed);
  if (!manipulation_path.empty()) {
    add_input(report, "manipulation", manipulation_path);
    const ManipulationDesign design =
        load_manipulation_design(manipulation_path);
    population = apply_manipulation(population, *spec.generator, design,
                                    seed + 1);
  }
  std::string mechanism_summary = "none";
  const int s = spec.structure.selection_variable();
  if (!selection_path.empty()) {
    add_input(report, "selection", selection_path);
    const SelectionMechanism mechanism =
        load_selection_mechanism(selection_path);
    population =
        apply_selection(population, *spec.generator, mechanism, seed + 2);
    mechanism_summary = mechanism.summary();
  } else if (s >= 0 && !population.cases.empty() &&
             population.cases.front()[s] == kMissing) {
    // No mechanism given: fall back to S's own conditional table.
    SelectionMechanism mechanistic;
    population =
        apply_selection(population, *spec.generator, mechanistic, seed + 2);
    mechanism_summary = "mechanistic";
  }
  report.add("mechanism", mechanism_summary);

  save_population(out_path, population,
                  {{"seed", std::to_string(seed)},
                   {"network", file_fingerprint(network_path)},
                   {"mechanism", mechanism_summary}});
  add_input(report, "population_out", out_path);
  if (s >= 0) {
    const auto& svar = spec.structure.variable(s);
    for (int k = 0; k < svar.arity(); ++k) {
      report.add("count.S=" + svar.states[k], population.count_state(s, k));
    }
  }
}

void run_project(const std::string& network_path,
                 const std::string& population_path,
                 const std::string& out_path, RunReport& report) {
  const NetworkSpecFile spec = load_network_spec(network_path);
  add_input(report, "network", network_path);
  add_input(report, "population", population_path);
  const Population population =
      load_population(population_path, spec.structure);
  const ProjectResult result = project(population);
  // The unsampled count rides along as explicit rows so the written file
  // is self-contained for scoring.
  write_text_file(out_path,
                  dataset_text(spec.structure, result.dataset,
                               result.population_spec.point_value()));
  const std::string archive = archive_path_for(out_path);
  save_population(archive, result.archive, {});
  report.add("m_T", result.dataset.num_cases());
  report.add("m_F", result.population_spec.point_value());
  add_input(report, "data_out", out_path);
  add_input(report, "archive_out", archive);
}

void run_reverse(const std::string& network_path, RunReport& report) {
  const NetworkSpecFile spec = load_network_spec(network_path);
  add_input(report, "network", network_path);
  const ReversalPlan plan = make_s_root(spec.structure);
  report.add("tree_valid", plan.tree_valid ? "true" : "false");
  report.add("reversals", static_cast<std::int64_t>(plan.reversed_edges.size()));
  for (std::size_t i = 0; i < plan.reversed_edges.size(); ++i) {
    report.add("reversal." + std::to_string(i + 1),
               plan.reversed_edges[i].first + "->" +
                   plan.reversed_edges[i].second);
  }
  report.add("result.structure", plan.result.canonical_encoding());
  report.add("param_count.original", parameter_count(spec.structure));
  report.add("param_count.result", parameter_count(plan.result));
}

void run_bic(const CommonArgs& args, RunReport& report) {
  const NetworkSpecFile spec = load_network_spec(args.network);
  add_input(report, "network", args.network);
  add_input(report, "data", args.data);
  LoadedDataset loaded = load_dataset(args.data, spec.structure);
  SelectionProblem problem{spec.structure, spec.priors,
                           std::move(loaded.dataset),
                           combine_population(spec, loaded.unsampled_rows)};
  const std::int64_t m_f = problem.population.point_value();
  report.add("m_T", problem.data.num_cases());
  report.add("m_F", m_f);
  const BicScore bic = bic_heuristic_score(problem, m_f);
  report.add("log_likelihood", bic.log_likelihood);
  report.add("param_count", bic.param_count);
  report.add("bic", bic.bic);
  for (std::size_t i = 0; i < bic.diagnostics.size(); ++i) {
    report.add("diagnostic." + std::to_string(i), bic.diagnostics[i]);
  }
}

void run_dsep(const std::string& network_path, const std::string& x,
              const std::string& y, const std::string& given,
              RunReport& report) {
  const NetworkSpecFile spec = load_network_spec(network_path);
  add_input(report, "network", network_path);
  std::vector<std::string> conditioning;
  std::string current;
  for (char c : given) {
    if (c == ',') {
      if (!current.empty()) conditioning.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) conditioning.push_back(current);
  report.add("x", x);
  report.add("y", y);
  report.add("given", given.empty() ? "(none)" : given);
  const bool separated = d_separated(spec.structure, x, y, conditioning);
  report.add("d_separated", separated ? "true" : "false");
}

}  // namespace

int execute(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Bayesian scoring and discovery of causal networks under "
               "selection"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string strategy = "auto";
  std::string constraints_path;
  std::string mode = "greedy";
  int restarts = 10;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  std::string selection_path, manipulation_path, population_path;
  std::string dsep_x, dsep_y, dsep_given;

  auto* score = app.add_subcommand("score", "Marginal likelihood of a structure");
  score->add_option("--network", common.network)->required();
  score->add_option("--data", common.data);
  score->add_option("--strategy", strategy)
      ->check(CLI::IsMember(
          {"auto", "full", "ancestral", "collapsed", "tree", "bic"}));
  score->add_option("--budget", common.budget);
  score->add_option("--out", common.out);

  auto* posterior = app.add_subcommand(
      "posterior", "Exhaustive normalized posterior over structures");
  posterior->add_option("--network", common.network)->required();
  posterior->add_option("--data", common.data)->required();
  posterior->add_option("--constraints", constraints_path);
  posterior->add_option("--budget", common.budget);
  posterior->add_option("--out", common.out);

  auto* search = app.add_subcommand("search", "Structure discovery");
  search->add_option("--network", common.network)->required();
  search->add_option("--data", common.data)->required();
  search->add_option("--mode", mode)
      ->check(CLI::IsMember({"exhaustive", "greedy"}));
  search->add_option("--restarts", restarts);
  auto* seed_opt = search->add_option("--seed", seed);
  search->add_option("--constraints", constraints_path);
  search->add_option("--budget", common.budget);
  search->add_option("--out", common.out);

  auto* simulate = app.add_subcommand("simulate", "Generate a population");
  simulate->add_option("--network", common.network)->required();
  simulate->add_option("--n", n)->required();
  simulate->add_option("--selection", selection_path);
  simulate->add_option("--manipulation", manipulation_path);
  simulate->add_option("--seed", seed)->required();
  simulate->add_option("--out", common.out)->required();

  auto* project_cmd =
      app.add_subcommand("project", "Project a population into a dataset");
  project_cmd->add_option("--network", common.network)->required();
  project_cmd->add_option("--population", population_path)->required();
  project_cmd->add_option("--out", common.out)->required();

  auto* reverse = app.add_subcommand("reverse", "Reverse arcs away from S");
  reverse->add_option("--network", common.network)->required();
  reverse->add_option("--out", common.out);

  auto* bic = app.add_subcommand("bic", "BIC heuristic score");
  bic->add_option("--network", common.network)->required();
  bic->add_option("--data", common.data)->required();
  bic->add_option("--out", common.out);

  auto* dsep = app.add_subcommand("dsep", "d-separation query");
  dsep->add_option("--network", common.network)->required();
  dsep->add_option("--x", dsep_x)->required();
  dsep->add_option("--y", dsep_y)->required();
  dsep->add_option("--given", dsep_given);

  // CLI11 wants argv-style input.
  std::vector<const char*> argv;
  argv.push_back("selbayes");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  RunReport report;
  std::string command_echo;
  for (const auto& a : args) {
    if (!command_echo.empty()) command_echo += ' ';
    command_echo += a;
  }
  report.add("command", command_echo);

  const auto started = std::chrono::steady_clock::now();
  try {
    if (score->parsed()) {
      run_score(common, strategy, report);
    } else if (posterior->parsed()) {
      run_posterior(common, constraints_path, report);
    } else if (search->parsed()) {
      run_search(common, mode, constraints_path, restarts, seed,
                 seed_opt->count() > 0, report, err);
    } else if (simulate->parsed()) {
      run_simulate(common.network, n, selection_path, manipulation_path, seed,
                   common.out, report);
    } else if (project_cmd->parsed()) {
      run_project(common.network, population_path, common.out, report);
    } else if (reverse->parsed()) {
      run_reverse(common.network, report);
    } else if (bic->parsed()) {
      run_bic(common, report);
    } else if (dsep->parsed()) {
      run_dsep(common.network, dsep_x, dsep_y, dsep_given, report);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Validation: return 2;
      case ErrorKind::Precondition: return 3;
      case ErrorKind::Budget: return 4;
      case ErrorKind::Io: return 5;
    }
    return 2;
  }

  if (log_enabled()) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - started);
    err << "[selbayes] wall_clock_us=" << elapsed.count() << "\n";
  }

  const std::string text = report.text();
  out << text;
  const bool want_out_file = !common.out.empty() && !simulate->parsed() &&
                             !project_cmd->parsed();
  if (want_out_file) write_text_file(common.out, text);
  return 0;
}

}  // namespace selbayes
