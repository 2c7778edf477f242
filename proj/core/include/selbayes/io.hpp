#ifndef SELBAYES_IO_HPP
#define SELBAYES_IO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selbayes/dataset.hpp"
#include "selbayes/graph.hpp"
#include "selbayes/priors.hpp"
#include "selbayes/search.hpp"
#include "selbayes/simulate.hpp"

namespace selbayes {

// Parsed network specification document (JSON, UTF-8).  Parsers reject
// unknown fields and report every validation problem, not just the first.
// The exact schema is documented in the README.
struct NetworkSpecFile {
  NetworkStructure structure;
  std::optional<GeneratingNetwork> generator;  // present when "cpts" is given
  PriorSpec priors;                            // default: bde, uniform P0, ess 1
  PopulationSpec population;                   // default: point mass at 0
  bool population_declared = false;
};

NetworkSpecFile load_network_spec(const std::string& path);
NetworkSpecFile parse_network_spec(const std::string& json_text,
                                   const std::string& origin);

// Dataset file: comma-separated, header row of variable names (order
// free), one case per row, `?` for missing values.  Rows carrying the
// unsampled selection state are converted into population increments.
struct LoadedDataset {
  Dataset dataset;
  std::int64_t unsampled_rows = 0;
};
LoadedDataset load_dataset(const std::string& path,
                           const NetworkStructure& structure);
LoadedDataset parse_dataset(const std::string& text,
                            const NetworkStructure& structure,
                            const std::string& origin);
// Renders a dataset; `unsampled_rows` appends that many explicit
// unsampled rows (S at its unsampled state, everything unknown as `?`),
// which the loader converts back into population increments.
std::string dataset_text(const NetworkStructure& structure,
                         const Dataset& dataset,
                         std::int64_t unsampled_rows = 0);

// Population in force for a scoring run: the spec's declaration plus any
// unsampled rows found in the data file.
PopulationSpec combine_population(const NetworkSpecFile& spec,
                                  std::int64_t unsampled_rows);

SearchConstraints load_constraints(const std::string& path,
                                   const NetworkStructure& structure);
SelectionMechanism load_selection_mechanism(const std::string& path);
ManipulationDesign load_manipulation_design(const std::string& path);

// Population files share the dataset format with no missing cells, plus
// `# key=value` comment headers (seed, network fingerprint, mechanism).
std::string population_text(
    const Population& population,
    const std::vector<std::pair<std::string, std::string>>& comments);
void save_population(
    const std::string& path, const Population& population,
    const std::vector<std::pair<std::string, std::string>>& comments);
Population load_population(const std::string& path,
                           const NetworkStructure& structure);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace selbayes

#endif  // SELBAYES_IO_HPP
