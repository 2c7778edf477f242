#ifndef SELBAYES_CLI_HPP
#define SELBAYES_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace selbayes {

// Deterministic, machine-parseable run report: ordered `key: value`
// lines.  Every numeric value is rendered with 12 significant digits.
// Identical invocations over identical inputs produce identical bytes;
// wall-clock timing goes to stderr (SELBAYES_LOG), never into the report.
struct RunReport {
  std::vector<std::pair<std::string, std::string>> fields;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value);
  void add(const std::string& key, double value);
  void add(const std::string& key, std::int64_t value);
  void add(const std::string& key, std::uint64_t value);
  std::string text() const;
};

// Runs one subcommand (score, posterior, search, simulate, project,
// reverse, bic, dsep).  The report is written to `out` and, with --out,
// to the named file.  Returns the exit code: 0 success, 1 usage, 2
// validation, 3 precondition, 4 budget, 5 I/O.
int execute(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace selbayes

#endif  // SELBAYES_CLI_HPP
