#ifndef SELBAYES_UTIL_HPP
#define SELBAYES_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace selbayes {

// Broad failure categories; the CLI maps them to exit codes.
enum class ErrorKind {
  Validation,    // malformed structures, priors, files
  Precondition,  // an operation's contract was violated by the caller
  Budget,        // an enumeration would exceed the term budget
  Io,            // file system / parse failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log-sum-exp with max shifting.  Terms must be fed in a fixed
// order for bit-stable results; every summation site in this library
// iterates completions lexicographically.
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (count_ == 0 || log_term > max_) {
      sum_ = (count_ == 0) ? 1.0 : sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
    ++count_;
  }
  double value() const { return count_ == 0 ? kNegInf : max_ + std::log(sum_); }
  std::size_t count() const { return count_; }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
  std::size_t count_ = 0;
};

inline double log_sum_exp(const std::vector<double>& log_terms) {
  LogSumExp acc;
  for (double t : log_terms) acc.add(t);
  return acc.value();
}

// FNV-1a, used for input-file fingerprints in run reports.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string to_hex16(std::uint64_t value);

// All numeric CLI output goes through this: 12 significant digits.
std::string format_g12(double value);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

}  // namespace selbayes

#endif  // SELBAYES_UTIL_HPP
