// Internal helper for the enumeration scorers: base counts from the
// sampled cases are scored once, then each summation term applies its
// completion's cell increments as a delta on top of the base score.  Not
// part of the installed API.
#ifndef SELBAYES_SRC_SCORE_TABLE_HPP
#define SELBAYES_SRC_SCORE_TABLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "selbayes/priors.hpp"
#include "selbayes/scoring.hpp"

namespace selbayes::detail {

struct Cell {
  int var;
  int config;
  int state;
};

class ScoreTable {
 public:
  ScoreTable(const FamilyPrior& prior, SufficientCounts base)
      : prior_(prior), base_(std::move(base)) {
    base_score_ = log_ch_score(base_, prior_).value;
    row_totals_.resize(base_.n.size());
    for (std::size_t i = 0; i < base_.n.size(); ++i) {
      row_totals_[i].resize(base_.n[i].size());
      for (std::size_t j = 0; j < base_.n[i].size(); ++j) {
        std::int64_t total = 0;
        for (std::int64_t c : base_.n[i][j]) total += c;
        row_totals_[i][j] = total;
      }
    }
  }

  double base_score() const { return base_score_; }

  void begin_term() { increments_.clear(); }

  void add_cell(const Cell& cell, std::int64_t count) {
    increments_.push_back({encode(cell), count});
  }

  void add_cells(const std::vector<Cell>& cells, std::int64_t count) {
    for (const Cell& c : cells) add_cell(c, count);
  }

  // Score delta of (base + increments) relative to base.
  double term_delta() {
    std::sort(increments_.begin(), increments_.end());
    double delta = 0.0;
    std::size_t pos = 0;
    while (pos < increments_.size()) {
      const std::uint64_t row_key = increments_[pos].first >> 16;
      const auto [i, j] = decode_row(row_key);
      const auto& arow = prior_.alpha[i][j];
      const auto& nrow = base_.n[i][j];
      double a_total = 0.0;
      for (double a : arow) a_total += a;
      std::int64_t row_add = 0;
      while (pos < increments_.size() && (increments_[pos].first >> 16) == row_key) {
        const int k = static_cast<int>(increments_[pos].first & 0xffff);
        std::int64_t add = increments_[pos].second;
        ++pos;
        while (pos < increments_.size() && (increments_[pos].first >> 16) == row_key &&
               static_cast<int>(increments_[pos].first & 0xffff) == k) {
          add += increments_[pos].second;
          ++pos;
        }
        if (add == 0) continue;
        row_add += add;
        const double at = arow[k] + static_cast<double>(nrow[k]);
        delta += std::lgamma(at + static_cast<double>(add)) - std::lgamma(at);
      }
      if (row_add != 0) {
        const double rt = a_total + static_cast<double>(row_totals_[i][j]);
        delta += std::lgamma(rt) - std::lgamma(rt + static_cast<double>(row_add));
      }
    }
    return delta;
  }

 private:
  static std::uint64_t encode(const Cell& c) {
    return (static_cast<std::uint64_t>(c.var) << 40) |
           (static_cast<std::uint64_t>(c.config) << 16) |
           static_cast<std::uint64_t>(c.state);
  }
  static std::pair<int, int> decode_row(std::uint64_t row_key) {
    return {static_cast<int>(row_key >> 24),
            static_cast<int>(row_key & 0xffffff)};
  }

  const FamilyPrior& prior_;
  SufficientCounts base_;
  double base_score_ = 0.0;
  std::vector<std::vector<std::int64_t>> row_totals_;
  std::vector<std::pair<std::uint64_t, std::int64_t>> increments_;
};

}  // namespace selbayes::detail

#endif  // SELBAYES_SRC_SCORE_TABLE_HPP
