#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace crmot {

// Dense R x C cost matrix. Entries equal to kForbidden mark pairs that may
// not be matched; every other entry must be finite.
class CostMatrix {
 public:
  static constexpr double kForbidden = std::numeric_limits<double>::infinity();

  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  CostMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  bool forbidden(std::size_t r, std::size_t c) const {
    return (*this)(r, c) == kForbidden;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // sorted by row
  double total_cost = 0.0;

  bool operator==(const Assignment&) const = default;
};

// Exact minimum-cost assignment. Among all partial matchings that avoid
// forbidden entries, picks those of maximum cardinality, then minimum total
// cost, then the lexicographically smallest pair set.
//
// Costs are compared with a relative tolerance of 1e-9 when deciding ties,
// so integer-valued matrices are solved exactly.
Assignment solve_lap(const CostMatrix& m);

// Exhaustive reference solver with the same objective and tie-break.
// Throws std::invalid_argument when min(rows, cols) > kBruteForceLimit.
inline constexpr std::size_t kBruteForceLimit = 8;
Assignment brute_force_lap(const CostMatrix& m);

}  // namespace crmot
