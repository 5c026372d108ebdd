#include "crmot/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>

namespace crmot {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

CostMatrix::CostMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged cost matrix");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

namespace {

void check_entries(const CostMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (v != CostMatrix::kForbidden && !std::isfinite(v)) {
        throw std::invalid_argument("cost matrix entries must be finite or kForbidden");
      }
    }
  }
}

double sum_costs(const CostMatrix& m,
                 const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  double total = 0.0;
  for (auto [r, c] : pairs) total += m(r, c);
  return total;
}

// Lexicographic cost: rank counts unmatched endpoints (and forbidden use),
// cost carries the real-valued objective. Ordering compares rank first.
struct LexCost {
  std::int64_t rank = 0;
  double cost = 0.0;

  LexCost operator+(const LexCost& o) const { return {rank + o.rank, cost + o.cost}; }
  LexCost operator-(const LexCost& o) const { return {rank - o.rank, cost - o.cost}; }
  LexCost& operator+=(const LexCost& o) { return *this = *this + o; }
  LexCost& operator-=(const LexCost& o) { return *this = *this - o; }
  bool operator<(const LexCost& o) const {
    return rank != o.rank ? rank < o.rank : cost < o.cost;
  }
};

constexpr LexCost kInfinity{std::int64_t{1} << 60, 0.0};

// The square problem of size R + C: real rows x real cols carry the input
// costs; a real row paired with a dummy column (or a dummy row with a real
// column) leaves that endpoint unmatched at rank 1; dummy x dummy is free.
// Forbidden pairs get rank 3, which no optimum uses.
class PaddedProblem {
 public:
  explicit PaddedProblem(const CostMatrix& m) : m_(m), n_(m.rows() + m.cols()) {}

  std::size_t size() const { return n_; }

  LexCost at(std::size_t i, std::size_t j) const {
    const bool real_row = i < m_.rows();
    const bool real_col = j < m_.cols();
    if (real_row && real_col) {
      return m_.forbidden(i, j) ? LexCost{3, 0.0} : LexCost{0, m_(i, j)};
    }
    if (real_row != real_col) return {1, 0.0};
    return {0, 0.0};
  }

 private:
  const CostMatrix& m_;
  std::size_t n_;
};

struct DualSolution {
  std::vector<LexCost> u, v;          // row and column potentials
  std::vector<std::size_t> row_match;  // row -> col
  std::vector<std::size_t> col_match;  // col -> row
};

// Shortest augmenting path Hungarian method, O(n^3).
DualSolution hungarian(const PaddedProblem& a) {
  const std::size_t n = a.size();
  std::vector<LexCost> u(n + 1), v(n + 1), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInfinity);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      LexCost delta = kInfinity;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const LexCost cur = a.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  DualSolution s;
  s.u.assign(u.begin() + 1, u.end());
  s.v.assign(v.begin() + 1, v.end());
  s.row_match.assign(n, 0);
  s.col_match.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    s.row_match[p[j] - 1] = j - 1;
    s.col_match[j - 1] = p[j] - 1;
  }
  return s;
}

// Every optimal matching is a perfect matching of the tight-edge subgraph of
// any optimal dual. Walking real rows in order and keeping the smallest
// column that still admits a perfect matching yields the lexicographically
// smallest optimum.
class LexicographicRepair {
 public:
  LexicographicRepair(const PaddedProblem& a, DualSolution& s, std::size_t real_rows,
                      std::size_t real_cols, double eps)
      : a_(a), s_(s), rows_(real_rows), cols_(real_cols), eps_(eps),
        fixed_(a.size(), 0) {}

  void run() {
    // Columns past the current match are never better; a dummy match
    // (unmatched row) ranks after every real column.
    for (std::size_t i = 0; i < rows_; ++i) {
      const std::size_t current = s_.row_match[i];
      const std::size_t limit = current < cols_ ? current : cols_;
      for (std::size_t j = 0; j < limit; ++j) {
        if (tight(i, j) && reroute(i, j)) break;
      }
      fixed_[i] = 1;
    }
  }

 private:
  bool tight(std::size_t i, std::size_t j) const {
    const LexCost r = a_.at(i, j) - s_.u[i] - s_.v[j];
    return r.rank == 0 && std::abs(r.cost) <= eps_;
  }

  // Tries to move row i onto column j by rotating an alternating cycle of
  // tight edges through unfixed rows.
  bool reroute(std::size_t i, std::size_t j) {
    const std::size_t n = a_.size();
    const std::size_t start = s_.col_match[j];
    const std::size_t target = s_.row_match[i];
    if (fixed_[start]) return false;

    std::vector<std::size_t> via(n, n);  // column -> row that reached it
    std::vector<char> seen_row(n, 0);
    std::deque<std::size_t> queue{start};
    seen_row[start] = 1;
    bool found = false;
    while (!queue.empty() && !found) {
      const std::size_t r = queue.front();
      queue.pop_front();
      for (std::size_t c = 0; c < n; ++c) {
        if (c == j || via[c] != n || !tight(r, c)) continue;
        via[c] = r;
        if (c == target) {
          found = true;
          break;
        }
        const std::size_t next = s_.col_match[c];
        if (next == i || fixed_[next] || seen_row[next]) continue;
        seen_row[next] = 1;
        queue.push_back(next);
      }
    }
    if (!found) return false;

    std::size_t c = target;
    while (true) {
      const std::size_t r = via[c];
      const std::size_t old = s_.row_match[r];
      s_.row_match[r] = c;
      s_.col_match[c] = r;
      if (r == start) break;
      c = old;
    }
    s_.row_match[i] = j;
    s_.col_match[j] = i;
    return true;
  }

  const PaddedProblem& a_;
  DualSolution& s_;
  std::size_t rows_, cols_;
  double eps_;
  std::vector<char> fixed_;
};

}  // namespace

Assignment solve_lap(const CostMatrix& m) {
  check_entries(m);
  Assignment out;
  if (m.rows() == 0 || m.cols() == 0) return out;

  double scale = 1.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!m.forbidden(r, c)) scale = std::max(scale, std::abs(m(r, c)));
    }
  }

  const PaddedProblem padded(m);
  DualSolution solution = hungarian(padded);
  LexicographicRepair(padded, solution, m.rows(), m.cols(), 1e-9 * scale).run();

  for (std::size_t r = 0; r < m.rows(); ++r) {
    const std::size_t c = solution.row_match[r];
    if (c < m.cols() && !m.forbidden(r, c)) out.pairs.emplace_back(r, c);
  }
  out.total_cost = sum_costs(m, out.pairs);
  return out;
}

namespace {

class Enumerator {
 public:
  explicit Enumerator(const CostMatrix& m) : m_(m), col_used_(m.cols(), 0) {}

  Assignment run() {
    visit(0, 0.0);
    Assignment out;
    out.pairs = best_;
    out.total_cost = sum_costs(m_, best_);
    return out;
  }

 private:
  // Rows are visited in order, each trying columns ascending and then
  // "unmatched", so pair sets are generated in lexicographic order and the
  // first strict improvement is the lexicographically smallest optimum.
  void visit(std::size_t row, double cost) {
    const std::size_t remaining_rows = m_.rows() - row;
    const std::size_t free_cols = m_.cols() - current_.size();
    if (have_best_ && current_.size() + std::min(remaining_rows, free_cols) < best_.size()) {
      return;
    }
    if (row == m_.rows()) {
      const bool better = !have_best_ || current_.size() > best_.size() ||
                          (current_.size() == best_.size() && cost < best_cost_);
      if (better) {
        best_ = current_;
        best_cost_ = cost;
        have_best_ = true;
      }
      return;
    }
    for (std::size_t c = 0; c < m_.cols(); ++c) {
      if (col_used_[c] || m_.forbidden(row, c)) continue;
      col_used_[c] = 1;
      current_.emplace_back(row, c);
      visit(row + 1, cost + m_(row, c));
      current_.pop_back();
      col_used_[c] = 0;
    }
    visit(row + 1, cost);
  }

  const CostMatrix& m_;
  std::vector<char> col_used_;
  std::vector<std::pair<std::size_t, std::size_t>> current_, best_;
  double best_cost_ = 0.0;
  bool have_best_ = false;
};

}  // namespace

Assignment brute_force_lap(const CostMatrix& m) {
  check_entries(m);
  if (std::min(m.rows(), m.cols()) > kBruteForceLimit) {
    throw std::invalid_argument("brute_force_lap: instance exceeds the enumeration limit");
  }
  if (m.rows() == 0 || m.cols() == 0) return {};
  return Enumerator(m).run();
}

}  // namespace crmot
