#pragma once

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "m2x/rational.hpp"

namespace m2x {

// Dense two-phase primal simplex, templated so the branch-and-bound can run a
// double pass for guidance and an exact rational pass for every decision that
// matters. Structural variables are nonnegative; put free variables in as
// explicit +/- splits.

enum class LpStatus { optimal, infeasible, unbounded };

enum class RowType { le, eq, ge };

template <class Num>
struct LpRow {
  std::vector<std::pair<int, Num>> coeffs;  // (column, coefficient)
  RowType type = RowType::le;
  Num rhs{};
};

template <class Num>
struct LpProblem {
  int num_vars = 0;
  std::vector<Num> objective;  // minimize c.x ; resized to num_vars
  std::vector<LpRow<Num>> rows;

  int add_var(Num cost = Num{}) {
    objective.push_back(cost);
    return num_vars++;
  }
  void add_row(LpRow<Num> row) { rows.push_back(std::move(row)); }
};

template <class Num>
struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Num objective{};
  std::vector<Num> x;
};

namespace lp_detail {

template <class Num>
struct Tol {
  static bool neg(const Num& v) { return v < 0; }
  static bool pos(const Num& v) { return v > 0; }
  static bool zero(const Num& v) { return v == 0; }
};

template <>
struct Tol<double> {
  static constexpr double eps = 1e-9;
  static bool neg(double v) { return v < -eps; }
  static bool pos(double v) { return v > eps; }
  static bool zero(double v) { return v > -eps && v < eps; }
};

}  // namespace lp_detail

template <class Num>
class SimplexSolver {
 public:
  explicit SimplexSolver(const LpProblem<Num>& lp) : lp_(lp) { build(); }

  LpResult<Num> solve() {
    LpResult<Num> out;
    if (!phase1()) {
      out.status = LpStatus::infeasible;
      return out;
    }
    set_objective_phase2();
    if (!iterate()) {
      out.status = LpStatus::unbounded;
      return out;
    }
    out.status = LpStatus::optimal;
    out.x.assign(static_cast<std::size_t>(lp_.num_vars), Num{});
    for (int r = 0; r < m_; ++r)
      if (basis_[static_cast<std::size_t>(r)] < lp_.num_vars)
        out.x[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] =
            tab_[static_cast<std::size_t>(r)][static_cast<std::size_t>(rhs_)];
    out.objective = Num{};
    for (int j = 0; j < lp_.num_vars; ++j)
      out.objective += lp_.objective[static_cast<std::size_t>(j)] *
                       out.x[static_cast<std::size_t>(j)];
    return out;
  }

 private:
  using T = lp_detail::Tol<Num>;

  const LpProblem<Num>& lp_;
  int m_ = 0;           // rows
  int n_ = 0;           // columns excluding rhs
  int rhs_ = 0;         // rhs column index
  int art_begin_ = 0;   // first artificial column
  std::vector<std::vector<Num>> tab_;
  std::vector<Num> cost_;  // current objective row (reduced via pivots)
  Num cost_rhs_{};
  std::vector<int> basis_;
  bool in_phase1_ = true;

  void build() {
    m_ = static_cast<int>(lp_.rows.size());
    // count extra columns
    int slacks = 0;
    for (const auto& r : lp_.rows)
      if (r.type != RowType::eq) ++slacks;
    art_begin_ = lp_.num_vars + slacks;
    int artificials = 0;
    for (const auto& r : lp_.rows) {
      bool rhs_nonneg = !T::neg(r.rhs);
      // LE with nonnegative rhs gets a slack basis; everything else an
      // artificial
      if (!(r.type == RowType::le && rhs_nonneg) &&
          !(r.type == RowType::ge && !rhs_nonneg))
        ++artificials;
    }
    n_ = art_begin_ + artificials;
    rhs_ = n_;
    tab_.assign(static_cast<std::size_t>(m_),
                std::vector<Num>(static_cast<std::size_t>(n_) + 1, Num{}));
    basis_.assign(static_cast<std::size_t>(m_), -1);

    int slack_col = lp_.num_vars;
    int art_col = art_begin_;
    for (int r = 0; r < m_; ++r) {
      const auto& row = lp_.rows[static_cast<std::size_t>(r)];
      auto& t = tab_[static_cast<std::size_t>(r)];
      for (const auto& [col, val] : row.coeffs) {
        if (col < 0 || col >= lp_.num_vars)
          throw std::invalid_argument("LP row references unknown column");
        t[static_cast<std::size_t>(col)] += val;
      }
      t[static_cast<std::size_t>(rhs_)] = row.rhs;
      int sign = 1;  // after possible row negation
      if (T::neg(t[static_cast<std::size_t>(rhs_)])) {
        for (auto& v : t) v = -v;
        sign = -1;
      }
      RowType type = row.type;
      if (sign < 0) {
        if (type == RowType::le)
          type = RowType::ge;
        else if (type == RowType::ge)
          type = RowType::le;
      }
      if (type == RowType::le) {
        t[static_cast<std::size_t>(slack_col)] = Num(1);
        basis_[static_cast<std::size_t>(r)] = slack_col;
        ++slack_col;
      } else if (type == RowType::ge) {
        t[static_cast<std::size_t>(slack_col)] = Num(-1);
        ++slack_col;
        t[static_cast<std::size_t>(art_col)] = Num(1);
        basis_[static_cast<std::size_t>(r)] = art_col;
        ++art_col;
      } else {
        t[static_cast<std::size_t>(art_col)] = Num(1);
        basis_[static_cast<std::size_t>(r)] = art_col;
        ++art_col;
      }
    }
  }

  // phase-1 objective: minimize sum of artificials
  bool phase1() {
    in_phase1_ = true;
    cost_.assign(static_cast<std::size_t>(n_), Num{});
    cost_rhs_ = Num{};
    for (int j = art_begin_; j < n_; ++j) cost_[static_cast<std::size_t>(j)] = Num(1);
    // reduce cost row against the artificial basis
    for (int r = 0; r < m_; ++r) {
      int b = basis_[static_cast<std::size_t>(r)];
      if (b >= art_begin_) subtract_row(r, Num(1));
    }
    if (!iterate()) return false;  // phase 1 cannot be unbounded in theory
    // objective value is -cost_rhs_; infeasible when positive
    if (T::pos(-cost_rhs_)) return false;
    // drive remaining artificials out of the basis where possible
    for (int r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < art_begin_) continue;
      int enter = -1;
      for (int j = 0; j < art_begin_; ++j)
        if (!T::zero(tab_[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)])) {
          enter = j;
          break;
        }
      if (enter >= 0) pivot(r, enter);
      // otherwise the row is redundant; the artificial stays basic at zero
    }
    return true;
  }

  void set_objective_phase2() {
    in_phase1_ = false;
    cost_.assign(static_cast<std::size_t>(n_), Num{});
    cost_rhs_ = Num{};
    for (int j = 0; j < lp_.num_vars; ++j)
      cost_[static_cast<std::size_t>(j)] = lp_.objective[static_cast<std::size_t>(j)];
    for (int r = 0; r < m_; ++r) {
      int b = basis_[static_cast<std::size_t>(r)];
      if (b < lp_.num_vars &&
          !T::zero(lp_.objective[static_cast<std::size_t>(b)]))
        subtract_row(r, lp_.objective[static_cast<std::size_t>(b)]);
    }
  }

  void subtract_row(int r, const Num& factor) {
    const auto& t = tab_[static_cast<std::size_t>(r)];
    for (int j = 0; j < n_; ++j)
      if (!T::zero(t[static_cast<std::size_t>(j)]))
        cost_[static_cast<std::size_t>(j)] -= factor * t[static_cast<std::size_t>(j)];
    cost_rhs_ -= factor * t[static_cast<std::size_t>(rhs_)];
  }

  void pivot(int row, int col) {
    auto& pr = tab_[static_cast<std::size_t>(row)];
    Num pv = pr[static_cast<std::size_t>(col)];
    for (auto& v : pr) v /= pv;
    for (int r = 0; r < m_; ++r) {
      if (r == row) continue;
      Num f = tab_[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
      if (T::zero(f)) continue;
      auto& tr = tab_[static_cast<std::size_t>(r)];
      for (int j = 0; j <= n_; ++j)
        if (!T::zero(pr[static_cast<std::size_t>(j)]))
          tr[static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
    }
    Num cf = cost_[static_cast<std::size_t>(col)];
    if (!T::zero(cf)) {
      for (int j = 0; j < n_; ++j)
        if (!T::zero(pr[static_cast<std::size_t>(j)]))
          cost_[static_cast<std::size_t>(j)] -= cf * pr[static_cast<std::size_t>(j)];
      cost_rhs_ -= cf * pr[static_cast<std::size_t>(rhs_)];
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // returns false on unbounded
  bool iterate() {
    long degenerate_streak = 0;
    const long bland_after = 64;
    const long iter_cap = 200000;
    for (long it = 0; it < iter_cap; ++it) {
      bool bland = degenerate_streak >= bland_after;
      int enter = -1;
      if (bland) {
        for (int j = 0; j < limit_cols(); ++j)
          if (T::neg(cost_[static_cast<std::size_t>(j)])) {
            enter = j;
            break;
          }
      } else {
        // Dantzig: most negative reduced cost
        const Num* best = nullptr;
        for (int j = 0; j < limit_cols(); ++j) {
          const Num& c = cost_[static_cast<std::size_t>(j)];
          if (T::neg(c) && (!best || c < *best)) {
            best = &c;
            enter = j;
          }
        }
      }
      if (enter < 0) return true;  // optimal
      int leave = -1;
      Num best_ratio{};
      for (int r = 0; r < m_; ++r) {
        const Num& a = tab_[static_cast<std::size_t>(r)][static_cast<std::size_t>(enter)];
        if (!T::pos(a)) continue;
        Num ratio = tab_[static_cast<std::size_t>(r)][static_cast<std::size_t>(rhs_)] / a;
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio &&
             basis_[static_cast<std::size_t>(r)] <
                 basis_[static_cast<std::size_t>(leave)])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return false;  // unbounded
      bool degenerate = T::zero(
          tab_[static_cast<std::size_t>(leave)][static_cast<std::size_t>(rhs_)]);
      degenerate_streak = degenerate ? degenerate_streak + 1 : 0;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration cap exceeded");
  }

  // phase 1 may enter any column; phase 2 must not re-enter artificials
  int limit_cols() const { return in_phase1_ ? n_ : art_begin_; }
};

template <class Num>
LpResult<Num> solve_lp(const LpProblem<Num>& lp) {
  SimplexSolver<Num> solver(lp);
  return solver.solve();
}

}  // namespace m2x
