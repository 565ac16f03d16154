#include "mcnet/lp.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcnet {

int LpModel::AddVariable(double cost, std::string label) {
  cost_.push_back(cost);
  labels_.push_back(std::move(label));
  return num_variables() - 1;
}

int LpModel::AddRow(std::vector<std::pair<int, double>> terms, RowSense sense, double rhs,
                    std::string label) {
  rows_.push_back({std::move(terms), sense, rhs, std::move(label)});
  return num_rows() - 1;
}

std::string LpStatusName(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "?";
}

mpq_class Rationalize(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot rationalize a non-finite value");
  mpq_class exact(x);
  if (x == 0.0) return exact;
  const mpq_class tolerance = abs(exact) * mpq_class("1/1000000000000");
  // Continued-fraction convergents of the exact binary value.
  mpz_class h_prev = 1, h = 0, k_prev = 0, k = 1;
  mpq_class rest = exact;
  for (int step = 0; step < 64; ++step) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
    mpz_class h_next = a * h_prev + h;
    mpz_class k_next = a * k_prev + k;
    h = h_prev;
    k = k_prev;
    h_prev = h_next;
    k_prev = k_next;
    if (k_prev > 1000000) break;
    mpq_class candidate(h_prev, k_prev);
    candidate.canonicalize();
    if (abs(candidate - exact) <= tolerance) return candidate;
    rest -= a;
    if (rest == 0) break;
    rest = 1 / rest;
  }
  return exact;
}

namespace {

template <typename T>
struct Arith;

template <>
struct Arith<double> {
  static constexpr double kEps = 1e-9;
  static double From(double v) { return v; }
  static double ToDouble(double v) { return v; }
  static bool IsZero(double v) { return std::fabs(v) <= kEps; }
  static bool Positive(double v) { return v > kEps; }
  static bool Negative(double v) { return v < -kEps; }
  static std::string Text(double v) { return std::to_string(v); }
};

template <>
struct Arith<mpq_class> {
  static mpq_class From(double v) { return Rationalize(v); }
  static double ToDouble(const mpq_class& v) { return v.get_d(); }
  static bool IsZero(const mpq_class& v) { return sgn(v) == 0; }
  static bool Positive(const mpq_class& v) { return sgn(v) > 0; }
  static bool Negative(const mpq_class& v) { return sgn(v) < 0; }
  static std::string Text(const mpq_class& v) { return v.get_str(); }
};

template <typename T>
class Tableau {
  using A = Arith<T>;

 public:
  explicit Tableau(const LpModel& model) : model_(model) {
    m_ = model.num_rows();
    n_ = model.num_variables();
    flip_.assign(m_, 1);
    std::vector<RowSense> sense(m_);
    for (int r = 0; r < m_; ++r) {
      sense[r] = model.row(r).sense;
      if (model.row(r).rhs < 0) {
        flip_[r] = -1;
        if (sense[r] == RowSense::kLessEqual) {
          sense[r] = RowSense::kGreaterEqual;
        } else if (sense[r] == RowSense::kGreaterEqual) {
          sense[r] = RowSense::kLessEqual;
        }
      }
    }
    // Column layout: structural, then one slack/surplus per inequality, then
    // one artificial per >= or = row.
    int cols = n_;
    std::vector<int> slack(m_, -1), artificial(m_, -1);
    for (int r = 0; r < m_; ++r) {
      if (sense[r] != RowSense::kEqual) slack[r] = cols++;
    }
    first_artificial_ = cols;
    for (int r = 0; r < m_; ++r) {
      if (sense[r] != RowSense::kLessEqual) artificial[r] = cols++;
    }
    cols_ = cols;
    rhs_col_ = cols_;
    t_.assign(m_ + 1, std::vector<T>(cols_ + 1, T(0)));
    basis_.assign(m_, -1);
    unit_col_.assign(m_, -1);
    for (int r = 0; r < m_; ++r) {
      auto& row = t_[r + 1];
      for (auto [j, v] : model.row(r).terms) {
        if (j < 0 || j >= n_) throw std::out_of_range("LP term references an unknown variable");
        row[j] += A::From(v) * T(flip_[r]);
      }
      row[rhs_col_] = A::From(model.row(r).rhs) * T(flip_[r]);
      if (slack[r] >= 0) row[slack[r]] = sense[r] == RowSense::kLessEqual ? T(1) : T(-1);
      if (artificial[r] >= 0) row[artificial[r]] = T(1);
      unit_col_[r] = sense[r] == RowSense::kLessEqual ? slack[r] : artificial[r];
      basis_[r] = unit_col_[r];
    }
  }

  LpSolution Solve() {
    LpSolution sol;
    sol.exact = std::is_same_v<T, mpq_class>;
    // Phase 1: minimize the sum of artificials.
    std::vector<T> phase1(cols_, T(0));
    for (int j = first_artificial_; j < cols_; ++j) phase1[j] = T(1);
    SetObjective(phase1);
    blocked_from_ = cols_;
    RunSimplex();
    const T infeasibility = -t_[0][rhs_col_];
    if (A::Positive(infeasibility)) {
      sol.status = LpStatus::kInfeasible;
      sol.farkas.assign(m_, 0.0);
      for (int r = 0; r < m_; ++r) {
        const T pi = phase1[unit_col_[r]] - t_[0][unit_col_[r]];
        sol.farkas[r] = -A::ToDouble(pi) * flip_[r];
      }
      sol.pivots = pivots_;
      return sol;
    }
    DriveOutArtificials();
    // Phase 2.
    std::vector<T> cost(cols_, T(0));
    const T sign = model_.maximize() ? T(-1) : T(1);
    for (int j = 0; j < n_; ++j) cost[j] = sign * A::From(model_.cost(j));
    SetObjective(cost);
    blocked_from_ = first_artificial_;
    if (!RunSimplex()) {
      sol.status = LpStatus::kUnbounded;
      sol.pivots = pivots_;
      return sol;
    }
    sol.status = LpStatus::kOptimal;
    const T z = -t_[0][rhs_col_];
    const T objective = model_.maximize() ? T(-z) : z;
    sol.objective = A::ToDouble(objective);
    sol.objective_exact = A::Text(objective);
    sol.x.assign(n_, 0.0);
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < n_) sol.x[basis_[r]] = A::ToDouble(t_[r + 1][rhs_col_]);
    }
    sol.duals.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      const T pi = cost[unit_col_[r]] - t_[0][unit_col_[r]];
      sol.duals[r] = A::ToDouble(pi) * flip_[r] * (model_.maximize() ? -1.0 : 1.0);
    }
    sol.pivots = pivots_;
    return sol;
  }

 private:
  void SetObjective(const std::vector<T>& cost) {
    auto& z = t_[0];
    for (int j = 0; j <= cols_; ++j) z[j] = j < cols_ ? cost[j] : T(0);
    for (int r = 0; r < m_; ++r) {
      const T cb = cost[basis_[r]];
      if (A::IsZero(cb)) continue;
      const auto& row = t_[r + 1];
      for (int j = 0; j <= cols_; ++j) {
        if (!A::IsZero(row[j])) z[j] -= cb * row[j];
      }
    }
  }

  // Returns false when unbounded.
  bool RunSimplex() {
    int degenerate_streak = 0;
    for (;;) {
      const bool bland = degenerate_streak >= 50;
      int enter = -1;
      for (int j = 0; j < blocked_from_; ++j) {
        if (!A::Negative(t_[0][j])) continue;
        if (enter < 0 || (!bland && t_[0][j] < t_[0][enter])) enter = j;
        if (bland) break;
      }
      if (enter < 0) return true;
      int leave = -1;
      T best_ratio(0);
      for (int r = 0; r < m_; ++r) {
        const T& a = t_[r + 1][enter];
        if (!A::Positive(a)) continue;
        const T ratio = t_[r + 1][rhs_col_] / a;
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return false;
      degenerate_streak = A::IsZero(best_ratio) ? degenerate_streak + 1 : 0;
      Pivot(leave, enter);
    }
  }

  void Pivot(int r, int j) {
    ++pivots_;
    auto& prow = t_[r + 1];
    const T inv = T(1) / prow[j];
    nonzero_.clear();
    for (int c = 0; c <= cols_; ++c) {
      if (A::IsZero(prow[c])) {
        prow[c] = T(0);
        continue;
      }
      prow[c] *= inv;
      nonzero_.push_back(c);
    }
    for (int i = 0; i <= m_; ++i) {
      if (i == r + 1) continue;
      auto& row = t_[i];
      if (A::IsZero(row[j])) continue;
      const T factor = row[j];
      for (int c : nonzero_) row[c] -= factor * prow[c];
      row[j] = T(0);
    }
    basis_[r] = j;
  }

  void DriveOutArtificials() {
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < first_artificial_) continue;
      for (int j = 0; j < first_artificial_; ++j) {
        if (!A::IsZero(t_[r + 1][j])) {
          Pivot(r, j);
          break;
        }
      }
      // Otherwise the row is redundant; its artificial stays basic at zero
      // and never changes since the row has no structural entries.
    }
  }

  const LpModel& model_;
  int m_ = 0, n_ = 0, cols_ = 0, rhs_col_ = 0, first_artificial_ = 0, blocked_from_ = 0;
  std::vector<int> flip_;
  std::vector<std::vector<T>> t_;
  std::vector<int> basis_;
  std::vector<int> unit_col_;
  std::vector<int> nonzero_;
  int64_t pivots_ = 0;
};

}  // namespace

LpSolution SolveLp(const LpModel& model, LpArithmetic arithmetic) {
  const bool exact = arithmetic == LpArithmetic::kExact ||
                     (arithmetic == LpArithmetic::kAuto && model.num_variables() < kExactVariableLimit);
  if (exact) return Tableau<mpq_class>(model).Solve();
  return Tableau<double>(model).Solve();
}

}  // namespace mcnet
