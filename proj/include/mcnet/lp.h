// Small linear programs solved by a dense two-phase simplex.
//
// Below kExactVariableLimit variables the tableau uses GMP rationals, so
// feasibility verdicts near a boundary cannot flip on round-off. Larger
// models fall back to doubles with a 1e-9 pivot tolerance.

#ifndef MCNET_LP_H_
#define MCNET_LP_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace mcnet {

inline constexpr int kExactVariableLimit = 5000;

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

struct LpRow {
  std::vector<std::pair<int, double>> terms;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
  std::string label;
};

// minimize (or maximize) c.x subject to rows, x >= 0.
class LpModel {
 public:
  int AddVariable(double cost, std::string label = {});
  int AddRow(std::vector<std::pair<int, double>> terms, RowSense sense, double rhs,
             std::string label = {});
  void set_maximize(bool maximize) { maximize_ = maximize; }

  int num_variables() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  bool maximize() const { return maximize_; }
  double cost(int j) const { return cost_[j]; }
  const std::string& variable_label(int j) const { return labels_[j]; }
  const LpRow& row(int r) const { return rows_[r]; }
  std::vector<LpRow>& mutable_rows() { return rows_; }

 private:
  std::vector<double> cost_;
  std::vector<std::string> labels_;
  std::vector<LpRow> rows_;
  bool maximize_ = false;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };
enum class LpArithmetic { kAuto, kExact, kFloat };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  bool exact = false;
  double objective = 0.0;
  std::string objective_exact;  // "p/q" when solved exactly
  std::vector<double> x;
  // Row duals at the optimum, in the model's sense (d objective / d rhs).
  std::vector<double> duals;
  // When infeasible: y with y_r >= 0 on <= rows, y_r <= 0 on >= rows,
  // y^T A >= 0 column-wise and y^T b < 0.
  std::vector<double> farkas;
  int64_t pivots = 0;
};

LpSolution SolveLp(const LpModel& model, LpArithmetic arithmetic = LpArithmetic::kAuto);

// Nearest fraction with denominator <= 1e6 when it matches x to 1e-12
// relative; otherwise the exact binary value. Lets decimal inputs such as
// 0.9 or 1/300 enter the exact solver as the numbers they were meant to be.
mpq_class Rationalize(double x);

std::string LpStatusName(LpStatus status);

}  // namespace mcnet

#endif  // MCNET_LP_H_
