#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace emob::lp {

class NumericalBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Sense { LessEq, Equal, GreaterEq };

struct RowEntry {
  int col = 0;
  double coef = 0.0;
};

// Sparse minimization model: min c'x subject to rows and column bounds.
// Infinite bounds are expressed with +-infinity.
struct LinearModel {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> integral;

  std::vector<std::vector<RowEntry>> rows;
  std::vector<Sense> senses;
  std::vector<double> rhs;

  int num_cols() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_column(double obj, double lo, double hi, bool integer);
  // Entries must reference existing columns; duplicates within a row are
  // rejected. Returns the row index.
  int add_row(Sense sense, double rhs_value, std::vector<RowEntry> entries);

  void validate() const;  // throws std::invalid_argument
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;
  std::vector<double> x;  // primal values per column, valid on Optimal
  long iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  long max_iterations = 2000000;  // hard cycling guard, throws past this
  int refactor_interval = 64;
};

// Two-phase bounded-variable revised simplex over the continuous relaxation;
// integrality flags are ignored here. Optional bound overrides replace the
// model's column bounds (used for branching) and must match num_cols.
LpResult solve_lp(const LinearModel& m, const SimplexOptions& opt = {},
                  const std::vector<double>* lower_override = nullptr,
                  const std::vector<double>* upper_override = nullptr);

}  // namespace emob::lp
