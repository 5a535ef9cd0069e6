#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace engine {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPivotTol = 1e-9;
inline constexpr double kFeasTol = 1e-6;

// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  void append_row(const std::vector<double>& values);
  void append_col(const std::vector<double>& values);
  Matrix transposed() const;

  bool operator==(const Matrix& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Sense { Maximize, Minimize };
enum class RowSense { LessEqual, GreaterEqual, Equal };

struct LinearProgram {
  Sense sense = Sense::Maximize;
  std::vector<double> objective;
  Matrix constraint_matrix;
  std::vector<RowSense> constraint_senses;
  std::vector<double> rhs;
  std::vector<double> var_lower;
  std::vector<double> var_upper;
  // Constant added to every objective evaluation.
  double objective_offset = 0.0;
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;

  std::size_t num_rows() const { return rhs.size(); }
  std::size_t num_cols() const { return objective.size(); }

  std::size_t add_variable(double cost, double lower = 0.0, double upper = kInf, std::string name = {});
  std::size_t add_row(const std::vector<double>& coeffs, RowSense rs, double rhs_value, std::string name = {});

  // Throws EngineError(DimensionMismatch) on any shape or bound violation.
  void validate() const;

  double evaluate(const std::vector<double>& x) const;
  double row_activity(std::size_t r, const std::vector<double>& x) const;
  // Largest violation over rows and bounds (0 when feasible).
  double max_violation(const std::vector<double>& x) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus s);

// Dual sign convention: dual[i] multiplies row i as written when the row
// is "natural" for the sense (<= for max, >= for min) or an equality, and
// multiplies the negated row otherwise, so inequality duals are >= 0.
struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::optional<std::vector<double>> primal;
  std::optional<std::vector<double>> dual;
  std::optional<double> objective_value;
  std::size_t iterations = 0;
  // Infeasible: Farkas multipliers over rows (same convention as dual).
  // Unbounded: improving ray in the original variable space.
  std::optional<std::vector<double>> certificate;

  bool operator==(const LpOutcome&) const = default;
};

LpOutcome solve_lp(const LinearProgram& lp);

// Canonical max <c,x> s.t. Ax <= b, x >= 0 paired with
// min <b,y> s.t. A^T y >= c, y >= 0. Bounds, >= and = rows, free variables
// and minimisation are rewritten into that form first.
LinearProgram build_dual(const LinearProgram& primal);

std::pair<LpOutcome, LpOutcome> solve_dual_pair(const LinearProgram& primal);

bool check_duality_certificate(const LinearProgram& lp, const std::vector<double>& primal,
                               const std::vector<double>& dual);

// Dual objective implied by `dual` (with bound terms); nullopt if dual
// infeasible beyond tolerance.
std::optional<double> dual_objective(const LinearProgram& lp, const std::vector<double>& dual);

void write_mps(std::ostream& os, const LinearProgram& lp, const std::string& name = "ENGINE");
std::string to_mps(const LinearProgram& lp, const std::string& name = "ENGINE");

}  // namespace engine
