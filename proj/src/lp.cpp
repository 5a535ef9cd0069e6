#include "engine/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "engine/errors.hpp"
#include "engine/kernels.hpp"

namespace engine {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
  rows_ = init.size();
  cols_ = rows_ ? init.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : init) {
    if (r.size() != cols_) throw EngineError(ErrorCode::DimensionMismatch, "ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

void Matrix::append_row(const std::vector<double>& values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw EngineError(ErrorCode::DimensionMismatch, "row length does not match matrix");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

void Matrix::append_col(const std::vector<double>& values) {
  if (values.size() != rows_) throw EngineError(ErrorCode::DimensionMismatch, "column length does not match matrix");
  std::vector<double> next(rows_ * (cols_ + 1));
  for (std::size_t r = 0; r < rows_; ++r) {
    std::copy(row(r), row(r) + cols_, next.begin() + static_cast<std::ptrdiff_t>(r * (cols_ + 1)));
    next[r * (cols_ + 1) + cols_] = values[r];
  }
  data_ = std::move(next);
  ++cols_;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::size_t LinearProgram::add_variable(double cost, double lower, double upper, std::string name) {
  objective.push_back(cost);
  var_lower.push_back(lower);
  var_upper.push_back(upper);
  if (!name.empty() || !col_names.empty()) {
    col_names.resize(objective.size() - 1);
    col_names.push_back(std::move(name));
  }
  constraint_matrix.append_col(std::vector<double>(constraint_matrix.rows(), 0.0));
  return objective.size() - 1;
}

std::size_t LinearProgram::add_row(const std::vector<double>& coeffs, RowSense rs, double rhs_value, std::string name) {
  if (coeffs.size() != num_cols()) throw EngineError(ErrorCode::DimensionMismatch, "row length does not match variable count");
  if (constraint_matrix.rows() == 0 && constraint_matrix.cols() != num_cols()) constraint_matrix = Matrix(0, num_cols());
  constraint_matrix.append_row(coeffs);
  constraint_senses.push_back(rs);
  rhs.push_back(rhs_value);
  if (!name.empty() || !row_names.empty()) {
    row_names.resize(rhs.size() - 1);
    row_names.push_back(std::move(name));
  }
  return rhs.size() - 1;
}

void LinearProgram::validate() const {
  const std::size_t m = rhs.size();
  const std::size_t n = objective.size();
  auto fail = [](const std::string& what) { throw EngineError(ErrorCode::DimensionMismatch, what); };
  if (constraint_senses.size() != m) fail("constraint_senses length differs from rhs length");
  if (m > 0 && constraint_matrix.rows() != m) fail("constraint_matrix rows differ from rhs length");
  if (m > 0 && constraint_matrix.cols() != n) fail("constraint_matrix cols differ from objective length");
  if (var_lower.size() != n || var_upper.size() != n) fail("variable bound vectors differ from objective length");
  if (!row_names.empty() && row_names.size() != m) fail("row_names length differs from row count");
  if (!col_names.empty() && col_names.size() != n) fail("col_names length differs from column count");
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(var_lower[j]) || std::isnan(var_upper[j]) || var_lower[j] > var_upper[j] ||
        var_lower[j] == kInf || var_upper[j] == -kInf)
      fail("invalid bounds on variable " + std::to_string(j));
    if (!std::isfinite(objective[j])) throw EngineError(ErrorCode::NumericalFailure, "non-finite objective coefficient");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(rhs[i])) throw EngineError(ErrorCode::NumericalFailure, "non-finite rhs");
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(constraint_matrix(i, j)))
        throw EngineError(ErrorCode::NumericalFailure, "non-finite constraint coefficient");
  }
}

double LinearProgram::evaluate(const std::vector<double>& x) const {
  return kernels::dot(objective.data(), x.data(), objective.size()) + objective_offset;
}

double LinearProgram::row_activity(std::size_t r, const std::vector<double>& x) const {
  return kernels::dot(constraint_matrix.row(r), x.data(), num_cols());
}

double LinearProgram::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < num_cols(); ++j) {
    worst = std::max(worst, var_lower[j] - x[j]);
    worst = std::max(worst, x[j] - var_upper[j]);
  }
  for (std::size_t i = 0; i < num_rows(); ++i) {
    const double a = row_activity(i, x);
    switch (constraint_senses[i]) {
      case RowSense::LessEqual: worst = std::max(worst, a - rhs[i]); break;
      case RowSense::GreaterEqual: worst = std::max(worst, rhs[i] - a); break;
      case RowSense::Equal: worst = std::max(worst, std::abs(a - rhs[i])); break;
    }
  }
  return worst;
}

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

namespace {

// max c'x' s.t. rows, x' >= 0; rows [0, orig_rows) mirror the original rows.
struct Canonical {
  enum class Map { Shift, Mirror, Split };
  struct VarMap {
    Map kind;
    std::size_t k;
    std::size_t k2;
    double base;
  };
  std::size_t n = 0;
  std::vector<double> c;
  Matrix a;
  std::vector<RowSense> senses;
  std::vector<double> b;
  double constant = 0.0;
  std::vector<VarMap> map;
  std::size_t orig_rows = 0;
  double sign = 1.0;

  std::vector<double> to_original(const std::vector<double>& xc, bool direction) const {
    std::vector<double> x(map.size());
    for (std::size_t j = 0; j < map.size(); ++j) {
      const VarMap& v = map[j];
      switch (v.kind) {
        case Map::Shift: x[j] = (direction ? 0.0 : v.base) + xc[v.k]; break;
        case Map::Mirror: x[j] = (direction ? 0.0 : v.base) - xc[v.k]; break;
        case Map::Split: x[j] = xc[v.k] - xc[v.k2]; break;
      }
    }
    return x;
  }
};

Canonical canonicalize(const LinearProgram& lp) {
  Canonical cf;
  const std::size_t m = lp.num_rows();
  const std::size_t n = lp.num_cols();
  cf.sign = lp.sense == Sense::Maximize ? 1.0 : -1.0;
  cf.map.resize(n);
  std::vector<std::size_t> ub_rows;
  for (std::size_t j = 0; j < n; ++j) {
    const double l = lp.var_lower[j];
    const double u = lp.var_upper[j];
    if (std::isfinite(l)) {
      cf.map[j] = {Canonical::Map::Shift, cf.n++, 0, l};
      if (std::isfinite(u)) ub_rows.push_back(j);
    } else if (std::isfinite(u)) {
      cf.map[j] = {Canonical::Map::Mirror, cf.n++, 0, u};
    } else {
      cf.map[j] = {Canonical::Map::Split, cf.n, cf.n + 1, 0.0};
      cf.n += 2;
    }
  }
  auto expand = [&](const double* coeffs, std::vector<double>& out, double& shift) {
    out.assign(cf.n, 0.0);
    shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = coeffs[j];
      if (v == 0.0) continue;
      const auto& mp = cf.map[j];
      switch (mp.kind) {
        case Canonical::Map::Shift: out[mp.k] += v; shift += v * mp.base; break;
        case Canonical::Map::Mirror: out[mp.k] -= v; shift += v * mp.base; break;
        case Canonical::Map::Split: out[mp.k] += v; out[mp.k2] -= v; break;
      }
    }
  };
  std::vector<double> scaled(n);
  for (std::size_t j = 0; j < n; ++j) scaled[j] = cf.sign * lp.objective[j];
  expand(scaled.data(), cf.c, cf.constant);

  cf.a = Matrix(0, cf.n);
  std::vector<double> row;
  double shift = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    expand(lp.constraint_matrix.row(i), row, shift);
    cf.a.append_row(row);
    cf.senses.push_back(lp.constraint_senses[i]);
    cf.b.push_back(lp.rhs[i] - shift);
  }
  cf.orig_rows = m;
  for (std::size_t j : ub_rows) {
    row.assign(cf.n, 0.0);
    row[cf.map[j].k] = 1.0;
    cf.a.append_row(row);
    cf.senses.push_back(RowSense::LessEqual);
    cf.b.push_back(lp.var_upper[j] - lp.var_lower[j]);
  }
  return cf;
}

// Dense two-phase tableau over a Canonical problem.
class Tableau {
 public:
  explicit Tableau(const Canonical& cf) : cf_(cf) {
    m_ = cf.b.size();
    std::size_t slacks = 0, arts = 0;
    flip_.assign(m_, 1.0);
    std::vector<RowSense> norm(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      RowSense s = cf.senses[i];
      if (cf.b[i] < 0.0) {
        flip_[i] = -1.0;
        if (s == RowSense::LessEqual) s = RowSense::GreaterEqual;
        else if (s == RowSense::GreaterEqual) s = RowSense::LessEqual;
      }
      norm[i] = s;
      if (s != RowSense::Equal) ++slacks;
      if (s != RowSense::LessEqual) ++arts;
    }
    ncols_ = cf.n + slacks + arts;
    width_ = ncols_ + 1;
    t_.assign(m_ * width_, 0.0);
    z1_.assign(width_, 0.0);
    z2_.assign(width_, 0.0);
    artificial_.assign(ncols_, false);
    basis_.assign(m_, 0);
    identity_.assign(m_, 0);
    std::size_t next_slack = cf.n;
    std::size_t next_art = cf.n + slacks;
    for (std::size_t i = 0; i < m_; ++i) {
      double* r = row(i);
      for (std::size_t k = 0; k < cf.n; ++k) r[k] = flip_[i] * cf.a(i, k);
      r[ncols_] = flip_[i] * cf.b[i];
      if (norm[i] == RowSense::LessEqual) {
        r[next_slack] = 1.0;
        basis_[i] = identity_[i] = next_slack++;
      } else {
        if (norm[i] == RowSense::GreaterEqual) r[next_slack++] = -1.0;
        r[next_art] = 1.0;
        artificial_[next_art] = true;
        basis_[i] = identity_[i] = next_art++;
        // Phase 1 maximises -sum(artificials): z1 = c_B B^-1 A - c.
        kernels::axpy(-1.0, r, z1_.data(), width_);
        z1_[identity_[i]] += 1.0;
      }
    }
    for (std::size_t k = 0; k < cf.n; ++k) z2_[k] = -cf.c[k];
    cap_ = 50 * (m_ + ncols_);
  }

  std::size_t iterations() const { return iterations_; }

  // Returns false if unbounded in the current phase.
  bool run(std::vector<double>& z, std::size_t* unbounded_col) {
    std::size_t degenerate = 0;
    for (;;) {
      const bool bland = degenerate >= 50;
      std::size_t enter = ncols_;
      double best = -kEnterTol;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (artificial_[j]) continue;
        if (z[j] < -kEnterTol) {
          if (bland) { enter = j; break; }
          if (z[j] < best) { best = z[j]; enter = j; }
        }
      }
      if (enter == ncols_) return true;

      std::size_t leave = m_;
      double ratio = kInf;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = row(i)[enter];
        if (a <= kPivotTol) continue;
        const double r = row(i)[ncols_] / a;
        bool take = false;
        if (leave == m_ || r < ratio - kTieTol) {
          take = true;
        } else if (r <= ratio + kTieTol) {
          if (bland) take = basis_[i] < basis_[leave];
          else {
            const double cur = row(leave)[enter];
            take = a > cur || (a == cur && basis_[i] < basis_[leave]);
          }
        }
        if (take) { leave = i; ratio = r; }
      }
      if (leave == m_) {
        if (unbounded_col) *unbounded_col = enter;
        return false;
      }
      if (++iterations_ > cap_)
        throw EngineError(ErrorCode::NumericalFailure, "simplex iteration cap exceeded");
      degenerate = ratio <= kTieTol ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
  }

  LpOutcome solve(const LinearProgram& lp) {
    LpOutcome out;
    run(z1_, nullptr);
    const double infeas = -z1_[ncols_];
    if (infeas > kFeasTol * std::max(1.0, rhs_scale())) {
      out.status = LpStatus::Infeasible;
      std::vector<double> y(m_);
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t id = identity_[i];
        y[i] = flip_[i] * (z1_[id] + (artificial_[id] ? -1.0 : 0.0));
      }
      out.certificate = report_duals(lp, y);
      out.iterations = iterations_;
      return out;
    }
    drive_out_artificials();
    std::size_t ucol = ncols_;
    if (!run(z2_, &ucol)) {
      out.status = LpStatus::Unbounded;
      std::vector<double> d(cf_.n, 0.0);
      if (ucol < cf_.n) d[ucol] = 1.0;
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] < cf_.n) d[basis_[i]] = -row(i)[ucol];
      out.certificate = cf_.to_original(d, true);
      out.iterations = iterations_;
      return out;
    }
    std::vector<double> xc(cf_.n, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < cf_.n) xc[basis_[i]] = std::max(0.0, row(i)[ncols_]);
    std::vector<double> x = cf_.to_original(xc, false);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j], lp.var_lower[j], lp.var_upper[j]);
    std::vector<double> y(m_);
    for (std::size_t i = 0; i < m_; ++i) y[i] = flip_[i] * z2_[identity_[i]];
    out.status = LpStatus::Optimal;
    out.objective_value = lp.evaluate(x);
    out.primal = std::move(x);
    out.dual = report_duals(lp, y);
    out.iterations = iterations_;
    return out;
  }

 private:
  static constexpr double kEnterTol = 1e-9;
  static constexpr double kTieTol = 1e-12;

  double* row(std::size_t i) { return t_.data() + i * width_; }

  double rhs_scale() const {
    double s = 0.0;
    for (double v : cf_.b) s = std::max(s, std::abs(v));
    return s * 1e-3;
  }

  void pivot(std::size_t p, std::size_t e) {
    double* pr = row(p);
    const double inv = 1.0 / pr[e];
    for (std::size_t k = 0; k < width_; ++k) pr[k] *= inv;
    pr[e] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == p) continue;
      double* r = row(i);
      const double f = r[e];
      if (f == 0.0) continue;
      kernels::axpy(-f, pr, r, width_);
      r[e] = 0.0;
    }
    for (std::vector<double>* z : {&z1_, &z2_}) {
      const double f = (*z)[e];
      if (f == 0.0) continue;
      kernels::axpy(-f, pr, z->data(), width_);
      (*z)[e] = 0.0;
    }
    basis_[p] = e;
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!artificial_[basis_[i]]) continue;
      double* r = row(i);
      std::size_t best = ncols_;
      double mag = kPivotTol;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (artificial_[j]) continue;
        if (std::abs(r[j]) > mag) { mag = std::abs(r[j]); best = j; }
      }
      if (best != ncols_) pivot(i, best);
    }
  }

  // Max-form row multipliers -> reported convention over original rows.
  std::vector<double> report_duals(const LinearProgram& lp, const std::vector<double>& y_int) const {
    std::vector<double> out(cf_.orig_rows);
    const bool maximize = lp.sense == Sense::Maximize;
    for (std::size_t i = 0; i < cf_.orig_rows; ++i) {
      const RowSense s = lp.constraint_senses[i];
      double sigma = 1.0;
      if (maximize && s == RowSense::GreaterEqual) sigma = -1.0;
      if (!maximize && s == RowSense::LessEqual) sigma = -1.0;
      const double v = (maximize ? 1.0 : -1.0) * sigma * y_int[i];
      out[i] = v == 0.0 ? 0.0 : v;
    }
    return out;
  }

  const Canonical& cf_;
  std::size_t m_ = 0;
  std::size_t ncols_ = 0;
  std::size_t width_ = 0;
  std::vector<double> t_;
  std::vector<double> z1_;
  std::vector<double> z2_;
  std::vector<bool> artificial_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> identity_;
  std::vector<double> flip_;
  std::size_t iterations_ = 0;
  std::size_t cap_ = 0;
};

double sigma_for(Sense sense, RowSense s) {
  if (sense == Sense::Maximize) return s == RowSense::GreaterEqual ? -1.0 : 1.0;
  return s == RowSense::LessEqual ? -1.0 : 1.0;
}

}  // namespace

LpOutcome solve_lp(const LinearProgram& lp) {
  lp.validate();
  const Canonical cf = canonicalize(lp);
  Tableau tab(cf);
  return tab.solve(lp);
}

LinearProgram build_dual(const LinearProgram& primal) {
  primal.validate();
  const Canonical cf = canonicalize(primal);
  // Rewrite every canonical row as <=.
  Matrix a(0, cf.n);
  std::vector<double> b;
  std::vector<std::string> names;
  std::vector<double> r(cf.n);
  auto row_name = [&](std::size_t i) {
    if (i < cf.orig_rows) return primal.row_names.empty() ? "r" + std::to_string(i) : primal.row_names[i];
    return "ub" + std::to_string(i - cf.orig_rows);
  };
  for (std::size_t i = 0; i < cf.b.size(); ++i) {
    for (std::size_t k = 0; k < cf.n; ++k) r[k] = cf.a(i, k);
    const RowSense s = cf.senses[i];
    if (s == RowSense::LessEqual || s == RowSense::Equal) {
      a.append_row(r);
      b.push_back(cf.b[i]);
      names.push_back("y_" + row_name(i) + (s == RowSense::Equal ? "_le" : ""));
    }
    if (s == RowSense::GreaterEqual || s == RowSense::Equal) {
      for (double& v : r) v = -v;
      a.append_row(r);
      b.push_back(-cf.b[i]);
      names.push_back("y_" + row_name(i) + (s == RowSense::Equal ? "_ge" : ""));
    }
  }
  LinearProgram dual;
  const bool maximize = primal.sense == Sense::Maximize;
  dual.sense = maximize ? Sense::Minimize : Sense::Maximize;
  dual.objective_offset = (maximize ? cf.constant : -cf.constant) + primal.objective_offset;
  for (std::size_t i = 0; i < b.size(); ++i) dual.add_variable(maximize ? b[i] : -b[i], 0.0, kInf, names[i]);
  for (std::size_t k = 0; k < cf.n; ++k) {
    std::vector<double> coeffs(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) coeffs[i] = a(i, k);
    dual.add_row(coeffs, RowSense::GreaterEqual, cf.c[k], "c" + std::to_string(k));
  }
  return dual;
}

std::pair<LpOutcome, LpOutcome> solve_dual_pair(const LinearProgram& primal) {
  LpOutcome p = solve_lp(primal);
  LpOutcome d = solve_lp(build_dual(primal));
  return {std::move(p), std::move(d)};
}

std::optional<double> dual_objective(const LinearProgram& lp, const std::vector<double>& dual) {
  if (dual.size() != lp.num_rows()) throw EngineError(ErrorCode::DimensionMismatch, "dual vector length differs from row count");
  const double s = lp.sense == Sense::Maximize ? 1.0 : -1.0;
  const std::size_t m = lp.num_rows();
  const std::size_t n = lp.num_cols();
  std::vector<double> y(m);
  double value = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sig = sigma_for(lp.sense, lp.constraint_senses[i]);
    if (lp.constraint_senses[i] != RowSense::Equal && dual[i] < -kFeasTol) return std::nullopt;
    y[i] = s * sig * dual[i];
    value += lp.rhs[i] * y[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    double r = s * lp.objective[j];
    for (std::size_t i = 0; i < m; ++i) r -= lp.constraint_matrix(i, j) * y[i];
    const double l = lp.var_lower[j];
    const double u = lp.var_upper[j];
    if (r > kFeasTol) {
      if (!std::isfinite(u)) return std::nullopt;
      value += r * u;
    } else if (r < -kFeasTol) {
      if (!std::isfinite(l)) return std::nullopt;
      value += r * l;
    } else if (std::isfinite(l)) {
      value += r * l;
    } else if (std::isfinite(u)) {
      value += r * u;
    }
  }
  return s * value + lp.objective_offset;
}

bool check_duality_certificate(const LinearProgram& lp, const std::vector<double>& primal,
                               const std::vector<double>& dual) {
  lp.validate();
  if (primal.size() != lp.num_cols()) throw EngineError(ErrorCode::DimensionMismatch, "primal vector length differs from column count");
  if (dual.size() != lp.num_rows()) throw EngineError(ErrorCode::DimensionMismatch, "dual vector length differs from row count");
  if (lp.max_violation(primal) > kFeasTol) return false;
  const auto d = dual_objective(lp, dual);
  if (!d) return false;
  const double p = lp.evaluate(primal);
  return std::abs(p - *d) <= kFeasTol + 1e-12 * std::abs(p);
}

}  // namespace engine
