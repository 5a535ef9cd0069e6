#include <cmath>
#include <iomanip>
#include <sstream>

#include "engine/lp.hpp"

namespace engine {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

// Free-format MPS. OBJSENSE is emitted for maximisation problems.
void write_mps(std::ostream& os, const LinearProgram& lp, const std::string& name) {
  lp.validate();
  const std::size_t m = lp.num_rows();
  const std::size_t n = lp.num_cols();
  auto rname = [&](std::size_t i) { return lp.row_names.empty() || lp.row_names[i].empty() ? "R" + std::to_string(i) : lp.row_names[i]; };
  auto cname = [&](std::size_t j) { return lp.col_names.empty() || lp.col_names[j].empty() ? "C" + std::to_string(j) : lp.col_names[j]; };

  os << "NAME " << name << "\n";
  if (lp.sense == Sense::Maximize) os << "OBJSENSE\n    MAX\n";
  os << "ROWS\n N  OBJ\n";
  for (std::size_t i = 0; i < m; ++i) {
    const char* tag = lp.constraint_senses[i] == RowSense::LessEqual ? "L" : lp.constraint_senses[i] == RowSense::GreaterEqual ? "G" : "E";
    os << " " << tag << "  " << rname(i) << "\n";
  }
  os << "COLUMNS\n";
  for (std::size_t j = 0; j < n; ++j) {
    if (lp.objective[j] != 0.0) os << "    " << cname(j) << "  OBJ  " << num(lp.objective[j]) << "\n";
    for (std::size_t i = 0; i < m; ++i)
      if (lp.constraint_matrix(i, j) != 0.0) os << "    " << cname(j) << "  " << rname(i) << "  " << num(lp.constraint_matrix(i, j)) << "\n";
  }
  os << "RHS\n";
  for (std::size_t i = 0; i < m; ++i)
    if (lp.rhs[i] != 0.0) os << "    RHS  " << rname(i) << "  " << num(lp.rhs[i]) << "\n";
  if (lp.objective_offset != 0.0) os << "    RHS  OBJ  " << num(-lp.objective_offset) << "\n";
  os << "BOUNDS\n";
  for (std::size_t j = 0; j < n; ++j) {
    const double l = lp.var_lower[j];
    const double u = lp.var_upper[j];
    if (l == u) { os << " FX BND  " << cname(j) << "  " << num(l) << "\n"; continue; }
    if (!std::isfinite(l) && !std::isfinite(u)) { os << " FR BND  " << cname(j) << "\n"; continue; }
    if (!std::isfinite(l)) os << " MI BND  " << cname(j) << "\n";
    else if (l != 0.0) os << " LO BND  " << cname(j) << "  " << num(l) << "\n";
    if (std::isfinite(u)) os << " UP BND  " << cname(j) << "  " << num(u) << "\n";
  }
  os << "ENDATA\n";
}

std::string to_mps(const LinearProgram& lp, const std::string& name) {
  std::ostringstream os;
  write_mps(os, lp, name);
  return os.str();
}

}  // namespace engine
