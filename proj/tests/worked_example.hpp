#pragma once

#include "engine/lp.hpp"

namespace worked {

using namespace engine;

// The upper-bound LP Q of the two-security game, written out by hand:
// variables (h1..h8, x1, x2); rows B x >= d first, then h A <= x D.
inline LinearProgram bound_lp() {
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  const double b[8] = {100, -115, 75, -100, 35, -50, 50, -65};
  for (int i = 0; i < 8; ++i) lp.add_variable(b[i], 0.0, kInf, "h" + std::to_string(i + 1));
  lp.add_variable(0.0, 0.0, kInf, "x1");
  lp.add_variable(0.0, 0.0, kInf, "x2");
  auto row = [](std::initializer_list<std::pair<int, double>> nz) {
    std::vector<double> r(10, 0.0);
    for (auto [k, v] : nz) r[k] = v;
    return r;
  };
  lp.add_row(row({{8, 1}}), RowSense::GreaterEqual, 0, "B1");
  lp.add_row(row({{9, 1}}), RowSense::GreaterEqual, 0, "B2");
  lp.add_row(row({{8, -100}, {9, -50}}), RowSense::GreaterEqual, -15000, "B3");
  lp.add_row(row({{0, 1}, {1, -1}, {8, -0.6}}), RowSense::LessEqual, 0, "A1");
  lp.add_row(row({{2, 1}, {3, -1}, {8, -0.4}}), RowSense::LessEqual, 0, "A2");
  lp.add_row(row({{4, 1}, {5, -1}, {9, -0.7}}), RowSense::LessEqual, 0, "A3");
  lp.add_row(row({{6, 1}, {7, -1}, {9, -0.3}}), RowSense::LessEqual, 0, "A4");
  return lp;
}

// The exchange LP P: variables (u1,u2,u3,y1,z1,y2,z2) with the price boxes as bounds.
inline LinearProgram exchange_lp() {
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  lp.add_variable(0, 0, kInf, "u1");
  lp.add_variable(0, 0, kInf, "u2");
  lp.add_variable(15000, 0, kInf, "u3");
  lp.add_variable(0, 100, 115, "y1");
  lp.add_variable(0, 75, 100, "z1");
  lp.add_variable(0, 35, 50, "y2");
  lp.add_variable(0, 50, 65, "z2");
  lp.add_row({1, 0, -100, 0.6, 0.4, 0, 0}, RowSense::LessEqual, 0);
  lp.add_row({0, 1, -50, 0, 0, 0.7, 0.3}, RowSense::LessEqual, 0);
  return lp;
}


}  // namespace worked
