#pragma once

#include <string>
#include <utility>
#include <vector>

#include "neuralpde/core.hpp"

namespace neuralpde {

// Structured grid over [x_min,x_max] (x [y_min,y_max] when 2D) with nx (x ny)
// points including both endpoints, plus the time discretization.
// ny == 0 marks a 1D grid.
struct GridSpec {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 0.0;
  Index nx = 0;
  Index ny = 0;
  double dt = 0.0;
  Index n_steps = 0;

  bool is_2d() const { return ny > 0; }
  double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
  double dy() const { return is_2d() ? (y_max - y_min) / static_cast<double>(ny - 1) : 0.0; }
  Index points() const { return is_2d() ? nx * ny : nx; }

  double x(Index i) const { return x_min + static_cast<double>(i) * dx(); }
  double y(Index j) const { return y_min + static_cast<double>(j) * dy(); }

  void validate() const {
    if (nx < 3) throw ConfigError("grid: nx must be >= 3, got " + std::to_string(nx));
    if (is_2d() && ny < 3) throw ConfigError("grid: ny must be >= 3 for 2D, got " + std::to_string(ny));
    if (!(x_max > x_min)) throw ConfigError("grid: x_max must exceed x_min");
    if (is_2d() && !(y_max > y_min)) throw ConfigError("grid: y_max must exceed y_min");
    if (!(dt > 0.0)) throw ConfigError("grid: dt must be positive");
    if (n_steps < 1) throw ConfigError("grid: n_steps must be >= 1");
  }
};

inline GridSpec make_grid_1d(double x_min, double x_max, Index nx, double dt, Index n_steps) {
  GridSpec g{x_min, x_max, 0.0, 0.0, nx, 0, dt, n_steps};
  g.validate();
  return g;
}

inline GridSpec make_grid_2d(double x_min, double x_max, double y_min, double y_max, Index nx,
                             Index ny, double dt, Index n_steps) {
  GridSpec g{x_min, x_max, y_min, y_max, nx, ny, dt, n_steps};
  g.validate();
  return g;
}

// One field at one time level. 2D fields are stored as an nx-by-ny matrix
// (row i = x index, column j = y index); 1D fields as nx-by-1.
struct FieldSnapshot {
  Matrix values;
  std::string variable_name;

  bool matches(const GridSpec& g) const {
    if (g.is_2d()) return values.rows() == g.nx && values.cols() == g.ny;
    return values.rows() == g.nx && values.cols() == 1;
  }
};

// The grid-point-by-time data block: (V*K) rows, one per (variable, grid
// point) pair in variable-major order, N columns, one per timestep.
// Column n holds the state at t = (n+1)*dt.
struct FieldSeries {
  GridSpec grid;
  std::vector<std::string> variables;
  Matrix data;

  Index n_vars() const { return static_cast<Index>(variables.size()); }

  void validate() const {
    grid.validate();
    if (variables.empty()) throw DataError("series: no variables");
    if (data.rows() != n_vars() * grid.points())
      throw DataError("series: row count " + std::to_string(data.rows()) + " != V*K = " +
                      std::to_string(n_vars() * grid.points()));
    if (data.cols() != grid.n_steps)
      throw DataError("series: column count " + std::to_string(data.cols()) +
                      " != n_steps = " + std::to_string(grid.n_steps));
    Index r, c;
    if (find_non_finite(data, r, c))
      throw DataError("series: non-finite value at row " + std::to_string(r) + ", column " +
                      std::to_string(c));
  }
};

}  // namespace neuralpde
