#pragma once

#include <cmath>
#include <numbers>

#include "neuralpde/mesh_pipeline.hpp"

namespace neuralpde {

// --- stability guards --------------------------------------------------------

struct CflReport {
  double ratio = 0.0;
  bool pass = false;
  bool at_margin = false;  // ratio == 1 within 1e-9: legal, but zero headroom
};

inline CflReport make_cfl_report(double ratio) {
  CflReport r;
  r.ratio = ratio;
  r.at_margin = std::abs(ratio - 1.0) <= 1e-9;
  r.pass = ratio <= 1.0 + 1e-9;
  return r;
}

// Explicit diffusion: stable iff alpha*dt*(1/dx^2 + 1/dy^2) <= 1/2. Reported
// ratio is normalized so 1.0 is the bound.
inline CflReport cfl_diffusion(double dx, double dy, double dt, double alpha) {
  return make_cfl_report(alpha * dt * (1.0 / (dx * dx) + 1.0 / (dy * dy)) / 0.5);
}

inline CflReport cfl_diffusion(const GridSpec& g, double alpha) {
  return cfl_diffusion(g.dx(), g.dy(), g.dt, alpha);
}

// First-order upwind advection: dt*(max|u|/dx + max|v|/dy) <= 1.
inline CflReport cfl_advection(double dx, double dy, double dt, double max_u, double max_v) {
  return make_cfl_report(dt * (std::abs(max_u) / dx + std::abs(max_v) / dy));
}

inline CflReport cfl_advection(const GridSpec& g, double max_u, double max_v) {
  return cfl_advection(g.dx(), g.dy(), g.dt, max_u, max_v);
}

// --- wave (closed form) -------------------------------------------------------

// u(x,t) = (sin(4*pi*x + t) + sin(4*pi*x - t))/2 = sin(4*pi*x)*cos(t), the
// d'Alembert solution of u_tt = c*u_xx with c = 1/(16*pi^2), u(0,t) = u(1,t).
inline double wave_solution(double x, double t) {
  const double k = 4.0 * std::numbers::pi;
  return 0.5 * (std::sin(k * x + t) + std::sin(k * x - t));
}

inline constexpr double kWaveSpeed = 1.0 / (16.0 * std::numbers::pi * std::numbers::pi);

inline FieldSeries wave_exact(const GridSpec& grid) {
  grid.validate();
  if (grid.is_2d()) throw ConfigError("wave_exact: 1D grids only");
  FieldSeries series;
  series.grid = grid;
  series.variables = {"u"};
  series.data.resize(grid.nx, grid.n_steps);
  for (Index n = 0; n < grid.n_steps; ++n) {
    const double t = static_cast<double>(n + 1) * grid.dt;
    for (Index i = 0; i < grid.nx; ++i) series.data(i, n) = wave_solution(grid.x(i), t);
  }
  return series;
}

// --- heat, explicit 5-point stencil --------------------------------------------
//
// Per-point update (the exact expression below is the contract; reference
// implementations must reproduce it operation for operation):
//   u' = u(i,j) + dt*alpha*( (u(i+1,j) - 2*u(i,j) + u(i-1,j)) / (dx*dx)
//                          + (u(i,j+1) - 2*u(i,j) + u(i,j-1)) / (dy*dy) )
// Boundary points are Dirichlet: copied through unchanged.

inline FieldSnapshot heat_step_2d(const FieldSnapshot& u, const GridSpec& grid, double alpha) {
  grid.validate();
  if (!grid.is_2d()) throw ConfigError("heat_step_2d: 2D grids only");
  if (!u.matches(grid)) throw DataError("heat_step_2d: snapshot does not match grid");
  if (!all_finite(u.values)) {
    Index r, c;
    find_non_finite(u.values, r, c);
    throw DataError("heat_step_2d: non-finite input at (" + std::to_string(r) + ", " +
                    std::to_string(c) + ")");
  }
  const CflReport cfl = cfl_diffusion(grid, alpha);
  if (!cfl.pass)
    throw StabilityError("heat_step_2d: diffusion CFL ratio " + format_double(cfl.ratio) +
                         " > 1 (need alpha*dt*(1/dx^2+1/dy^2) <= 1/2)");
  const double dx2 = grid.dx() * grid.dx();
  const double dy2 = grid.dy() * grid.dy();
  FieldSnapshot out = u;
  for (Index i = 1; i + 1 < grid.nx; ++i)
    for (Index j = 1; j + 1 < grid.ny; ++j)
      out.values(i, j) =
          u.values(i, j) +
          grid.dt * alpha *
              ((u.values(i + 1, j) - 2.0 * u.values(i, j) + u.values(i - 1, j)) / dx2 +
               (u.values(i, j + 1) - 2.0 * u.values(i, j) + u.values(i, j - 1)) / dy2);
  return out;
}

inline FieldSeries solve_heat_2d(const FieldSnapshot& ic, const GridSpec& grid, double alpha) {
  grid.validate();
  if (!grid.is_2d()) throw ConfigError("solve_heat_2d: 2D grids only");
  FieldSeries series;
  series.grid = grid;
  series.variables = {ic.variable_name.empty() ? "u" : ic.variable_name};
  series.data.resize(grid.points(), grid.n_steps);
  FieldSnapshot state = ic;
  for (Index n = 0; n < grid.n_steps; ++n) {
    state = heat_step_2d(state, grid, alpha);
    series.data.col(n) = flatten_2d(state, grid);
  }
  return series;
}

// Benchmark IC: a hot disc on a cold plate, 0.9 inside (x-1)^2 + (y-1)^2 <
// 0.25 and 0.1 elsewhere (boundary included, so the Dirichlet edge holds 0.1).
inline FieldSnapshot heat_disc_ic(const GridSpec& grid, double hot = 0.9, double cold = 0.1) {
  grid.validate();
  if (!grid.is_2d()) throw ConfigError("heat_disc_ic: 2D grids only");
  FieldSnapshot s;
  s.variable_name = "u";
  s.values.resize(grid.nx, grid.ny);
  for (Index i = 0; i < grid.nx; ++i)
    for (Index j = 0; j < grid.ny; ++j) {
      const double rx = grid.x(i) - 1.0, ry = grid.y(j) - 1.0;
      s.values(i, j) = (rx * rx + ry * ry < 0.25) ? hot : cold;
    }
  return s;
}

// --- inviscid Burgers, first-order upwind ----------------------------------------
//
// u_t + u*u_x + v*u_y = 0 and (default) v_t + u*v_x + v*v_y = 0. One printed
// source duplicates the u fluxes in the v equation; as_written reproduces that
// literally: v' = v - dt*(a*dux + b*duy). Per-point contract:
//   a = u(i,j), b = v(i,j)
//   dqx = (q(i,j) - q(i-1,j))/dx if a >= 0 else (q(i+1,j) - q(i,j))/dx
//   dqy = (q(i,j) - q(i,j-1))/dy if b >= 0 else (q(i,j+1) - q(i,j))/dy
//   q' = q(i,j) - dt*(a*dqx + b*dqy)
// Boundary points are held fixed (they start at 0 in the benchmark).

inline std::pair<FieldSnapshot, FieldSnapshot> burgers_step_2d(const FieldSnapshot& u,
                                                               const FieldSnapshot& v,
                                                               const GridSpec& grid,
                                                               bool as_written = false) {
  grid.validate();
  if (!grid.is_2d()) throw ConfigError("burgers_step_2d: 2D grids only");
  if (!u.matches(grid) || !v.matches(grid))
    throw DataError("burgers_step_2d: snapshot dimensions do not match grid");
  for (const FieldSnapshot* s : {&u, &v})
    if (!all_finite(s->values)) {
      Index r, c;
      find_non_finite(s->values, r, c);
      throw DataError("burgers_step_2d: non-finite input at (" + std::to_string(r) + ", " +
                      std::to_string(c) + ")");
    }
  const double max_u = u.values.cwiseAbs().maxCoeff();
  const double max_v = v.values.cwiseAbs().maxCoeff();
  const CflReport cfl = cfl_advection(grid, max_u, max_v);
  if (!cfl.pass)
    throw StabilityError("burgers_step_2d: advection CFL ratio " + format_double(cfl.ratio) +
                         " > 1 (need dt*(max|u|/dx + max|v|/dy) <= 1)");
  const double dx = grid.dx(), dy = grid.dy(), dt = grid.dt;
  FieldSnapshot un = u, vn = v;
  for (Index i = 1; i + 1 < grid.nx; ++i)
    for (Index j = 1; j + 1 < grid.ny; ++j) {
      const double a = u.values(i, j), b = v.values(i, j);
      const double dux = (a >= 0.0) ? (u.values(i, j) - u.values(i - 1, j)) / dx
                                    : (u.values(i + 1, j) - u.values(i, j)) / dx;
      const double duy = (b >= 0.0) ? (u.values(i, j) - u.values(i, j - 1)) / dy
                                    : (u.values(i, j + 1) - u.values(i, j)) / dy;
      un.values(i, j) = u.values(i, j) - dt * (a * dux + b * duy);
      if (as_written) {
        vn.values(i, j) = v.values(i, j) - dt * (a * dux + b * duy);
      } else {
        const double dvx = (a >= 0.0) ? (v.values(i, j) - v.values(i - 1, j)) / dx
                                      : (v.values(i + 1, j) - v.values(i, j)) / dx;
        const double dvy = (b >= 0.0) ? (v.values(i, j) - v.values(i, j - 1)) / dy
                                      : (v.values(i, j + 1) - v.values(i, j)) / dy;
        vn.values(i, j) = v.values(i, j) - dt * (a * dvx + b * dvy);
      }
    }
  return {std::move(un), std::move(vn)};
}

// Square patch IC shared by both Burgers components: `inside` on
// 0.25 <= x <= 0.75, 0.25 <= y <= 0.75 (inclusive), `outside` elsewhere.
inline FieldSnapshot square_patch_ic(const GridSpec& grid, double inside, double outside = 0.0,
                                     std::string name = {}) {
  grid.validate();
  if (!grid.is_2d()) throw ConfigError("square_patch_ic: 2D grids only");
  FieldSnapshot s;
  s.variable_name = std::move(name);
  s.values.resize(grid.nx, grid.ny);
  for (Index i = 0; i < grid.nx; ++i)
    for (Index j = 0; j < grid.ny; ++j) {
      const double x = grid.x(i), y = grid.y(j);
      const bool in = x >= 0.25 && x <= 0.75 && y >= 0.25 && y <= 0.75;
      s.values(i, j) = in ? inside : outside;
    }
  return s;
}

inline FieldSeries solve_burgers_2d(const GridSpec& grid, bool as_written = false) {
  grid.validate();
  if (!grid.is_2d()) throw ConfigError("solve_burgers_2d: 2D grids only");
  FieldSnapshot u = square_patch_ic(grid, 0.9, 0.0, "u");
  FieldSnapshot v = square_patch_ic(grid, 0.5, 0.0, "v");
  FieldSeries series;
  series.grid = grid;
  series.variables = {"u", "v"};
  const Index k = grid.points();
  series.data.resize(2 * k, grid.n_steps);
  for (Index n = 0; n < grid.n_steps; ++n) {
    auto [un, vn] = burgers_step_2d(u, v, grid, as_written);
    u = std::move(un);
    v = std::move(vn);
    series.data.col(n).head(k) = flatten_2d(u, grid);
    series.data.col(n).tail(k) = flatten_2d(v, grid);
  }
  return series;
}

}  // namespace neuralpde
