#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "viscoflow/errors.hpp"
#include "viscoflow/flux.hpp"
#include "viscoflow/material.hpp"
#include "viscoflow/state.hpp"

namespace viscoflow {

enum class Boundary { Periodic, Transmissive };

template <class State>
struct Grid1D {
  double x0 = 0.0;
  double x1 = 1.0;
  Boundary boundary = Boundary::Periodic;
  std::vector<State> cells;

  std::size_t size() const { return cells.size(); }
  double dx() const { return (x1 - x0) / static_cast<double>(cells.size()); }
  double center(std::size_t i) const { return x0 + (static_cast<double>(i) + 0.5) * dx(); }
};

// Per-cell quantities reduced into RunDiagnostics.
struct CellSummary {
  double mass;
  Vec3 momentum;
  double energy;
  double math_entropy;
  double phys_entropy;
  double detY_residual;
  double rhoR_residual;
  double theta;
  double min_eig_Y;
  double sigma;
};

struct RunDiagnostics {
  long step = 0;
  double time = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  Vec3 momentum{};
  double energy = 0.0;
  double math_entropy = 0.0;
  double phys_entropy = 0.0;
  double max_detY_residual = 0.0;
  double max_rhoR_residual = 0.0;
  double min_theta = 0.0;
  double min_eig_Y = 0.0;
  double sigma_integral = 0.0;
};

// Runs fn(begin, end) over contiguous chunks; rethrows the exception of the
// lowest failing chunk so error reporting does not depend on scheduling.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  const std::size_t t = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (t == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(t);
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + t - 1) / t;
  for (std::size_t k = 0; k < t; ++k) {
    pool.emplace_back([&, k] {
      const std::size_t b = k * chunk, e = std::min(n, b + chunk);
      try {
        if (b < e) fn(b, e);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Classical RK4 on du/dt = source(u) with substeps no longer than h_max. A stage
// that leaves the admissible set halves the substep, at most 10 times.
template <class State, class Source, class Admissible>
State rk4_relax(const State& u0, double dt, double h_max, const Source& source,
                const Admissible& admissible) {
  if (dt <= 0.0) return u0;
  const long n_sub = std::max(1L, static_cast<long>(std::ceil(dt / h_max)));
  const double h0 = dt / static_cast<double>(n_sub);
  State u = u0;
  double t = 0.0;
  int retries = 0;
  double h = h0;
  while (t < dt) {
    h = std::min(h, dt - t);
    try {
      const State k1 = source(u);
      const State k2 = source(u + (0.5 * h) * k1);
      const State k3 = source(u + (0.5 * h) * k2);
      const State k4 = source(u + h * k3);
      const State next = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const Admissibility a = admissible(next);
      if (!a) throw Inadmissible(a.reason);
      u = next;
      t += h;
      // The last substep may be shorter; snap to avoid a sliver step from roundoff.
      if (dt - t < 1e-12 * dt) t = dt;
    } catch (const Inadmissible&) {
      if (++retries > 10) throw;
      h *= 0.5;
    } catch (const SingularF&) {
      if (++retries > 10) throw Inadmissible(Reason::NotSPD);
      h *= 0.5;
    }
  }
  return u;
}

// Substep as a fraction of relaxation_time.
inline constexpr double kRelaxSafety = 0.02;

// Base-model relaxation step: integrates full_source over dt with RK4 sub-cycling.
ConservedState relax_substep(const ConservedState& u, const MaterialParams& mat, double dt);

// Rate scale of one metric family: K at equilibrium, kθ·|B|·|Y|^{1/2} away from it.
double metric_rate_bound(const Mat3& F, const SymMat3& Y, double K, double kB_theta);

// Fastest of the strain, heat-flux and dissipative-heating time scales at pv:
// ζ/(4·metric rate), ρτ0θ and ρcV/(2σ).
double relaxation_time(const PrimitiveView& pv, const MaterialParams& mat);

CellSummary summarize(const ConservedState& u, const MaterialParams& mat);

// Base Maxwell system adapter for the generic integrator (x¹ direction).
struct MaxwellSystem {
  using State = ConservedState;
  MaterialParams mat;

  State flux(const State& u) const { return physical_flux(u, mat, 0); }
  double wave_speed(const State& u) const { return wave_speed_bound(u, mat, 0); }
  State relax(const State& u, double dt) const { return relax_substep(u, mat, dt); }
  Admissibility admissible(const State& u) const { return is_admissible(u, mat); }
  CellSummary summarize(const State& u) const { return viscoflow::summarize(u, mat); }
};

template <class State>
struct StepResult {
  Grid1D<State> grid;
  double dt;
  RunDiagnostics diagnostics;
};

template <class System, class State = typename System::State>
RunDiagnostics diagnose(const Grid1D<State>& g, const System& sys, int threads = 1) {
  const std::size_t n = g.size();
  std::vector<CellSummary> cs(n);
  parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) cs[i] = sys.summarize(g.cells[i]);
  });
  const double dx = g.dx();
  RunDiagnostics d;
  d.min_theta = std::numeric_limits<double>::infinity();
  d.min_eig_Y = std::numeric_limits<double>::infinity();
  for (const CellSummary& c : cs) {
    d.mass += c.mass * dx;
    for (int k = 0; k < 3; ++k) d.momentum[k] += c.momentum[k] * dx;
    d.energy += c.energy * dx;
    d.math_entropy += c.math_entropy * dx;
    d.phys_entropy += c.phys_entropy * dx;
    d.sigma_integral += c.sigma * dx;
    d.max_detY_residual = std::max(d.max_detY_residual, c.detY_residual);
    d.max_rhoR_residual = std::max(d.max_rhoR_residual, c.rhoR_residual);
    d.min_theta = std::min(d.min_theta, c.theta);
    d.min_eig_Y = std::min(d.min_eig_Y, c.min_eig_Y);
  }
  return d;
}

namespace detail {

template <class System, class State>
void check_cells(const std::vector<State>& cells, const System& sys) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Admissibility a = sys.admissible(cells[i]);
    if (!a) throw InadmissibleCell(i, a.reason);
  }
}

template <class System, class State>
std::vector<double> cell_speeds(const std::vector<State>& cells, const System& sys, int threads) {
  std::vector<double> s(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) s[i] = sys.wave_speed(cells[i]);
  });
  return s;
}

// Rusanov residual −(F̂_{i+1/2} − F̂_{i−1/2})/Δx for every cell, with per-cell
// speed bounds s.
template <class System, class State>
std::vector<State> rusanov_rate(const Grid1D<State>& g, const std::vector<State>& u,
                                const std::vector<double>& s, const System& sys, int threads) {
  const std::size_t n = u.size();
  std::vector<State> f(n);
  check_cells(u, sys);
  parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) f[i] = sys.flux(u[i]);
  });

  // Interface k sits between cells k−1 and k; periodic grids share one face.
  const bool periodic = g.boundary == Boundary::Periodic;
  const std::size_t n_faces = periodic ? n : n + 1;
  std::vector<State> face(n_faces);
  parallel_for(n_faces, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      std::size_t l, r;
      if (periodic) {
        l = (k + n - 1) % n;
        r = k % n;
      } else {
        l = k == 0 ? 0 : k - 1;
        r = k == n ? n - 1 : k;
      }
      const double a = std::max(s[l], s[r]);
      face[k] = 0.5 * (f[l] + f[r]) - (0.5 * a) * (u[r] - u[l]);
    }
  });
  const double inv_dx = 1.0 / g.dx();
  std::vector<State> rate(n);
  for (std::size_t i = 0; i < n; ++i) {
    const State& right = periodic ? face[(i + 1) % n] : face[i + 1];
    rate[i] = (-inv_dx) * (right - face[i]);
  }
  return rate;
}

template <class System, class State>
std::vector<State> relax_all(const std::vector<State>& u, const System& sys, double dt, int threads) {
  std::vector<State> out(u.size());
  parallel_for(u.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      try {
        out[i] = sys.relax(u[i], dt);
      } catch (const Inadmissible& ex) {
        throw InadmissibleCell(i, ex.reason);
      }
    }
  });
  return out;
}

}  // namespace detail

// Strang-split step S(Δt/2)·H(Δt)·S(Δt/2); H is SSP-RK2 with Rusanov fluxes and
// Δt = cfl·Δx/max_s, capped by dt_cap. The speeds found for Δt also serve the
// first stage (the half relaxation in between moves them by O(Δt), well inside
// the safety factor); the second stage re-evaluates them at the predictor.
template <class System, class State = typename System::State>
StepResult<State> step(const Grid1D<State>& g, const System& sys, double cfl, int threads = 1,
                       double dt_cap = std::numeric_limits<double>::infinity()) {
  if (!(cfl > 0.0 && cfl <= 0.9)) throw std::invalid_argument("cfl must lie in (0, 0.9]");
  if (g.size() < 4) throw std::invalid_argument("grid needs at least 4 cells");
  detail::check_cells(g.cells, sys);
  const std::vector<double> s = detail::cell_speeds(g.cells, sys, threads);
  const double s_max = *std::max_element(s.begin(), s.end());
  double dt = cfl * g.dx() / s_max;
  dt = std::min(dt, dt_cap);
  if (!(dt >= 1e-14) || !std::isfinite(dt)) throw CFLCollapse("time step collapsed below 1e-14");

  StepResult<State> out{g, dt, {}};
  std::vector<State> u = detail::relax_all(g.cells, sys, 0.5 * dt, threads);

  const std::vector<State> r0 = detail::rusanov_rate(g, u, s, sys, threads);
  std::vector<State> u1(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) u1[i] = u[i] + dt * r0[i];
  detail::check_cells(u1, sys);
  const std::vector<State> r1 =
      detail::rusanov_rate(g, u1, detail::cell_speeds(u1, sys, threads), sys, threads);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.5 * u[i] + 0.5 * (u1[i] + dt * r1[i]);

  out.grid.cells = detail::relax_all(u, sys, 0.5 * dt, threads);
  detail::check_cells(out.grid.cells, sys);
  out.diagnostics = diagnose(out.grid, sys, threads);
  out.diagnostics.dt = dt;
  return out;
}

struct RunControl {
  double cfl = 0.5;
  double t_end = 1.0;
  long max_steps = 1000;
  int threads = 1;
};

template <class State>
struct RunResult {
  Grid1D<State> grid;
  std::vector<RunDiagnostics> history;  // entry 0 is the initial state
};

// Advances until t_end or max_steps. observer(step, grid, diagnostics) sees the
// initial state and every completed step; an exception leaves earlier output intact.
template <class System, class State = typename System::State>
RunResult<State> run(const Grid1D<State>& g0, const System& sys, const RunControl& ctl,
                     const std::function<void(long, const Grid1D<State>&, const RunDiagnostics&)>&
                         observer = {}) {
  RunResult<State> res{g0, {}};
  RunDiagnostics d = diagnose(g0, sys, ctl.threads);
  res.history.push_back(d);
  if (observer) observer(0, res.grid, d);
  double t = 0.0;
  for (long n = 1; n <= ctl.max_steps && t < ctl.t_end * (1.0 - 1e-14); ++n) {
    StepResult<State> sr = step(res.grid, sys, ctl.cfl, ctl.threads, ctl.t_end - t);
    t += sr.dt;
    sr.diagnostics.step = n;
    sr.diagnostics.time = t;
    res.grid = std::move(sr.grid);
    res.history.push_back(sr.diagnostics);
    if (observer) observer(n, res.grid, sr.diagnostics);
  }
  return res;
}

}  // namespace viscoflow
