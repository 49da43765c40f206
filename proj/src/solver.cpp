#include "viscoflow/solver.hpp"

#include <algorithm>
#include <cmath>

#include "viscoflow/closure.hpp"

namespace viscoflow {

double metric_rate_bound(const Mat3& F, const SymMat3& Y, double K, double kB_theta) {
  // The metric source is K·Y minus a kθ·Y·B·Y^{-1/2}·Y term; off equilibrium the
  // second one can dominate.
  const double b = sym_eigen(inverse_left_cauchy_green(F)).values[0];
  const double y = sym_eigen(Y).values[0];
  return std::max(K, kB_theta * b * std::sqrt(y));
}

double relaxation_time(const PrimitiveView& pv, const MaterialParams& mat) {
  const double rate = metric_rate_bound(pv.F, pv.Y, effective_stiffness(pv, mat), mat.kB * pv.theta);
  const double strain = mat.drag(pv.theta) / (4.0 * rate);
  // d(ρq)/dt = −q/(τ0θ), so q itself relaxes on ρτ0θ.
  const double heat = pv.rho * mat.tau0 * pv.theta;
  // Dissipation heats the cell and σ falls roughly as 1/θ², so ρη responds at
  // about 2σ/(ρcV); with a large q this is the fastest mode.
  const double sigma = entropy_production(pv, mat);
  const double thermal = sigma > 0.0 ? pv.rho * mat.eos.cv / (2.0 * sigma) : heat;
  return std::min({strain, heat, thermal});
}

ConservedState relax_substep(const ConservedState& u, const MaterialParams& mat, double dt) {
  // The stiffness changes as Y and θ evolve, so the substep is re-derived from
  // the current state each time. RK4 keeps linear invariants only; 𝓎·det Y is
  // restored after every substep so it is carried to roundoff.
  const auto source = [&](const ConservedState& x) { return full_source(x, mat); };
  const auto admissible = [&](const ConservedState& x) { return is_admissible(x, mat); };
  const double invariant = (u.rho_detY / u.rho) * det((1.0 / u.rho) * u.rho_Y);
  ConservedState w = u;
  double t = 0.0;
  while (t < dt) {
    const double h = std::min(kRelaxSafety * relaxation_time(to_primitive(w, mat), mat), dt - t);
    w = rk4_relax(w, h, h, source, admissible);
    w.rho_detY = w.rho * invariant / det((1.0 / w.rho) * w.rho_Y);
    t += h;
    if (dt - t < 1e-12 * dt) break;
  }
  return w;
}

CellSummary summarize(const ConservedState& u, const MaterialParams& mat) {
  const PrimitiveView pv = to_primitive(u, mat);
  const ConstraintResiduals r = constraint_residuals(u, mat);
  CellSummary c;
  c.mass = u.rho;
  c.momentum = u.rho_v;
  c.energy = u.rho * pv.E;
  c.math_entropy = u.rho * pv.E_math;
  c.phys_entropy = u.rho_eta;
  c.detY_residual = r.detY;
  c.rhoR_residual = r.rhoR;
  c.theta = pv.theta;
  c.min_eig_Y = pv.Y_min_eig;
  c.sigma = entropy_production(pv, mat);
  return c;
}

}  // namespace viscoflow
