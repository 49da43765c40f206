#pragma once

#include <Eigen/Dense>

#include "viscoflow/material.hpp"
#include "viscoflow/state.hpp"

namespace viscoflow {

// Same layout as ConservedState.
using FluxVector = ConservedState;

// Directions are 0-based: axis 0 is x¹.
FluxVector physical_flux(const PrimitiveView& pv, const MaterialParams& mat, int axis);
FluxVector physical_flux(const ConservedState& u, const MaterialParams& mat, int axis);

// ρẼv^j − (T·v)_j + q_j, the flux paired with the mathematical entropy.
double entropy_flux(const ConservedState& u, const MaterialParams& mat, int axis);

inline constexpr double kFdRel = 1e-6;

// Central-difference ∂f^j/∂u. Throws StepTooLarge if a perturbed state is inadmissible.
Eigen::MatrixXd numerical_jacobian(const ConservedState& u, const MaterialParams& mat, int axis,
                                   double fd_rel = kFdRel, bool richardson = false);

// FD Hessian of ρẼ with respect to the 24 conserved variables.
Eigen::MatrixXd entropy_hessian(const ConservedState& u, const MaterialParams& mat);

// The conservative deformation-gradient flux ρ(F⊗v − v⊗Fᵀ) is entropy-compatible
// only modulo the involution ∂_k(ρF^k_α) = 0: w·A^j − ∂F^j/∂u = −(vᵀP)_α along the
// ρF^j_α columns, with P = ∂Ẽ/∂F = αK_eff·F·Y^{-1/2}. Godunov's remedy adds
// −∂_w[−(vᵀP)_α]·∂_j(ρF^j_α), i.e. v^i to row ρF^i_α and P^i_α to row ρv_i, which
// vanishes on solutions that satisfy the involution.
enum class Involution { Ignore, GodunovTerm };

// The quasilinear Godunov matrix described above, nonzero only in the ρF^j_α columns.
Eigen::MatrixXd involution_term(const ConservedState& u, const MaterialParams& mat, int axis);

struct SymmetrizerResult {
  double min_eig_H;
  double asym_rel;
};

SymmetrizerResult symmetrizer_check(const ConservedState& u, const MaterialParams& mat, int axis,
                                    Involution mode = Involution::Ignore);

// Estimate of the spectral radius of A^j at u: 20 power iterations times 1.2,
// with the analytic bound as fallback when the FD Jacobian is unavailable.
double wave_speed_bound(const ConservedState& u, const MaterialParams& mat, int axis);
double analytic_wave_bound(const PrimitiveView& pv, const MaterialParams& mat, int axis);
double max_wave_speed(const ConservedState& uL, const ConservedState& uR, const MaterialParams& mat,
                      int axis);

// Power iteration on m; returns max of the last two Rayleigh norms (robust to ±λ pairs).
double power_iteration_radius(const Eigen::MatrixXd& m, int iterations);

inline constexpr double kWaveSpeedSafety = 1.2;
inline constexpr int kPowerIterations = 20;

Eigen::VectorXd to_vector(const ConservedState& u);
ConservedState state_from_vector(const Eigen::VectorXd& x);

}  // namespace viscoflow
