#pragma once

#include "viscoflow/material.hpp"
#include "viscoflow/state.hpp"

namespace viscoflow {

// Same layout as ConservedState; the ρ and ρF entries are always zero.
using SourceVector = ConservedState;

// K(θ) times the FENE-P extension factor b²/(b² − tr C) (1 for Hookean springs).
double effective_stiffness(const PrimitiveView& pv, const MaterialParams& mat);

// T = −p·I + αρ(K_eff·C − k_Bθ·I)
SymMat3 cauchy_stress(const PrimitiveView& pv, const MaterialParams& mat);

// |q|²/(κθ²) + (2αρ/(ζθ))·‖K_eff·C^{1/2} − k_Bθ·C^{-1/2}‖²
double entropy_production(const PrimitiveView& pv, const MaterialParams& mat);

// Rate of Y induced by the relaxation of the material metric A = Y^{-1/2}.
SymMat3 relax_source_Y(const PrimitiveView& pv, const MaterialParams& mat);
// Rate of 𝓎 compatible with relax_source_Y, so that 𝓎·det Y is conserved.
double relax_source_detY(const PrimitiveView& pv, const MaterialParams& mat);
// −q/(τ0·θ)
Vec3 relax_source_q(const PrimitiveView& pv, const MaterialParams& mat);

SourceVector full_source(const ConservedState& u, const MaterialParams& mat);
SourceVector full_source(const PrimitiveView& pv, const MaterialParams& mat);

// ρ·c_V·dθ/dt without the −div q contribution, derived from the free energy:
//   −θ(∂p/∂θ + αρk_B)·tr L + αρθ·K1·φ'·C:L + q·∇θ/θ + |q|²/(κθ)
//   + (2αρ/ζ)·K0·φ'·tr(K_eff·C − k_Bθ·I)
// with L the velocity gradient (L_ij = ∂v_i/∂x_j) and φ' the extension factor.
double temperature_rhs_diagnostic(const PrimitiveView& pv, const Vec3& grad_theta,
                                  const Mat3& grad_v, const MaterialParams& mat);

// F⁻¹F⁻ᵀ; throws SingularF when |det F| < 1e-14.
SymMat3 inverse_left_cauchy_green(const Mat3& F);

// Building blocks shared with the two-network model, one strain family at a time.
// ‖K·C^{1/2} − k_Bθ·C^{-1/2}‖²_F
double strain_dissipation(const SymMat3& C, double K, double kB_theta);
// (8K/ζ)Y − (4k_Bθ/ζ)·Y(B·Y^{-1/2} + Y^{-1/2}·B)Y with B = F⁻¹F⁻ᵀ
SymMat3 metric_relaxation_rate(const Mat3& F, const SymMat3& Y, const SymMat3& Y_inv_sqrt, double K,
                               double kB_theta, double zeta);
// (4/ζ)𝓎·(k_Bθ·tr((B·Y^{-1/2} + Y^{-1/2}·B)Y) − 6K)
double det_relaxation_rate(const Mat3& F, const SymMat3& Y, const SymMat3& Y_inv_sqrt, double ydet,
                           double K, double kB_theta, double zeta);

}  // namespace viscoflow
