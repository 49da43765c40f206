#pragma once

#include "viscoflow/eos.hpp"
#include "viscoflow/tensor.hpp"

namespace viscoflow {

struct MaterialParams {
  VolumetricEOS eos;
  ElasticLaw elastic;
  double alpha = 1.0;  // polymer number density factor
  double kB = 1.0;
  double zeta = 4.0;   // drag coefficient
  double tau0 = 1.0;   // heat-flux relaxation time scale
  double kappa = 1.0;  // heat conductivity
  double e_ref = 1.0;  // reference energy weighting ‖Y‖² in the mathematical entropy
  double rhoR = 1.0;   // reference density
  Vec3 body_force{0.0, 0.0, 0.0};

  // Drag may depend on temperature; the shipped law is constant.
  double drag(double /*theta*/) const { return zeta; }

  // Nondimensional reference set used throughout the tests:
  // cV=1, γ=1.4, θ_ref=ρ_ref=1, α=k_B=1, K0=K1=0.5, ζ=4, τ0=κ=1, e_ref=1, ρ_R=1.
  static MaterialParams baseline() { return {}; }
};

}  // namespace viscoflow
