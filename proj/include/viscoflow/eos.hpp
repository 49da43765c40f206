#pragma once

#include "viscoflow/tensor.hpp"

namespace viscoflow {

// Volumetric (solvent) equation of state. A polytropic gas is the NASG form
// with b = q = p_inf = 0; the tag is kept so validation and reports can tell
// them apart.
struct VolumetricEOS {
  enum class Kind { Polytropic, NASG };
  Kind kind = Kind::Polytropic;
  double cv = 1.0;
  double gamma = 1.4;
  double theta_ref = 1.0;
  double rho_ref = 1.0;
  double b = 0.0;      // covolume
  double q = 0.0;      // reference energy
  double p_inf = 0.0;  // stiffening pressure

  static VolumetricEOS polytropic(double cv, double gamma, double theta_ref, double rho_ref);
  static VolumetricEOS nasg(double cv, double gamma, double theta_ref, double rho_ref, double b,
                            double q, double p_inf);
};

struct ElasticLaw {
  enum class Kind { Hookean, FENEP };
  Kind kind = Kind::Hookean;
  double K0 = 0.5;
  double K1 = 0.5;
  double b_ext = 0.0;  // FENE-P maximum extension

  static ElasticLaw hookean(double K0, double K1);
  static ElasticLaw fenep(double K0, double K1, double b_ext);
};

// Throws DomainError outside ρ ∈ (0, 1/b).
void check_density(const VolumetricEOS& eos, double rho);

struct SolventPoint {
  double e;
  double theta;
  double p;
};

// e_s, θ = ∂e_s/∂η and p = ρ²∂e_s/∂ρ in one pass.
SolventPoint solvent(const VolumetricEOS& eos, double rho, double eta);

double e_solvent(const VolumetricEOS& eos, double rho, double eta);
double theta_solvent(const VolumetricEOS& eos, double rho, double eta);
double p_solvent(const VolumetricEOS& eos, double rho, double eta);

// Temperature-based forms: entropy η_s(ρ,θ), free energy ψ_s(ρ,θ) = e_s − θη_s.
double eta_solvent(const VolumetricEOS& eos, double rho, double theta);
double psi_solvent(const VolumetricEOS& eos, double rho, double theta);
double cV_solvent(const VolumetricEOS& eos, double rho, double theta);
// ∂p_s/∂θ at fixed ρ.
double dp_dtheta_solvent(const VolumetricEOS& eos, double rho, double theta);

double stiffness_K(const ElasticLaw& law, double theta);

// Scalar measure that replaces tr C in the energy: tr C (Hookean) or
// −b²·log(1 − tr C/b²) (FENE-P). Throws ExtensionExceeded past the bound.
double trace_measure(const ElasticLaw& law, double trC);
// d(trace_measure)/d(tr C): 1 or b²/(b² − tr C).
double extension_factor(const ElasticLaw& law, double trC);

double elastic_energy(const ElasticLaw& law, const SymMat3& C, double theta, double alpha,
                      double kB);

}  // namespace viscoflow
