#include "viscoflow/eos.hpp"

#include <cmath>

#include "viscoflow/errors.hpp"

namespace viscoflow {

VolumetricEOS VolumetricEOS::polytropic(double cv, double gamma, double theta_ref, double rho_ref) {
  return {Kind::Polytropic, cv, gamma, theta_ref, rho_ref, 0.0, 0.0, 0.0};
}

VolumetricEOS VolumetricEOS::nasg(double cv, double gamma, double theta_ref, double rho_ref,
                                  double b, double q, double p_inf) {
  return {Kind::NASG, cv, gamma, theta_ref, rho_ref, b, q, p_inf};
}

ElasticLaw ElasticLaw::hookean(double K0, double K1) { return {Kind::Hookean, K0, K1, 0.0}; }

ElasticLaw ElasticLaw::fenep(double K0, double K1, double b_ext) {
  return {Kind::FENEP, K0, K1, b_ext};
}

void check_density(const VolumetricEOS& eos, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("density must be positive");
  if (eos.kind == VolumetricEOS::Kind::NASG && !(1.0 - eos.b * rho > 0.0))
    throw DomainError("density at or above the covolume limit 1/b");
}

namespace {

bool is_nasg(const VolumetricEOS& eos) { return eos.kind == VolumetricEOS::Kind::NASG; }

// (ρ/ρ_ref)/(1 − bρ), the compression ratio entering the exponential kernel.
double compression(const VolumetricEOS& eos, double rho) {
  const double r = rho / eos.rho_ref;
  return is_nasg(eos) ? r / (1.0 - eos.b * rho) : r;
}

double kernel(const VolumetricEOS& eos, double rho, double eta) {
  return eos.cv * eos.theta_ref * std::pow(compression(eos, rho), eos.gamma - 1.0) *
         std::exp(eta / eos.cv);
}

}  // namespace

SolventPoint solvent(const VolumetricEOS& eos, double rho, double eta) {
  check_density(eos, rho);
  const double k = kernel(eos, rho, eta);
  SolventPoint s;
  s.theta = k / eos.cv;
  if (is_nasg(eos)) {
    const double free = 1.0 - eos.b * rho;
    s.e = k + (1.0 / rho - eos.b) * eos.p_inf + eos.q;
    s.p = (eos.gamma - 1.0) * rho * k / free - eos.p_inf;
  } else {
    s.e = k;
    s.p = (eos.gamma - 1.0) * rho * k;
  }
  return s;
}

double e_solvent(const VolumetricEOS& eos, double rho, double eta) { return solvent(eos, rho, eta).e; }

double theta_solvent(const VolumetricEOS& eos, double rho, double eta) {
  return solvent(eos, rho, eta).theta;
}

double p_solvent(const VolumetricEOS& eos, double rho, double eta) { return solvent(eos, rho, eta).p; }

double eta_solvent(const VolumetricEOS& eos, double rho, double theta) {
  check_density(eos, rho);
  if (!(theta > 0.0)) throw DomainError("temperature must be positive");
  return eos.cv *
         std::log(theta / (eos.theta_ref * std::pow(compression(eos, rho), eos.gamma - 1.0)));
}

double psi_solvent(const VolumetricEOS& eos, double rho, double theta) {
  const double eta = eta_solvent(eos, rho, theta);
  double e = eos.cv * theta;
  if (is_nasg(eos)) e += (1.0 / rho - eos.b) * eos.p_inf + eos.q;
  return e - theta * eta;
}

double cV_solvent(const VolumetricEOS& eos, double rho, double theta) {
  check_density(eos, rho);
  if (!(theta > 0.0)) throw DomainError("temperature must be positive");
  return eos.cv;
}

double dp_dtheta_solvent(const VolumetricEOS& eos, double rho, double theta) {
  check_density(eos, rho);
  if (!(theta > 0.0)) throw DomainError("temperature must be positive");
  const double free = is_nasg(eos) ? 1.0 - eos.b * rho : 1.0;
  return (eos.gamma - 1.0) * rho * eos.cv / free;
}

double stiffness_K(const ElasticLaw& law, double theta) { return law.K0 + law.K1 * theta; }

namespace {

double extension_slack(const ElasticLaw& law, double trC) {
  const double b2 = law.b_ext * law.b_ext;
  if (!(trC < b2)) throw ExtensionExceeded("tr C reached the FENE-P bound b^2");
  return 1.0 - trC / b2;
}

}  // namespace

double trace_measure(const ElasticLaw& law, double trC) {
  if (law.kind == ElasticLaw::Kind::Hookean) return trC;
  const double b2 = law.b_ext * law.b_ext;
  extension_slack(law, trC);
  return -b2 * std::log1p(-trC / b2);
}

double extension_factor(const ElasticLaw& law, double trC) {
  if (law.kind == ElasticLaw::Kind::Hookean) return 1.0;
  return 1.0 / extension_slack(law, trC);
}

double elastic_energy(const ElasticLaw& law, const SymMat3& C, double theta, double alpha,
                      double kB) {
  const double log_det = spd_log_det(C);
  return 0.5 * alpha *
         (stiffness_K(law, theta) * trace_measure(law, trace(C)) - kB * theta * log_det);
}

}  // namespace viscoflow
