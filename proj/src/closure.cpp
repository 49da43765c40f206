#include "viscoflow/closure.hpp"

#include <cmath>

namespace viscoflow {

double effective_stiffness(const PrimitiveView& pv, const MaterialParams& mat) {
  return stiffness_K(mat.elastic, pv.theta) * extension_factor(mat.elastic, pv.trC);
}

SymMat3 cauchy_stress(const PrimitiveView& pv, const MaterialParams& mat) {
  const double ar = mat.alpha * pv.rho;
  const double iso = -pv.p - ar * mat.kB * pv.theta;
  return (ar * effective_stiffness(pv, mat)) * pv.C + SymMat3::diag(iso, iso, iso);
}

double strain_dissipation(const SymMat3& C, double K, double kB_theta) {
  const SymEigen ec = sym_eigen(C);
  if (!(ec.values[2] > spd_eps(C))) throw SingularF("conformation tensor is singular");
  // K·C^{1/2} and k_Bθ·C^{-1/2} commute, so the Frobenius norm is spectral.
  double sq = 0.0;
  for (double lam : ec.values) {
    const double r = std::sqrt(lam);
    const double d = K * r - kB_theta / r;
    sq += d * d;
  }
  return sq;
}

double entropy_production(const PrimitiveView& pv, const MaterialParams& mat) {
  const double heat = dot(pv.q, pv.q) / (mat.kappa * pv.theta * pv.theta);
  const double sq = strain_dissipation(pv.C, effective_stiffness(pv, mat), mat.kB * pv.theta);
  return heat + 2.0 * mat.alpha * pv.rho / (mat.drag(pv.theta) * pv.theta) * sq;
}

SymMat3 inverse_left_cauchy_green(const Mat3& F) {
  if (!(std::fabs(det(F)) >= 1e-14)) throw SingularF("|det F| below 1e-14");
  const Mat3 Fi = inverse(F);
  return sym(Fi * transpose(Fi));
}

namespace {

// B·Y^{-1/2} + Y^{-1/2}·B
Mat3 metric_pairing(const SymMat3& B, const SymMat3& Y_inv_sqrt) {
  const Mat3 b = to_mat(B), r = to_mat(Y_inv_sqrt);
  return b * r + r * b;
}

}  // namespace

SymMat3 metric_relaxation_rate(const Mat3& F, const SymMat3& Y, const SymMat3& Y_inv_sqrt, double K,
                               double kB_theta, double zeta) {
  const SymMat3 B = inverse_left_cauchy_green(F);
  const Mat3 y = to_mat(Y);
  const Mat3 m = y * metric_pairing(B, Y_inv_sqrt) * y;
  return (8.0 * K / zeta) * Y - (4.0 * kB_theta / zeta) * sym(m);
}

double det_relaxation_rate(const Mat3& F, const SymMat3& Y, const SymMat3& Y_inv_sqrt, double ydet,
                           double K, double kB_theta, double zeta) {
  const SymMat3 B = inverse_left_cauchy_green(F);
  const double t = trace(metric_pairing(B, Y_inv_sqrt) * to_mat(Y));
  return 4.0 / zeta * ydet * (kB_theta * t - 6.0 * K);
}

SymMat3 relax_source_Y(const PrimitiveView& pv, const MaterialParams& mat) {
  return metric_relaxation_rate(pv.F, pv.Y, pv.Y_inv_sqrt, effective_stiffness(pv, mat),
                                mat.kB * pv.theta, mat.drag(pv.theta));
}

double relax_source_detY(const PrimitiveView& pv, const MaterialParams& mat) {
  return det_relaxation_rate(pv.F, pv.Y, pv.Y_inv_sqrt, pv.ydet, effective_stiffness(pv, mat),
                             mat.kB * pv.theta, mat.drag(pv.theta));
}

Vec3 relax_source_q(const PrimitiveView& pv, const MaterialParams& mat) {
  return (-1.0 / (mat.tau0 * pv.theta)) * pv.q;
}

SourceVector full_source(const PrimitiveView& pv, const MaterialParams& mat) {
  SourceVector s;
  s.rho_eta = entropy_production(pv, mat);
  s.rho_q = relax_source_q(pv, mat);
  s.rho_v = pv.rho * mat.body_force;
  s.rho_Y = pv.rho * relax_source_Y(pv, mat);
  s.rho_detY = pv.rho * relax_source_detY(pv, mat);
  return s;
}

SourceVector full_source(const ConservedState& u, const MaterialParams& mat) {
  return full_source(to_primitive(u, mat), mat);
}

double temperature_rhs_diagnostic(const PrimitiveView& pv, const Vec3& grad_theta,
                                  const Mat3& grad_v, const MaterialParams& mat) {
  const double ar = mat.alpha * pv.rho;
  const double th = pv.theta;
  const double phi1 = extension_factor(mat.elastic, pv.trC);
  const double K = effective_stiffness(pv, mat);
  const double div_v = trace(grad_v);

  const double compression = -th * (dp_dtheta_solvent(mat.eos, pv.rho, th) + ar * mat.kB) * div_v;
  const double stretching = ar * th * mat.elastic.K1 * phi1 * ddot(to_mat(pv.C), grad_v);
  const double conduction = dot(pv.q, grad_theta) / th + dot(pv.q, pv.q) / (mat.kappa * th);
  const double relaxation =
      2.0 * ar / mat.drag(th) * mat.elastic.K0 * phi1 * (K * pv.trC - 3.0 * mat.kB * th);
  return compression + stretching + conduction + relaxation;
}

}  // namespace viscoflow
