#include "viscoflow/state.hpp"

#include <cmath>

namespace viscoflow {

const char* to_string(Reason r) {
  switch (r) {
    case Reason::Ok: return "ok";
    case Reason::NonFinite: return "non-finite component";
    case Reason::NegativeDensity: return "non-positive density";
    case Reason::DensityAboveCovolume: return "density at or above 1/b";
    case Reason::NotSPD: return "Y not SPD";
    case Reason::NonPositiveDetY: return "non-positive det variable";
    case Reason::NonPositiveTemperature: return "non-positive temperature";
    case Reason::ExtensionExceeded: return "tr C at or above b_ext^2";
  }
  return "unknown";
}

std::array<double, ConservedState::size> ConservedState::pack() const {
  std::array<double, size> x{};
  x[layout::rho] = rho;
  x[layout::eta] = rho_eta;
  for (int i = 0; i < 3; ++i) {
    x[layout::q + i] = rho_q[i];
    x[layout::v + i] = rho_v[i];
  }
  for (int k = 0; k < 9; ++k) x[layout::F + k] = rho_F.a[k];
  for (int k = 0; k < 6; ++k) x[layout::Y + k] = rho_Y.s[k];
  x[layout::detY] = rho_detY;
  return x;
}

ConservedState ConservedState::unpack(const double* x) {
  ConservedState u;
  u.rho = x[layout::rho];
  u.rho_eta = x[layout::eta];
  for (int i = 0; i < 3; ++i) {
    u.rho_q[i] = x[layout::q + i];
    u.rho_v[i] = x[layout::v + i];
  }
  for (int k = 0; k < 9; ++k) u.rho_F.a[k] = x[layout::F + k];
  for (int k = 0; k < 6; ++k) u.rho_Y.s[k] = x[layout::Y + k];
  u.rho_detY = x[layout::detY];
  return u;
}

ConservedState operator+(const ConservedState& a, const ConservedState& b) {
  auto x = a.pack();
  const auto y = b.pack();
  for (int k = 0; k < ConservedState::size; ++k) x[k] += y[k];
  return ConservedState::unpack(x.data());
}

ConservedState operator-(const ConservedState& a, const ConservedState& b) {
  auto x = a.pack();
  const auto y = b.pack();
  for (int k = 0; k < ConservedState::size; ++k) x[k] -= y[k];
  return ConservedState::unpack(x.data());
}

ConservedState operator*(double s, const ConservedState& a) {
  auto x = a.pack();
  for (double& c : x) c *= s;
  return ConservedState::unpack(x.data());
}

double entropy_shift(const MaterialParams& mat, double rho, double trC, double ydet) {
  const double ratio = mat.rhoR / rho;
  return 0.5 * mat.alpha *
         (mat.elastic.K1 * trace_measure(mat.elastic, trC) -
          mat.kB * (2.0 * std::log(ratio) + 0.5 * std::log(ydet)));
}

namespace {

// Fills pv or reports why it cannot. Never throws for ordinary bad input.
Reason evaluate(const ConservedState& u, const MaterialParams& mat, PrimitiveView& pv) {
  for (double c : u.pack())
    if (!std::isfinite(c)) return Reason::NonFinite;
  if (!(u.rho > 0.0)) return Reason::NegativeDensity;
  if (mat.eos.kind == VolumetricEOS::Kind::NASG && !(1.0 - mat.eos.b * u.rho > 0.0))
    return Reason::DensityAboveCovolume;

  const double inv = 1.0 / u.rho;
  pv.rho = u.rho;
  pv.eta = u.rho_eta * inv;
  pv.q = inv * u.rho_q;
  pv.v = inv * u.rho_v;
  pv.F = inv * u.rho_F;
  pv.Y = inv * u.rho_Y;
  pv.ydet = u.rho_detY * inv;

  const SymEigen ey = sym_eigen(pv.Y);
  pv.Y_min_eig = ey.values[2];
  if (!(ey.values[2] > spd_eps(pv.Y))) return Reason::NotSPD;
  if (!(pv.ydet > 0.0)) return Reason::NonPositiveDetY;
  pv.Y_inv_sqrt = from_eigen({1.0 / std::sqrt(ey.values[0]), 1.0 / std::sqrt(ey.values[1]),
                              1.0 / std::sqrt(ey.values[2])},
                             ey.vectors);
  pv.C = congruence(pv.F, pv.Y_inv_sqrt);
  pv.trC = trace(pv.C);
  if (mat.elastic.kind == ElasticLaw::Kind::FENEP &&
      !(pv.trC < mat.elastic.b_ext * mat.elastic.b_ext))
    return Reason::ExtensionExceeded;

  pv.eta_shifted = pv.eta + entropy_shift(mat, pv.rho, pv.trC, pv.ydet);
  const SolventPoint s = solvent(mat.eos, pv.rho, pv.eta_shifted);
  if (!(s.theta > 0.0) || !std::isfinite(s.theta) || !std::isfinite(s.e))
    return Reason::NonPositiveTemperature;
  pv.e_solvent = s.e;
  pv.theta = s.theta;
  pv.p = s.p;

  pv.E = 0.5 * dot(pv.v, pv.v) + s.e + 0.5 * mat.tau0 / mat.kappa * dot(pv.q, pv.q) +
         0.5 * mat.alpha * mat.elastic.K0 * trace_measure(mat.elastic, pv.trC);
  pv.E_math = pv.E + 0.5 * mat.e_ref * frobenius_sq(pv.Y);
  return Reason::Ok;
}

}  // namespace

PrimitiveView to_primitive(const ConservedState& u, const MaterialParams& mat) {
  PrimitiveView pv{};
  const Reason r = evaluate(u, mat, pv);
  if (r != Reason::Ok) throw Inadmissible(r);
  return pv;
}

Admissibility is_admissible(const ConservedState& u, const MaterialParams& mat) {
  PrimitiveView pv{};
  const Reason r = evaluate(u, mat, pv);
  return {r == Reason::Ok, r};
}

ConservedState from_primitive(const MaterialParams& /*mat*/, double rho, double eta, const Vec3& q,
                              const Vec3& v, const Mat3& F, const SymMat3& Y, double ydet) {
  ConservedState u;
  u.rho = rho;
  u.rho_eta = rho * eta;
  u.rho_q = rho * q;
  u.rho_v = rho * v;
  u.rho_F = rho * F;
  u.rho_Y = rho * Y;
  u.rho_detY = rho * ydet;
  return u;
}

double entropy_for_temperature(const MaterialParams& mat, double rho, double theta, const Mat3& F,
                               const SymMat3& Y, double ydet) {
  const double trC = trace(congruence(F, spd_inv_sqrt(Y)));
  return eta_solvent(mat.eos, rho, theta) - entropy_shift(mat, rho, trC, ydet);
}

double total_energy(const PrimitiveView& pv, const MaterialParams& /*mat*/) { return pv.rho * pv.E; }

double total_energy(const ConservedState& u, const MaterialParams& mat) {
  return total_energy(to_primitive(u, mat), mat);
}

double math_entropy(const ConservedState& u, const MaterialParams& mat) {
  const PrimitiveView pv = to_primitive(u, mat);
  return pv.rho * pv.E_math;
}

ConstraintResiduals constraint_residuals(const ConservedState& u, const MaterialParams& mat) {
  const double inv = 1.0 / u.rho;
  const double detY = det(inv * u.rho_Y);
  const double ydet = u.rho_detY * inv;
  return {std::fabs(ydet * detY - 1.0), std::fabs(u.rho * det(inv * u.rho_F) - mat.rhoR) / mat.rhoR};
}

}  // namespace viscoflow
