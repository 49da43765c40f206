#include "viscoflow/kbkz.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "viscoflow/closure.hpp"
#include "viscoflow/flux.hpp"
#include "viscoflow/numdiff.hpp"

namespace viscoflow::kbkz {

std::array<double, State::size> State::pack() const {
  std::array<double, size> x{};
  x[layout::rho] = rho;
  x[layout::eta] = rho_eta;
  for (int i = 0; i < 3; ++i) {
    x[layout::q + i] = rho_q[i];
    x[layout::v + i] = rho_v[i];
  }
  for (int k = 0; k < 9; ++k) {
    x[layout::F + k] = rho_F.a[k];
    x[layout::G + k] = rho_G.a[k];
  }
  for (int k = 0; k < 6; ++k) {
    x[layout::Y1 + k] = rho_Y1.s[k];
    x[layout::Y2 + k] = rho_Y2.s[k];
  }
  x[layout::detY1] = rho_detY1;
  x[layout::detY2] = rho_detY2;
  return x;
}

State State::unpack(const double* x) {
  State u;
  u.rho = x[layout::rho];
  u.rho_eta = x[layout::eta];
  for (int i = 0; i < 3; ++i) {
    u.rho_q[i] = x[layout::q + i];
    u.rho_v[i] = x[layout::v + i];
  }
  for (int k = 0; k < 9; ++k) {
    u.rho_F.a[k] = x[layout::F + k];
    u.rho_G.a[k] = x[layout::G + k];
  }
  for (int k = 0; k < 6; ++k) {
    u.rho_Y1.s[k] = x[layout::Y1 + k];
    u.rho_Y2.s[k] = x[layout::Y2 + k];
  }
  u.rho_detY1 = x[layout::detY1];
  u.rho_detY2 = x[layout::detY2];
  return u;
}

State operator+(const State& a, const State& b) {
  auto x = a.pack();
  const auto y = b.pack();
  for (int k = 0; k < State::size; ++k) x[k] += y[k];
  return State::unpack(x.data());
}

State operator-(const State& a, const State& b) {
  auto x = a.pack();
  const auto y = b.pack();
  for (int k = 0; k < State::size; ++k) x[k] -= y[k];
  return State::unpack(x.data());
}

State operator*(double s, const State& a) {
  auto x = a.pack();
  for (double& c : x) c *= s;
  return State::unpack(x.data());
}

double entropy_shift(const Model& m, double rho, double trC1, double trC2, double y1, double y2) {
  const MaterialParams& mat = m.mat;
  const double log_det = 6.0 * std::log(mat.rhoR / rho) + 0.5 * std::log(y1) + 0.5 * std::log(y2);
  return 0.5 * mat.alpha * (m.params.K1_1 * trC1 + m.params.K1_2 * trC2 - mat.kB * log_det);
}

namespace {

// Metric inverse square root, or Reason::NotSPD.
Reason metric(const SymMat3& Y, SymMat3& inv_sqrt, double& min_eig) {
  const SymEigen e = sym_eigen(Y);
  min_eig = e.values[2];
  if (!(e.values[2] > spd_eps(Y))) return Reason::NotSPD;
  inv_sqrt = from_eigen({1.0 / std::sqrt(e.values[0]), 1.0 / std::sqrt(e.values[1]),
                         1.0 / std::sqrt(e.values[2])},
                        e.vectors);
  return Reason::Ok;
}

Reason evaluate(const State& u, const Model& m, Primitive& pv) {
  const MaterialParams& mat = m.mat;
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
  pv.G = inv * u.rho_G;
  pv.Y1 = inv * u.rho_Y1;
  pv.Y2 = inv * u.rho_Y2;
  pv.y1 = u.rho_detY1 * inv;
  pv.y2 = u.rho_detY2 * inv;

  double e1 = 0.0, e2 = 0.0;
  if (metric(pv.Y1, pv.Y1_inv_sqrt, e1) != Reason::Ok) return Reason::NotSPD;
  if (metric(pv.Y2, pv.Y2_inv_sqrt, e2) != Reason::Ok) return Reason::NotSPD;
  pv.Y_min_eig = std::min(e1, e2);
  if (!(pv.y1 > 0.0) || !(pv.y2 > 0.0)) return Reason::NonPositiveDetY;

  pv.C1 = congruence(pv.F, pv.Y1_inv_sqrt);
  pv.C2 = congruence(transpose(pv.G), pv.Y2_inv_sqrt);
  pv.trC1 = trace(pv.C1);
  pv.trC2 = trace(pv.C2);

  pv.eta_shifted = pv.eta + entropy_shift(m, pv.rho, pv.trC1, pv.trC2, pv.y1, pv.y2);
  const SolventPoint s = solvent(mat.eos, pv.rho, pv.eta_shifted);
  if (!(s.theta > 0.0) || !std::isfinite(s.theta) || !std::isfinite(s.e))
    return Reason::NonPositiveTemperature;
  pv.e_solvent = s.e;
  pv.theta = s.theta;
  pv.p = s.p;

  pv.E = 0.5 * dot(pv.v, pv.v) + s.e + 0.5 * mat.tau0 / mat.kappa * dot(pv.q, pv.q) +
         0.5 * mat.alpha * (m.params.K0_1 * pv.trC1 + m.params.K0_2 * pv.trC2);
  pv.E_math = pv.E + 0.5 * mat.e_ref * (frobenius_sq(pv.Y1) + frobenius_sq(pv.Y2));
  return Reason::Ok;
}

}  // namespace

Primitive to_primitive(const State& u, const Model& m) {
  Primitive pv{};
  const Reason r = evaluate(u, m, pv);
  if (r != Reason::Ok) throw Inadmissible(r);
  return pv;
}

Admissibility is_admissible(const State& u, const Model& m) {
  Primitive pv{};
  const Reason r = evaluate(u, m, pv);
  return {r == Reason::Ok, r};
}

State from_primitive(const Model& m, double rho, double eta, const Vec3& q, const Vec3& v,
                     const Mat3& F, const Mat3& G, const SymMat3& Y1, const SymMat3& Y2, double y1,
                     double y2) {
  (void)m;
  State u;
  u.rho = rho;
  u.rho_eta = rho * eta;
  u.rho_q = rho * q;
  u.rho_v = rho * v;
  u.rho_F = rho * F;
  u.rho_G = rho * G;
  u.rho_Y1 = rho * Y1;
  u.rho_Y2 = rho * Y2;
  u.rho_detY1 = rho * y1;
  u.rho_detY2 = rho * y2;
  return u;
}

State from_primitive(const Model& m, double rho, double eta, const Vec3& q, const Vec3& v,
                     const Mat3& F, const SymMat3& Y1, const SymMat3& Y2, double y1, double y2) {
  return from_primitive(m, rho, eta, q, v, F, transpose(cofactor(F)), Y1, Y2, y1, y2);
}

double entropy_for_temperature(const Model& m, double rho, double theta, const Mat3& F,
                               const Mat3& G, const SymMat3& Y1, const SymMat3& Y2, double y1,
                               double y2) {
  const double trC1 = trace(congruence(F, spd_inv_sqrt(Y1)));
  const double trC2 = trace(congruence(transpose(G), spd_inv_sqrt(Y2)));
  return eta_solvent(m.mat.eos, rho, theta) - entropy_shift(m, rho, trC1, trC2, y1, y2);
}

SymMat3 stress(const Primitive& pv, const Model& m) {
  const double ar = m.mat.alpha * pv.rho;
  const double K1 = m.params.K1(pv.theta), K2 = m.params.K2(pv.theta);
  const double iso = -pv.p + ar * (K2 * pv.trC2 - 3.0 * m.mat.kB * pv.theta);
  return (ar * K1) * pv.C1 - (ar * K2) * pv.C2 + SymMat3::diag(iso, iso, iso);
}

double entropy_production(const Primitive& pv, const Model& m) {
  const MaterialParams& mat = m.mat;
  const double kt = mat.kB * pv.theta;
  const double heat = dot(pv.q, pv.q) / (mat.kappa * pv.theta * pv.theta);
  const double sq = strain_dissipation(pv.C1, m.params.K1(pv.theta), kt) +
                    strain_dissipation(pv.C2, m.params.K2(pv.theta), kt);
  return heat + 2.0 * mat.alpha * pv.rho / (mat.drag(pv.theta) * pv.theta) * sq;
}

Sources relax_sources(const Primitive& pv, const Model& m) {
  const double kt = m.mat.kB * pv.theta;
  const double zeta = m.mat.drag(pv.theta);
  const double K1 = m.params.K1(pv.theta), K2 = m.params.K2(pv.theta);
  const Mat3 cof = transpose(pv.G);
  Sources s;
  s.Y1 = metric_relaxation_rate(pv.F, pv.Y1, pv.Y1_inv_sqrt, K1, kt, zeta);
  s.Y2 = metric_relaxation_rate(cof, pv.Y2, pv.Y2_inv_sqrt, K2, kt, zeta);
  s.y1 = det_relaxation_rate(pv.F, pv.Y1, pv.Y1_inv_sqrt, pv.y1, K1, kt, zeta);
  s.y2 = det_relaxation_rate(cof, pv.Y2, pv.Y2_inv_sqrt, pv.y2, K2, kt, zeta);
  return s;
}

State full_source(const State& u, const Model& m) {
  const Primitive pv = to_primitive(u, m);
  const Sources r = relax_sources(pv, m);
  State s;
  s.rho_eta = entropy_production(pv, m);
  s.rho_q = (-1.0 / (m.mat.tau0 * pv.theta)) * pv.q;
  s.rho_v = pv.rho * m.mat.body_force;
  s.rho_Y1 = pv.rho * r.Y1;
  s.rho_Y2 = pv.rho * r.Y2;
  s.rho_detY1 = pv.rho * r.y1;
  s.rho_detY2 = pv.rho * r.y2;
  return s;
}

State physical_flux(const State& u, const Model& m, int axis) {
  const Primitive pv = to_primitive(u, m);
  const int j = axis;
  const double rho = pv.rho;
  const double vj = pv.v[j];
  const SymMat3 T = stress(pv, m);
  const Vec3 Gv = pv.G * pv.v;
  State f;
  f.rho = rho * vj;
  f.rho_eta = rho * pv.eta * vj + pv.q[j] / pv.theta;
  const double heat = m.mat.kappa / m.mat.tau0 * std::log(pv.theta);
  for (int i = 0; i < 3; ++i) {
    f.rho_q[i] = rho * pv.q[i] * vj + (i == j ? heat : 0.0);
    f.rho_v[i] = rho * pv.v[i] * vj - T(i, j);
    for (int a = 0; a < 3; ++a) f.rho_F(i, a) = rho * (pv.F(i, a) * vj - pv.v[i] * pv.F(j, a));
  }
  // ∂_t[F⁻¹]^α_i + ∂_i([F⁻¹]^α_k v^k) = 0: only the column i = j carries flux.
  for (int a = 0; a < 3; ++a) f.rho_G(a, j) = rho * Gv[a];
  f.rho_Y1 = (rho * vj) * pv.Y1;
  f.rho_Y2 = (rho * vj) * pv.Y2;
  f.rho_detY1 = rho * pv.y1 * vj;
  f.rho_detY2 = rho * pv.y2 * vj;
  return f;
}

double entropy_flux(const State& u, const Model& m, int axis) {
  const Primitive pv = to_primitive(u, m);
  const Vec3 Tv = to_mat(stress(pv, m)) * pv.v;
  return pv.rho * pv.E_math * pv.v[axis] - Tv[axis] + pv.q[axis];
}

double math_entropy(const State& u, const Model& m) {
  const Primitive pv = to_primitive(u, m);
  return pv.rho * pv.E_math;
}

double total_energy(const State& u, const Model& m) {
  const Primitive pv = to_primitive(u, m);
  return pv.rho * pv.E;
}

Eigen::VectorXd to_vector(const State& u) {
  const auto x = u.pack();
  return Eigen::Map<const Eigen::VectorXd>(x.data(), State::size);
}

State state_from_vector(const Eigen::VectorXd& x) { return State::unpack(x.data()); }

namespace {

State checked(const Eigen::VectorXd& x, const Model& m) {
  const State s = state_from_vector(x);
  const Admissibility a = is_admissible(s, m);
  if (!a) throw StepTooLarge(std::string("finite-difference perturbation left the admissible set: ") +
                             to_string(a.reason));
  return s;
}

}  // namespace

Eigen::MatrixXd numerical_jacobian(const State& u, const Model& m, int axis, double fd_rel,
                                   bool richardson) {
  to_primitive(u, m);
  const VecFn f = [&](const Eigen::VectorXd& x) {
    return to_vector(physical_flux(checked(x, m), m, axis));
  };
  return fd_jacobian(f, to_vector(u), fd_rel, richardson);
}

Eigen::MatrixXd entropy_hessian(const State& u, const Model& m) {
  to_primitive(u, m);
  const ScalarFn s = [&](const Eigen::VectorXd& x) { return math_entropy(checked(x, m), m); };
  return fd_hessian(s, to_vector(u), kHessianFdRel, true, u.rho);
}

Eigen::MatrixXd involution_term(const State& u, const Model& m, int axis) {
  const Primitive pv = to_primitive(u, m);
  const Mat3 P = (m.mat.alpha * m.params.K1(pv.theta)) * (pv.F * to_mat(pv.Y1_inv_sqrt));
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(State::size, State::size);
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) {
      const int col = layout::F + 3 * axis + a;
      t(layout::F + 3 * i + a, col) = pv.v[i];
      t(layout::v + i, col) = P(i, a);
    }
  // Curl of F⁻¹: the pairing defect in column (β,m), m ≠ j, is
  // φ = v^j·W^β_m − v^m·W^β_j with W = ∂(ρẼ)/∂(ρG) = αK²·Y2^{-1/2}·G.
  const Mat3 W = (m.mat.alpha * m.params.K2(pv.theta)) * (to_mat(pv.Y2_inv_sqrt) * pv.G);
  const int j = axis;
  for (int b = 0; b < 3; ++b)
    for (int k = 0; k < 3; ++k) {
      if (k == j) continue;
      const int col = layout::G + 3 * b + k;
      t(layout::v + j, col) += W(b, k);
      t(layout::v + k, col) -= W(b, j);
      t(layout::G + 3 * b + k, col) += pv.v[j];
      t(layout::G + 3 * b + j, col) -= pv.v[k];
    }
  return t;
}

SymmetrizerResult symmetrizer_check(const State& u, const Model& m, int axis, bool godunov) {
  const Eigen::MatrixXd H = entropy_hessian(u, m);
  Eigen::MatrixXd A = numerical_jacobian(u, m, axis);
  if (godunov) A += involution_term(u, m, axis);
  return {min_eigenvalue_sym(H), relative_asymmetry(H * A)};
}

double analytic_wave_bound(const Primitive& pv, const Model& m, int axis) {
  const VolumetricEOS& eos = m.mat.eos;
  const double free = eos.kind == VolumetricEOS::Kind::NASG ? 1.0 - eos.b * pv.rho : 1.0;
  const double acoustic = std::max(eos.gamma * (pv.p + eos.p_inf) / (pv.rho * free), 0.0);
  const double elastic = 3.0 * m.mat.alpha *
                         (m.params.K1(pv.theta) * pv.trC1 + 3.0 * m.params.K2(pv.theta) * pv.trC2);
  const double thermal = m.mat.kappa / (m.mat.tau0 * pv.rho * pv.theta);
  return std::fabs(pv.v[axis]) + std::sqrt(acoustic + elastic + thermal);
}

double wave_speed_bound(const State& u, const Model& m, int axis) {
  try {
    // One-sided differences: the 1.2 safety factor dwarfs their O(1e-6) error.
    const VecFn f = [&](const Eigen::VectorXd& x) {
      return to_vector(physical_flux(checked(x, m), m, axis));
    };
    const double r = power_iteration_radius(fd_jacobian_forward(f, to_vector(u), kFdRel), kPowerIterations);
    if (std::isfinite(r)) return kWaveSpeedSafety * r;
  } catch (const StepTooLarge&) {
  }
  return kWaveSpeedSafety * analytic_wave_bound(to_primitive(u, m), m, axis);
}

Residuals constraint_residuals(const State& u, const Model& m) {
  const double inv = 1.0 / u.rho;
  const double r1 = std::fabs(u.rho_detY1 * inv * det(inv * u.rho_Y1) - 1.0);
  const double r2 = std::fabs(u.rho_detY2 * inv * det(inv * u.rho_Y2) - 1.0);
  return {std::max(r1, r2),
          std::fabs(u.rho * det(inv * u.rho_F) - m.mat.rhoR) / m.mat.rhoR};
}

double relaxation_time(const Primitive& pv, const Model& m) {
  const double kt = m.mat.kB * pv.theta;
  const double rate = std::max(metric_rate_bound(pv.F, pv.Y1, m.params.K1(pv.theta), kt),
                               metric_rate_bound(transpose(pv.G), pv.Y2, m.params.K2(pv.theta), kt));
  const double strain = m.mat.drag(pv.theta) / (4.0 * rate);
  const double heat = pv.rho * m.mat.tau0 * pv.theta;
  const double sigma = entropy_production(pv, m);
  const double thermal = sigma > 0.0 ? pv.rho * m.mat.eos.cv / (2.0 * sigma) : heat;
  return std::min({strain, heat, thermal});
}

State relax_substep(const State& u, const Model& m, double dt) {
  const auto source = [&](const State& x) { return full_source(x, m); };
  const auto admissible = [&](const State& x) { return is_admissible(x, m); };
  const auto product = [](double rho, double rho_y, const SymMat3& rho_Y) {
    return (rho_y / rho) * det((1.0 / rho) * rho_Y);
  };
  const double i1 = product(u.rho, u.rho_detY1, u.rho_Y1), i2 = product(u.rho, u.rho_detY2, u.rho_Y2);
  State w = u;
  double t = 0.0;
  while (t < dt) {
    const double h = std::min(kRelaxSafety * relaxation_time(to_primitive(w, m), m), dt - t);
    w = rk4_relax(w, h, h, source, admissible);
    // Both 𝓎_j·det Y_j are first integrals; RK4 alone lets them drift.
    w.rho_detY1 = w.rho * i1 / det((1.0 / w.rho) * w.rho_Y1);
    w.rho_detY2 = w.rho * i2 / det((1.0 / w.rho) * w.rho_Y2);
    t += h;
    if (dt - t < 1e-12 * dt) break;
  }
  return w;
}

CellSummary summarize(const State& u, const Model& m) {
  const Primitive pv = to_primitive(u, m);
  const Residuals r = constraint_residuals(u, m);
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
  c.sigma = entropy_production(pv, m);
  return c;
}

double piola_curl_residual(const Grid1D<State>& g, const Model& m) {
  const std::size_t n = g.size();
  const double inv_2dx = 0.5 / g.dx();
  const auto finv = [&](std::size_t i) { return (1.0 / m.mat.rhoR) * g.cells[i].rho_G; };
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t l, r;
    if (g.boundary == Boundary::Periodic) {
      l = (i + n - 1) % n;
      r = (i + 1) % n;
    } else {
      l = i == 0 ? 0 : i - 1;
      r = i + 1 == n ? n - 1 : i + 1;
    }
    const Mat3 a = finv(l), b = finv(r);
    for (int al = 0; al < 3; ++al)
      for (int k = 1; k < 3; ++k) worst = std::max(worst, std::fabs(b(al, k) - a(al, k)) * inv_2dx);
  }
  return worst;
}

double cofactor_kinematics_check(const Mat3& L, double t_end) {
  Eigen::Matrix3d l;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) l(i, j) = L(i, j);
  const auto cof_at = [&](double t) {
    const Eigen::Matrix3d e = (t * l).exp();
    Mat3 F;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) F(i, j) = e(i, j);
    return cofactor(F);
  };
  const Mat3 rate = trace(L) * Mat3::identity() - transpose(L);
  const double h = 1e-4 * std::max(1.0, std::fabs(t_end));
  double worst = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double t = t_end * k / 10.0;
    // Fourth-order central difference in time.
    const Mat3 d = (1.0 / (12.0 * h)) *
                   (cof_at(t - 2 * h) - 8.0 * cof_at(t - h) + 8.0 * cof_at(t + h) - cof_at(t + 2 * h));
    const Mat3 res = d - rate * cof_at(t);
    for (double x : res.a) worst = std::max(worst, std::fabs(x));
  }
  return worst;
}

}  // namespace viscoflow::kbkz
