#include "viscoflow/flux.hpp"

#include <cmath>

#include "viscoflow/closure.hpp"
#include "viscoflow/numdiff.hpp"

namespace viscoflow {

Eigen::VectorXd to_vector(const ConservedState& u) {
  const auto x = u.pack();
  return Eigen::Map<const Eigen::VectorXd>(x.data(), ConservedState::size);
}

ConservedState state_from_vector(const Eigen::VectorXd& x) { return ConservedState::unpack(x.data()); }

FluxVector physical_flux(const PrimitiveView& pv, const MaterialParams& mat, int axis) {
  const int j = axis;
  const double rho = pv.rho;
  const double vj = pv.v[j];
  const SymMat3 T = cauchy_stress(pv, mat);
  FluxVector f;
  f.rho = rho * vj;
  f.rho_eta = rho * pv.eta * vj + pv.q[j] / pv.theta;
  const double heat = mat.kappa / mat.tau0 * std::log(pv.theta);
  for (int i = 0; i < 3; ++i) {
    f.rho_q[i] = rho * pv.q[i] * vj + (i == j ? heat : 0.0);
    f.rho_v[i] = rho * pv.v[i] * vj - T(i, j);
    for (int a = 0; a < 3; ++a) f.rho_F(i, a) = rho * (pv.F(i, a) * vj - pv.v[i] * pv.F(j, a));
  }
  f.rho_Y = (rho * vj) * pv.Y;
  f.rho_detY = rho * pv.ydet * vj;
  return f;
}

FluxVector physical_flux(const ConservedState& u, const MaterialParams& mat, int axis) {
  return physical_flux(to_primitive(u, mat), mat, axis);
}

double entropy_flux(const ConservedState& u, const MaterialParams& mat, int axis) {
  const PrimitiveView pv = to_primitive(u, mat);
  const Vec3 Tv = to_mat(cauchy_stress(pv, mat)) * pv.v;
  return pv.rho * pv.E_math * pv.v[axis] - Tv[axis] + pv.q[axis];
}

namespace {

ConservedState checked(const Eigen::VectorXd& x, const MaterialParams& mat) {
  const ConservedState s = state_from_vector(x);
  const Admissibility a = is_admissible(s, mat);
  if (!a) throw StepTooLarge(std::string("finite-difference perturbation left the admissible set: ") +
                             to_string(a.reason));
  return s;
}

}  // namespace

Eigen::MatrixXd numerical_jacobian(const ConservedState& u, const MaterialParams& mat, int axis,
                                   double fd_rel, bool richardson) {
  to_primitive(u, mat);
  const VecFn f = [&](const Eigen::VectorXd& x) {
    return to_vector(physical_flux(checked(x, mat), mat, axis));
  };
  return fd_jacobian(f, to_vector(u), fd_rel, richardson);
}

Eigen::MatrixXd entropy_hessian(const ConservedState& u, const MaterialParams& mat) {
  to_primitive(u, mat);
  const ScalarFn s = [&](const Eigen::VectorXd& x) { return math_entropy(checked(x, mat), mat); };
  return fd_hessian(s, to_vector(u), kHessianFdRel, true, u.rho);
}

Eigen::MatrixXd involution_term(const ConservedState& u, const MaterialParams& mat, int axis) {
  const PrimitiveView pv = to_primitive(u, mat);
  const Mat3 P = (mat.alpha * effective_stiffness(pv, mat)) * (pv.F * to_mat(pv.Y_inv_sqrt));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ConservedState::size, ConservedState::size);
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) {
      const int col = layout::F + 3 * axis + a;
      m(layout::F + 3 * i + a, col) = pv.v[i];
      m(layout::v + i, col) = P(i, a);
    }
  return m;
}

SymmetrizerResult symmetrizer_check(const ConservedState& u, const MaterialParams& mat, int axis,
                                    Involution mode) {
  const Eigen::MatrixXd H = entropy_hessian(u, mat);
  Eigen::MatrixXd A = numerical_jacobian(u, mat, axis);
  if (mode == Involution::GodunovTerm) A += involution_term(u, mat, axis);
  return {min_eigenvalue_sym(H), relative_asymmetry(H * A)};
}

double power_iteration_radius(const Eigen::MatrixXd& m, int iterations) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = 1.0 + 0.1 * static_cast<double>(i % 7);
  x.normalize();
  double prev = 0.0, last = 0.0;
  for (int k = 0; k < iterations; ++k) {
    Eigen::VectorXd y = m * x;
    const double r = y.norm();
    prev = last;
    last = r;
    if (r == 0.0 || !std::isfinite(r)) break;
    x = y / r;
  }
  return std::max(prev, last);
}

double analytic_wave_bound(const PrimitiveView& pv, const MaterialParams& mat, int axis) {
  const VolumetricEOS& eos = mat.eos;
  const double free = eos.kind == VolumetricEOS::Kind::NASG ? 1.0 - eos.b * pv.rho : 1.0;
  const double acoustic = std::max(eos.gamma * (pv.p + eos.p_inf) / (pv.rho * free), 0.0);
  const double elastic = 3.0 * mat.alpha * effective_stiffness(pv, mat) * pv.trC;
  const double thermal = mat.kappa / (mat.tau0 * pv.rho * pv.theta);
  return std::fabs(pv.v[axis]) + std::sqrt(acoustic + elastic + thermal);
}

double wave_speed_bound(const ConservedState& u, const MaterialParams& mat, int axis) {
  try {
    // One-sided differences: the 1.2 safety factor dwarfs their O(1e-6) error.
    const VecFn f = [&](const Eigen::VectorXd& x) {
      return to_vector(physical_flux(checked(x, mat), mat, axis));
    };
    const double r = power_iteration_radius(fd_jacobian_forward(f, to_vector(u), kFdRel), kPowerIterations);
    if (std::isfinite(r)) return kWaveSpeedSafety * r;
  } catch (const StepTooLarge&) {
  }
  return kWaveSpeedSafety * analytic_wave_bound(to_primitive(u, mat), mat, axis);
}

double max_wave_speed(const ConservedState& uL, const ConservedState& uR, const MaterialParams& mat,
                      int axis) {
  return std::max(wave_speed_bound(uL, mat, axis), wave_speed_bound(uR, mat, axis));
}

}  // namespace viscoflow
