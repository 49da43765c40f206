#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace viscoflow {

using VecFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

// Component step h_i = rel·(floor + |u_i|).
Eigen::VectorXd fd_steps(const Eigen::VectorXd& u, double rel, double floor = 1.0);

// Central-difference Jacobian; with richardson, combines steps h and h/2.
Eigen::MatrixXd fd_jacobian(const VecFn& f, const Eigen::VectorXd& u, double rel,
                            bool richardson = false);

// One-sided Jacobian, n+1 evaluations of f. Cheap O(h) estimate for wave speeds.
Eigen::MatrixXd fd_jacobian_forward(const VecFn& f, const Eigen::VectorXd& u, double rel);

// Relative step for entropy Hessians, taken with floor ρ since every conserved
// component is ρ times a primitive; a unit floor overshoots at small ρ. Between
// the roundoff eps·|ρẼ|/h² and the h⁴ truncation left by Richardson, 3e-4
// keeps the symmetrizer residual near 1e-6 over the sampled states.
inline constexpr double kHessianFdRel = 3e-4;

// Central-difference Hessian (four-point mixed stencil), symmetrized.
Eigen::MatrixXd fd_hessian(const ScalarFn& s, const Eigen::VectorXd& u, double rel,
                           bool richardson = true, double floor = 1.0);

double min_eigenvalue_sym(const Eigen::MatrixXd& m);

// ‖M − Mᵀ‖_F / ‖M‖_F
double relative_asymmetry(const Eigen::MatrixXd& m);

std::vector<double> leading_principal_minors(const Eigen::MatrixXd& m);

}  // namespace viscoflow
