#include "viscoflow/numdiff.hpp"

#include <cmath>

namespace viscoflow {

Eigen::VectorXd fd_steps(const Eigen::VectorXd& u, double rel, double floor) {
  return rel * (Eigen::VectorXd::Constant(u.size(), floor) + u.cwiseAbs());
}

namespace {

Eigen::MatrixXd jacobian_once(const VecFn& f, const Eigen::VectorXd& u, const Eigen::VectorXd& h) {
  Eigen::MatrixXd J;
  Eigen::VectorXd x = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    x(i) = u(i) + h(i);
    const Eigen::VectorXd fp = f(x);
    x(i) = u(i) - h(i);
    const Eigen::VectorXd fm = f(x);
    x(i) = u(i);
    if (J.size() == 0) J.resize(fp.size(), u.size());
    J.col(i) = (fp - fm) / (2.0 * h(i));
  }
  return J;
}

}  // namespace

Eigen::MatrixXd fd_jacobian_forward(const VecFn& f, const Eigen::VectorXd& u, double rel) {
  const Eigen::VectorXd h = fd_steps(u, rel);
  const Eigen::VectorXd f0 = f(u);
  Eigen::MatrixXd J(f0.size(), u.size());
  Eigen::VectorXd x = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    x(i) = u(i) + h(i);
    J.col(i) = (f(x) - f0) / h(i);
    x(i) = u(i);
  }
  return J;
}

namespace {

Eigen::MatrixXd hessian_once(const ScalarFn& s, const Eigen::VectorXd& u, const Eigen::VectorXd& h) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd x = u;
  const double s0 = s(u);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = u(i) + h(i);
    const double sp = s(x);
    x(i) = u(i) - h(i);
    const double sm = s(x);
    x(i) = u(i);
    H(i, i) = (sp - 2.0 * s0 + sm) / (h(i) * h(i));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          x(i) = u(i) + si * h(i);
          x(j) = u(j) + sj * h(j);
          acc += si * sj * s(x);
        }
      }
      x(i) = u(i);
      x(j) = u(j);
      H(i, j) = H(j, i) = acc / (4.0 * h(i) * h(j));
    }
  }
  return H;
}

}  // namespace

Eigen::MatrixXd fd_jacobian(const VecFn& f, const Eigen::VectorXd& u, double rel, bool richardson) {
  const Eigen::VectorXd h = fd_steps(u, rel);
  Eigen::MatrixXd J = jacobian_once(f, u, h);
  if (!richardson) return J;
  const Eigen::MatrixXd J2 = jacobian_once(f, u, 0.5 * h);
  return (4.0 * J2 - J) / 3.0;
}

Eigen::MatrixXd fd_hessian(const ScalarFn& s, const Eigen::VectorXd& u, double rel, bool richardson,
                           double floor) {
  const Eigen::VectorXd h = fd_steps(u, rel, floor);
  Eigen::MatrixXd H = hessian_once(s, u, h);
  if (richardson) {
    const Eigen::MatrixXd H2 = hessian_once(s, u, 0.5 * h);
    H = (4.0 * H2 - H) / 3.0;
  }
  return 0.5 * (H + H.transpose());
}

double min_eigenvalue_sym(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double relative_asymmetry(const Eigen::MatrixXd& m) {
  const double n = m.norm();
  if (n == 0.0) return 0.0;
  return (m - m.transpose()).norm() / n;
}

std::vector<double> leading_principal_minors(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  for (Eigen::Index k = 1; k <= m.rows(); ++k) out.push_back(m.topLeftCorner(k, k).determinant());
  return out;
}

}  // namespace viscoflow
