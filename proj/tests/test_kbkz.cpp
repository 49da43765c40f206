#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <numbers>

#include "test_support.hpp"
#include "viscoflow/closure.hpp"
#include "viscoflow/numdiff.hpp"

using namespace vt;
namespace kb = viscoflow::kbkz;

namespace {

kb::Model unit_model() {
  kb::Model m;
  m.params = {1.0, 0.0, 1.0, 0.0};  // K¹ = K² = 1 at every θ
  return m;
}

kb::State make(const kb::Model& m, double rho, double theta, const Vec3& q, const Vec3& v, const Mat3& F,
               const SymMat3& Y1, const SymMat3& Y2) {
  const double y1 = 1.0 / det(Y1), y2 = 1.0 / det(Y2);
  const Mat3 G = transpose(cofactor(F));
  const double eta = kb::entropy_for_temperature(m, rho, theta, F, G, Y1, Y2, y1, y2);
  return kb::from_primitive(m, rho, eta, q, v, F, Y1, Y2, y1, y2);
}

// ρ·det F = ρ_R and 𝓎_j·det Y_j = 1.
kb::State consistent(const kb::Model& m, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Mat3 F = random_deformation(rng);
    if (det(F) < 0.0) F = Mat3::diag(-1, 1, 1) * F;
    const SymMat3 Y1 = random_spd(rng, 0.3, 3.0), Y2 = random_spd(rng, 0.3, 3.0);
    try {
      const kb::State u = make(m, m.mat.rhoR / det(F), log_uniform(rng, 0.3, 3.0), {n(rng), n(rng), n(rng)},
                               {n(rng), n(rng), n(rng)}, F, Y1, Y2);
      if (kb::is_admissible(u, m)) return u;
    } catch (const Error&) {
    }
  }
}

double max_abs(const Mat3& a) {
  double d = 0.0;
  for (double x : a.a) d = std::max(d, std::fabs(x));
  return d;
}

}  // namespace

TEST_CASE("stress vanishes beyond −pI at the unit rest state") {
  const kb::Model m = unit_model();
  const kb::State u = make(m, 1.0, 1.0, {}, {}, Mat3::identity(), SymMat3::identity(), SymMat3::identity());
  const kb::Primitive pv = kb::to_primitive(u, m);
  const SymMat3 T = kb::stress(pv, m);
  CHECK(max_abs_diff(T, SymMat3::diag(-pv.p, -pv.p, -pv.p)) < 1e-14);
  CHECK(kb::entropy_production(pv, m) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("two-network equilibrium C1 = C2 = (kθ/K)I carries no extra stress") {
  kb::Model m;
  for (double theta : {0.5, 1.0, 2.0}) {
    const double K = m.params.K1(theta);
    REQUIRE(K == m.params.K2(theta));
    const double c = m.mat.kB * theta / K;
    const SymMat3 Y = SymMat3::diag(1 / (c * c), 1 / (c * c), 1 / (c * c));
    const kb::Primitive pv = kb::to_primitive(make(m, 1.0, theta, {}, {}, Mat3::identity(), Y, Y), m);
    CHECK(max_abs_diff(pv.C1, SymMat3::diag(c, c, c)) < 1e-14);
    CHECK(max_abs_diff(kb::stress(pv, m), SymMat3::diag(-pv.p, -pv.p, -pv.p)) < 1e-13);
    const kb::Sources s = kb::relax_sources(pv, m);
    CHECK(std::sqrt(frobenius_sq(s.Y1) + frobenius_sq(s.Y2)) < 1e-12);
    CHECK(std::fabs(s.y1) + std::fabs(s.y2) < 1e-12);
  }
}

TEST_CASE("stress sign: the second network enters with −K²C2 + K²tr C2·I") {
  // Only C2 away from identity: T + pI = αρK²(tr C2·I − C2) + αρ(K¹ − 3kθ)I.
  const kb::Model m = unit_model();
  const SymMat3 Y2 = SymMat3::diag(4, 1, 1);  // C2 = diag(1/2, 1, 1)
  const kb::Primitive pv = kb::to_primitive(make(m, 1.0, 1.0, {}, {}, Mat3::identity(), SymMat3::identity(), Y2), m);
  const SymMat3 T = kb::stress(pv, m);
  const double iso = -pv.p + (2.5 - 3.0);
  CHECK(T(0, 0) == doctest::Approx(iso + 1.0 - 0.5).epsilon(1e-14));
  CHECK(T(1, 1) == doctest::Approx(iso + 1.0 - 1.0).epsilon(1e-14));
  CHECK(std::fabs(T(0, 1)) < 1e-15);
}

TEST_CASE("mean normal stress matches the trace identity") {
  kb::Model m;
  Rng rng(71);
  for (int k = 0; k < 100; ++k) {
    const kb::Primitive pv = kb::to_primitive(sample_state(m, rng), m);
    const double K1 = m.params.K1(pv.theta), K2 = m.params.K2(pv.theta);
    const double mns =
        -pv.p + m.mat.alpha * pv.rho * ((K1 * pv.trC1 - K2 * pv.trC2) / 3.0 + K2 * pv.trC2 - 3.0 * m.mat.kB * pv.theta);
    CHECK(std::fabs(trace(kb::stress(pv, m)) / 3.0 - mns) < 1e-12 * (1.0 + std::fabs(mns)));
  }
}

TEST_CASE("with F = I the second family uses the first family's formula with K²") {
  kb::Model m;
  m.params = {0.3, 0.7, 0.9, 0.2};
  Rng rng(72);
  for (int k = 0; k < 20; ++k) {
    const SymMat3 Y1 = random_spd(rng, 0.3, 3.0), Y2 = random_spd(rng, 0.3, 3.0);
    const kb::Primitive pv = kb::to_primitive(make(m, 1.0, 1.3, {}, {}, Mat3::identity(), Y1, Y2), m);
    const kb::Sources s = kb::relax_sources(pv, m);
    const SymMat3 expect =
        metric_relaxation_rate(Mat3::identity(), pv.Y2, pv.Y2_inv_sqrt, m.params.K2(pv.theta), m.mat.kB * pv.theta, m.mat.zeta);
    CHECK(max_abs_diff(s.Y2, expect) < 1e-14 * (1.0 + std::sqrt(frobenius_sq(expect))));
  }
}

TEST_CASE("𝓎_j·det Y_j are first integrals of the sources") {
  kb::Model m;
  Rng rng(73);
  for (int k = 0; k < 100; ++k) {
    const kb::Primitive pv = kb::to_primitive(sample_state(m, rng), m);
    const kb::Sources s = kb::relax_sources(pv, m);
    // Jacobi: d(det Y)/dt = det Y·tr(Y⁻¹·Ẏ)
    const auto rate = [](const SymMat3& Y, double y, const SymMat3& dY, double dy) {
      return dy * det(Y) + y * det(Y) * trace(to_mat(spd_inverse(Y)) * to_mat(dY));
    };
    CHECK(std::fabs(rate(pv.Y1, pv.y1, s.Y1, s.y1)) < 1e-10 * (1.0 + std::fabs(s.y1 * det(pv.Y1))));
    CHECK(std::fabs(rate(pv.Y2, pv.y2, s.Y2, s.y2)) < 1e-10 * (1.0 + std::fabs(s.y2 * det(pv.Y2))));
  }
}

TEST_CASE("relaxation keeps both products, ρ, ρF and ρ(Cof F)ᵀ") {
  kb::Model m;
  Rng rng(74);
  for (int k = 0; k < 10; ++k) {
    const kb::State u = consistent(m, rng);
    const kb::State w = kb::relax_substep(u, m, 0.5);
    CHECK(kb::constraint_residuals(w, m).detY < 1e-10);
    CHECK(w.rho == u.rho);
    CHECK(max_abs_diff(w.rho_F, u.rho_F) == 0.0);
    CHECK(max_abs_diff(w.rho_G, u.rho_G) == 0.0);
  }
}

TEST_CASE("sources conserve total energy on constraint-consistent states") {
  kb::Model m;
  Rng rng(75);
  for (int k = 0; k < 30; ++k) {
    const kb::State u = consistent(m, rng);
    const kb::State s = kb::full_source(u, m);
    const double step = 1e-3 * norm2(u) / norm2(s);
    const double dE = derivative4([&](double h) { return kb::total_energy(u + h * s, m); }, step);
    CHECK(std::fabs(dE) < 1e-6 * (1.0 + std::fabs(kb::total_energy(u, m))));
  }
}

TEST_CASE("inverse-deformation block of the flux") {
  kb::Model m;
  const kb::State rest = make(m, 1.0, 1.0, {}, {}, Mat3::identity(), SymMat3::identity(), SymMat3::identity());
  for (int axis = 0; axis < 3; ++axis) CHECK(max_abs(kb::physical_flux(rest, m, axis).rho_G) == 0.0);

  // v = (1,0,0), F = I, direction 1: column i = 1 receives [F⁻¹v]^α = v^α.
  const kb::State u = make(m, 1.0, 1.0, {}, {1, 0, 0}, Mat3::identity(), SymMat3::identity(), SymMat3::identity());
  const Mat3 g = kb::physical_flux(u, m, 0).rho_G;
  CHECK(g(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g(1, 0) == 0.0);
  CHECK(g(2, 0) == 0.0);
  for (int a = 0; a < 3; ++a) {
    CHECK(g(a, 1) == 0.0);
    CHECK(g(a, 2) == 0.0);
  }
  // Direction 2 fills only column 2.
  const Mat3 g2 = kb::physical_flux(u, m, 1).rho_G;
  CHECK(g2(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g2(0, 0) == 0.0);
}

TEST_CASE("uniform flow keeps a constant F⁻¹ exactly") {
  kb::Model m;
  Grid1D<kb::State> g;
  g.boundary = Boundary::Periodic;
  const Mat3 F{{1.1, 0.2, 0.0, -0.1, 0.9, 0.3, 0.0, 0.1, 1.2}};
  g.cells.assign(16, make(m, m.mat.rhoR / det(F), 1.0, {}, {0.4, -0.3, 0.2}, F,
                          SymMat3::identity(), SymMat3::identity()));
  const StepResult<kb::State> r = step(g, kb::System{m}, 0.5);
  for (const kb::State& c : r.grid.cells) CHECK(max_abs_diff(c.rho_G, g.cells[0].rho_G) < 1e-14);
  CHECK(kb::piola_curl_residual(r.grid, m) < 1e-12);
}

TEST_CASE("piola curl residual: uniform, gradient and non-gradient fields") {
  kb::Model m;
  const std::size_t n = 64;
  const auto grid = [&](const std::function<Mat3(double)>& finv) {
    Grid1D<kb::State> g;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      const Mat3 F = inverse(finv(x));
      g.cells.push_back(make(m, m.mat.rhoR / det(F), 1.0, {}, {}, F, SymMat3::identity(), SymMat3::identity()));
    }
    return g;
  };
  const double tau = 2.0 * std::numbers::pi;
  CHECK(kb::piola_curl_residual(grid([](double) { return Mat3::identity(); }), m) < 1e-13);
  // X^α = x^α + 0.1·sin(2πx¹)δ^α_1 + 0.05·x²δ^α_3: only column 1 varies in x¹.
  const Grid1D<kb::State> grad = grid([&](double x) {
    Mat3 a = Mat3::identity();
    a(0, 0) = 1.0 + 0.1 * tau * std::cos(tau * x);
    a(2, 1) = 0.05;
    return a;
  });
  CHECK(kb::piola_curl_residual(grad, m) < 1e-12);
  // Column 2 varying in x¹ is no gradient: ∂₁[F⁻¹]^1_2 = 0.1·2π·cos(2πx¹).
  const Grid1D<kb::State> bad = grid([&](double x) {
    Mat3 a = Mat3::identity();
    a(0, 1) = 0.1 * std::sin(tau * x);
    return a;
  });
  CHECK(kb::piola_curl_residual(bad, m) == doctest::Approx(0.1 * tau).epsilon(0.01));
}

TEST_CASE("cofactor kinematics under F = exp(tL)") {
  CHECK(kb::cofactor_kinematics_check(Mat3{}, 1.0) == 0.0);
  CHECK(kb::cofactor_kinematics_check(Mat3::diag(1, 0, 0), 1.0) < 1e-8);
  const double e = std::exp(1.0);
  CHECK(max_abs_diff(cofactor(Mat3::diag(e, 1, 1)), Mat3::diag(1, e, e)) < 1e-15);
  Rng rng(76);
  for (int k = 0; k < 10; ++k) CHECK(kb::cofactor_kinematics_check(random_mat(rng, 0.5), 0.5) < 1e-7);
}

TEST_CASE("det(Cof F) = det(F)² and Cof F = det F·F⁻ᵀ") {
  Rng rng(77);
  for (int k = 0; k < 50; ++k) {
    const Mat3 F = random_deformation(rng);
    const double d = det(F);
    CHECK(rel(det(cofactor(F)), d * d) < 1e-12);
    CHECK(max_abs_diff(cofactor(F), d * transpose(inverse(F))) < 1e-12 * (1.0 + max_abs(cofactor(F))));
  }
}

TEST_CASE("mathematical entropy is strictly convex in the 40 variables") {
  kb::Model m;
  Rng rng(78);
  int checked = 0;
  for (int k = 0; k < 20; ++k) {
    try {
      CHECK(min_eigenvalue_sym(kb::entropy_hessian(sample_state(m, rng), m)) > 0.0);
      ++checked;
    } catch (const StepTooLarge&) {
    }
  }
  CHECK(checked >= 15);
}

TEST_CASE("symmetrizer: bare Jacobian fails, with both involution terms it holds") {
  kb::Model m;
  const kb::State rest = make(m, 1.0, 1.0, {}, {}, Mat3::identity(), SymMat3::identity(), SymMat3::identity());
  CHECK(kb::symmetrizer_check(rest, m, 0).asym_rel > 0.1);
  CHECK(kb::symmetrizer_check(rest, m, 0, true).asym_rel < 1e-4);
  Rng rng(79);
  int checked = 0;
  for (int k = 0; k < 15; ++k) {
    try {
      const kb::SymmetrizerResult r = kb::symmetrizer_check(sample_state(m, rng), m, k % 3, true);
      CHECK(r.min_eig_H > 0.0);
      CHECK(r.asym_rel < 1e-4);
      ++checked;
    } catch (const StepTooLarge&) {
    }
  }
  CHECK(checked >= 10);
}

TEST_CASE("wave speed bounds the spectral radius") {
  kb::Model m;
  Rng rng(80);
  for (int k = 0; k < 30; ++k) {
    const kb::State u = sample_state(m, rng);
    Eigen::MatrixXd A;
    try {
      A = kb::numerical_jacobian(u, m, 0);
    } catch (const StepTooLarge&) {
      continue;
    }
    const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues().cwiseAbs().maxCoeff();
    CHECK(kb::wave_speed_bound(u, m, 0) >= radius);
  }
}

TEST_CASE("state packing and admissibility") {
  kb::Model m;
  kb::State u = make(m, 1.0, 1.0, {1, 2, 3}, {4, 5, 6}, Mat3::identity(), SymMat3::identity(), SymMat3::identity());
  CHECK(kb::State::unpack(u.pack().data()).pack() == u.pack());
  CHECK(kb::is_admissible(u, m).ok);
  u.rho_Y2 = SymMat3::diag(1, -1, 1);
  CHECK(kb::is_admissible(u, m).reason == Reason::NotSPD);
}
