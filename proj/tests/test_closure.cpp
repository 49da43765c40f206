#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "viscoflow/closure.hpp"

using namespace vt;

namespace {

const MaterialParams kBase = MaterialParams::baseline();

// F = I, Y = s·I with the matching 𝓎, at temperature θ.
PrimitiveView homogeneous(const MaterialParams& mat, double s, double theta, const Vec3& q = {}) {
  const SymMat3 Y = SymMat3::diag(s, s, s);
  const double y = 1.0 / det(Y);
  const double eta = entropy_for_temperature(mat, 1.0, theta, Mat3::identity(), Y, y);
  return to_primitive(from_primitive(mat, 1.0, eta, q, {}, Mat3::identity(), Y, y), mat);
}

MaterialParams fenep(double b) {
  MaterialParams m = kBase;
  m.elastic = ElasticLaw::fenep(0.5, 0.5, b);
  return m;
}

}  // namespace

TEST_CASE("Cauchy stress at equilibrium and at C = 2I") {
  const PrimitiveView eq = homogeneous(kBase, 1.0, 1.0);
  CHECK(max_abs_diff(cauchy_stress(eq, kBase), SymMat3::diag(-0.4, -0.4, -0.4)) < 1e-14);
  // C = 2I needs Y^{-1/2} = 2I.
  const PrimitiveView c2 = homogeneous(kBase, 0.25, 1.0);
  CHECK(max_abs_diff(c2.C, SymMat3::diag(2, 2, 2)) < 1e-14);
  const double t = 1.0 - c2.p;
  CHECK(max_abs_diff(cauchy_stress(c2, kBase), SymMat3::diag(t, t, t)) < 1e-14);
}

TEST_CASE("mean normal stress against an independent evaluation") {
  Rng rng(31);
  for (const MaterialParams& mat : {kBase, fenep(10.0)}) {
    for (int k = 0; k < 100; ++k) {
      const PrimitiveView pv = to_primitive(sample_state(mat, rng), mat);
      const double K = stiffness_K(mat.elastic, pv.theta) * extension_factor(mat.elastic, pv.trC);
      const double mns = -pv.p + mat.alpha * pv.rho * (K * pv.trC / 3.0 - mat.kB * pv.theta);
      const SymMat3 T = cauchy_stress(pv, mat);
      CHECK(std::fabs(trace(T) / 3.0 - mns) < 1e-12 * (1.0 + std::fabs(mns)));
    }
  }
}

TEST_CASE("entropy production examples") {
  CHECK(entropy_production(homogeneous(kBase, 1.0, 1.0), kBase) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(entropy_production(homogeneous(kBase, 1.0, 1.0, {1, 0, 0}), kBase) == doctest::Approx(1.0));
  CHECK(entropy_production(homogeneous(kBase, 0.25, 1.0), kBase) == doctest::Approx(0.75).epsilon(1e-13));
}

TEST_CASE("entropy production equals its expanded trace form") {
  // ‖K C^{1/2} − kθ C^{-1/2}‖² = K² tr C − 6Kkθ + (kθ)² tr C⁻¹
  Rng rng(32);
  for (const MaterialParams& mat : {kBase, fenep(10.0)}) {
    for (int k = 0; k < 200; ++k) {
      const PrimitiveView pv = to_primitive(sample_state(mat, rng), mat);
      const double K = stiffness_K(mat.elastic, pv.theta) * extension_factor(mat.elastic, pv.trC);
      const double kt = mat.kB * pv.theta;
      const double sq = K * K * pv.trC - 6.0 * K * kt + kt * kt * trace(spd_inverse(pv.C));
      const double expect = dot(pv.q, pv.q) / (mat.kappa * pv.theta * pv.theta) +
                            2.0 * mat.alpha * pv.rho / (mat.zeta * pv.theta) * sq;
      CHECK(rel(entropy_production(pv, mat), expect) < 1e-9);
    }
  }
}

TEST_CASE("entropy production is non-negative and vanishes only at equilibrium") {
  Rng rng(33);
  for (const MaterialParams& mat : {kBase, fenep(10.0)}) {
    for (int k = 0; k < 2000; ++k) CHECK(entropy_production(to_primitive(sample_state(mat, rng), mat), mat) >= 0.0);
    // C = c·I with K_eff·c = kθ.
    for (double theta : {0.5, 1.0, 2.0}) {
      const double K = stiffness_K(mat.elastic, theta);
      double c = theta / K;
      if (mat.elastic.kind == ElasticLaw::Kind::FENEP) c = theta * 100.0 / (K * 100.0 + 3.0 * theta);
      const PrimitiveView pv = homogeneous(mat, 1.0 / (c * c), theta);
      CHECK(entropy_production(pv, mat) < 1e-28);
    }
  }
}

TEST_CASE("metric source examples") {
  CHECK(max_abs_diff(relax_source_Y(homogeneous(kBase, 1.0, 1.0), kBase), SymMat3{}) < 1e-15);
  CHECK(max_abs_diff(relax_source_Y(homogeneous(kBase, 4.0, 1.0), kBase), SymMat3::diag(-8, -8, -8)) < 1e-13);
  CHECK(relax_source_detY(homogeneous(kBase, 1.0, 1.0), kBase) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(relax_source_detY(homogeneous(kBase, 4.0, 1.0), kBase) == doctest::Approx(6.0 / 64.0).epsilon(1e-14));
}

TEST_CASE("metric source vanishes at the equilibrium metric for any F") {
  Rng rng(34);
  for (int k = 0; k < 100; ++k) {
    const Mat3 F = random_deformation(rng);
    const double theta = log_uniform(rng, 0.3, 3.0);
    const double K = stiffness_K(kBase.elastic, theta);
    // A = (kθ/K)F⁻¹F⁻ᵀ, Y = A^{-2}
    const SymMat3 A = (theta / K) * inverse_left_cauchy_green(F);
    const SymMat3 Ai = spd_inverse(A);
    const SymMat3 Y = sym(to_mat(Ai) * to_mat(Ai));
    const SymMat3 f = metric_relaxation_rate(F, Y, spd_inv_sqrt(Y), K, theta, kBase.zeta);
    // Measured against the rate off equilibrium, which sets the size of the
    // cancelling terms; roundoff in building Y grows with its condition number.
    const SymMat3 Y2 = 2.0 * Y;
    const SymMat3 g = metric_relaxation_rate(F, Y2, spd_inv_sqrt(Y2), K, theta, kBase.zeta);
    const Vec3 ev = sym_eigen(Y).values;
    CHECK(std::sqrt(frobenius_sq(f) / frobenius_sq(g)) < 1e-14 * (ev[0] / ev[2]));
  }
}

TEST_CASE("𝓎·det Y is a first integral of the metric sources") {
  Rng rng(35);
  for (int k = 0; k < 100; ++k) {
    const PrimitiveView pv = to_primitive(sample_state(kBase, rng), kBase);
    const SymMat3 f = relax_source_Y(pv, kBase);
    const double h = relax_source_detY(pv, kBase);
    // Jacobi: d(det Y)/dt = det Y·tr(Y⁻¹ f)
    const double dY = det(pv.Y) * trace(to_mat(spd_inverse(pv.Y)) * to_mat(f));
    const double rate = h * det(pv.Y) + pv.ydet * dY;
    CHECK(std::fabs(rate) < 1e-10 * (std::fabs(h * det(pv.Y)) + 1.0));
  }
}

TEST_CASE("with F = I the metric source reproduces the upper-convected Maxwell law") {
  // dC/dt = −(4K/ζ)C + (4kθ/ζ)I with C = Y^{-1/2}, θ frozen.
  Rng rng(36);
  for (const MaterialParams& mat : {kBase, fenep(10.0)}) {
    for (int k = 0; k < 50; ++k) {
      const SymMat3 Y = random_spd(rng, 0.3, 3.0);
      const double y = 1.0 / det(Y);
      const double theta = log_uniform(rng, 0.5, 2.0);
      const double eta = entropy_for_temperature(mat, 1.0, theta, Mat3::identity(), Y, y);
      const PrimitiveView pv = to_primitive(from_primitive(mat, 1.0, eta, {}, {}, Mat3::identity(), Y, y), mat);
      const SymMat3 f = relax_source_Y(pv, mat);
      const double h = 1e-5;
      const SymMat3 dC = (1.0 / (2 * h)) * (spd_inv_sqrt(Y + h * f) - spd_inv_sqrt(Y - h * f));
      const double K = stiffness_K(mat.elastic, theta) * extension_factor(mat.elastic, pv.trC);
      const SymMat3 expect = (-4.0 * K / mat.zeta) * pv.C + (4.0 * theta / mat.zeta) * SymMat3::identity();
      CHECK(max_abs_diff(dC, expect) < 1e-8 * (1.0 + std::sqrt(frobenius_sq(expect))));
    }
  }
}

TEST_CASE("heat-flux source") {
  CHECK(norm(relax_source_q(homogeneous(kBase, 1.0, 1.0), kBase)) == 0.0);
  const Vec3 s = relax_source_q(homogeneous(kBase, 1.0, 1.0, {2, 0, 0}), kBase);
  CHECK(s[0] == doctest::Approx(-2.0));
  const Vec3 s2 = relax_source_q(homogeneous(kBase, 1.0, 2.0, {2, 0, 0}), kBase);
  CHECK(s2[0] == doctest::Approx(-1.0));
}

TEST_CASE("full source structure") {
  MaterialParams mat = kBase;
  mat.body_force = {0, 0, -9.81};
  const ConservedState eq = rest_state(mat);
  const SourceVector s0 = full_source(eq, mat);
  CHECK(s0.rho_v[2] == doctest::Approx(-9.81));
  for (int i = 0; i < ConservedState::size; ++i)
    if (i != layout::v + 2) CHECK(std::fabs(s0.pack()[i]) < 1e-15);

  Rng rng(37);
  for (int k = 0; k < 50; ++k) {
    const SourceVector s = full_source(sample_state(kBase, rng), kBase);
    CHECK(s.rho == 0.0);
    for (double x : s.rho_F.a) CHECK(x == 0.0);
  }
}

TEST_CASE("sources conserve total energy on constraint-consistent states") {
  Rng rng(38);
  for (int k = 0; k < 50; ++k) {
    const ConservedState u = consistent_state(kBase, rng);
    const SourceVector s = full_source(u, kBase);
    const double step = 1e-3 * norm2(u) / norm2(s);
    const double dE = derivative4([&](double h) { return total_energy(u + h * s, kBase); }, step);
    CHECK(std::fabs(dE) < 1e-6 * (1.0 + std::fabs(total_energy(u, kBase))));
  }
}

TEST_CASE("temperature diagnostic examples") {
  const Mat3 zero{};
  CHECK(temperature_rhs_diagnostic(homogeneous(kBase, 1.0, 1.0), {}, zero, kBase) ==
        doctest::Approx(0.0).epsilon(1e-15));
  // (2αρ/ζ)·K0·tr(K·C − kθ·I) = 0.5·0.5·3
  CHECK(temperature_rhs_diagnostic(homogeneous(kBase, 0.25, 1.0), {}, zero, kBase) ==
        doctest::Approx(0.75).epsilon(1e-13));
  CHECK(temperature_rhs_diagnostic(homogeneous(kBase, 1.0, 1.0, {1, 0, 0}), {}, zero, kBase) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("temperature diagnostic matches dθ/dt along the source dynamics") {
  // The diagnostic assumes the constraints 𝓎·det Y = 1 and ρ·det F = ρ_R hold.
  Rng rng(39);
  for (const MaterialParams& mat : {kBase, fenep(10.0)}) {
    for (int k = 0; k < 50; ++k) {
      const ConservedState u = consistent_state(mat, rng);
      const PrimitiveView pv = to_primitive(u, mat);
      const SourceVector s = full_source(u, mat);
      const double step = 1e-3 * norm2(u) / norm2(s);
      const double dtheta = derivative4([&](double h) { return to_primitive(u + h * s, mat).theta; }, step);
      const double lhs = pv.rho * mat.eos.cv * dtheta;
      const double rhs = temperature_rhs_diagnostic(pv, {}, Mat3{}, mat);
      CHECK(std::fabs(lhs - rhs) < 1e-6 * (1.0 + std::fabs(rhs)));
    }
  }
}

TEST_CASE("FENE-P stress and sources converge to Hookean as 1/b²") {
  Rng rng(40);
  const ConservedState u = sample_state(kBase, rng);
  const PrimitiveView ph = to_primitive(u, kBase);
  std::vector<double> es, ef;
  for (double b : {1e2, 1e3, 1e4}) {
    const MaterialParams m = fenep(b);
    const PrimitiveView pf = to_primitive(u, m);
    es.push_back(std::sqrt(frobenius_sq(cauchy_stress(pf, m) - cauchy_stress(ph, kBase))));
    ef.push_back(std::sqrt(frobenius_sq(relax_source_Y(pf, m) - relax_source_Y(ph, kBase))));
  }
  for (const auto& e : {es, ef}) {
    CHECK(e[0] / e[1] >= 80.0);
    CHECK(e[0] / e[1] <= 120.0);
    CHECK(e[1] / e[2] >= 80.0);
    CHECK(e[1] / e[2] <= 120.0);
  }
}

TEST_CASE("singular deformation is reported") {
  CHECK_THROWS_AS(inverse_left_cauchy_green(Mat3::diag(1, 1, 0)), SingularF);
}
