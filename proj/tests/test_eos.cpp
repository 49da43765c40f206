#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "viscoflow/eos.hpp"

using namespace vt;

namespace {

const VolumetricEOS kPoly = VolumetricEOS::polytropic(1.0, 1.4, 1.0, 1.0);

double central(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("solvent energy at reference values") {
  CHECK(e_solvent(kPoly, 1.0, 0.0) == 1.0);
  const VolumetricEOS reduced = VolumetricEOS::nasg(1.0, 1.4, 1.0, 1.0, 0.0, 0.0, 0.0);
  CHECK(e_solvent(reduced, 1.0, 0.0) == 1.0);
  CHECK(e_solvent(kPoly, 2.0, 0.7) == doctest::Approx(std::pow(2.0, 0.4) * std::exp(0.7)).epsilon(1e-15));
}

TEST_CASE("temperature and pressure at the reference state") {
  CHECK(theta_solvent(kPoly, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(p_solvent(kPoly, 1.0, 0.0) == doctest::Approx(0.4));
}

TEST_CASE("θ = ∂e/∂η and p = ρ²∂e/∂ρ against finite differences") {
  const VolumetricEOS nasg = VolumetricEOS::nasg(1.3, 1.6, 0.8, 1.2, 0.1, 0.3, 2.0);
  Rng rng(11);
  for (const VolumetricEOS& eos : {kPoly, nasg}) {
    for (int k = 0; k < 200; ++k) {
      const double rho = log_uniform(rng, 0.1, 5.0);
      const double eta = std::normal_distribution<double>(0.0, 1.0)(rng);
      const double de_deta = central([&](double x) { return e_solvent(eos, rho, x); }, eta, 1e-5);
      const double de_drho = central([&](double x) { return e_solvent(eos, x, eta); }, rho, 1e-6 * rho);
      CHECK(rel(theta_solvent(eos, rho, eta), de_deta) < 1e-7);
      const double p = p_solvent(eos, rho, eta);
      CHECK(std::fabs(p - rho * rho * de_drho) < 1e-7 * (std::fabs(p) + eos.p_inf));
    }
  }
}

TEST_CASE("NASG pressure matches its stiffened closed form") {
  const VolumetricEOS nasg = VolumetricEOS::nasg(1.0, 1.4, 1.0, 1.0, 0.1, 0.0, 2.0);
  Rng rng(12);
  for (int k = 0; k < 100; ++k) {
    const double rho = log_uniform(rng, 0.1, 9.0);
    const double eta = std::normal_distribution<double>(0.0, 1.0)(rng);
    const double kernel = e_solvent(nasg, rho, eta) - (1.0 / rho - 0.1) * 2.0;
    const double expect = 0.4 * rho * kernel / (1.0 - 0.1 * rho) - 2.0;
    CHECK(std::fabs(p_solvent(nasg, rho, eta) - expect) < 1e-12 * (1.0 + std::fabs(expect)));
  }
}

TEST_CASE("polytropic identities e = cV·θ and p = (γ−1)ρe") {
  const VolumetricEOS eos = VolumetricEOS::polytropic(2.5, 1.67, 0.5, 3.0);
  Rng rng(13);
  for (int k = 0; k < 200; ++k) {
    const double rho = log_uniform(rng, 0.1, 10.0);
    const double eta = std::normal_distribution<double>(0.0, 1.0)(rng);
    const SolventPoint s = solvent(eos, rho, eta);
    CHECK(rel(s.e, 2.5 * s.theta) < 1e-12);
    CHECK(rel(s.p, 0.67 * rho * s.e) < 1e-12);
  }
}

TEST_CASE("positive temperature and entropy round trip on sampled states") {
  const VolumetricEOS nasg = VolumetricEOS::nasg(1.0, 1.4, 1.0, 1.0, 0.05, 0.2, 1.0);
  Rng rng(14);
  for (const VolumetricEOS& eos : {kPoly, nasg}) {
    for (int k = 0; k < 1000; ++k) {
      const double rho = log_uniform(rng, 0.1, 10.0);
      const double eta = std::normal_distribution<double>(0.0, 2.0)(rng);
      const double theta = theta_solvent(eos, rho, eta);
      CHECK(theta > 0.0);
      CHECK(std::fabs(eta_solvent(eos, rho, theta) - eta) < 1e-10);
      // ψ = e − θη
      CHECK(std::fabs(psi_solvent(eos, rho, theta) - (e_solvent(eos, rho, eta) - theta * eta)) <
            1e-10 * (1.0 + std::fabs(e_solvent(eos, rho, eta))));
    }
  }
}

TEST_CASE("specific heat is −θ∂²ψ/∂θ² and constant") {
  const VolumetricEOS nasg = VolumetricEOS::nasg(1.7, 1.4, 1.0, 1.0, 0.05, 0.2, 1.0);
  for (const VolumetricEOS& eos : {kPoly, nasg}) {
    for (double theta : {0.3, 1.0, 4.0}) {
      const double h = 1e-4 * theta;
      const auto psi = [&](double t) { return psi_solvent(eos, 2.0, t); };
      const double d2 = (psi(theta + h) - 2.0 * psi(theta) + psi(theta - h)) / (h * h);
      CHECK(rel(-theta * d2, cV_solvent(eos, 2.0, theta)) < 1e-6);
      CHECK(cV_solvent(eos, 2.0, theta) == eos.cv);
      const double dp = central([&](double t) { return p_solvent(eos, 2.0, eta_solvent(eos, 2.0, t)); }, theta, h);
      CHECK(rel(dp_dtheta_solvent(eos, 2.0, theta), dp) < 1e-7);
    }
  }
}

TEST_CASE("density domain") {
  const VolumetricEOS nasg = VolumetricEOS::nasg(1.0, 1.4, 1.0, 1.0, 0.1, 0.0, 0.0);
  CHECK_THROWS_AS(e_solvent(kPoly, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(e_solvent(kPoly, -1.0, 0.0), DomainError);
  CHECK_THROWS_AS(e_solvent(nasg, 10.0, 0.0), DomainError);
  CHECK_THROWS_AS(e_solvent(nasg, 11.0, 0.0), DomainError);
  CHECK_NOTHROW(e_solvent(nasg, 9.99, 0.0));
  CHECK_THROWS_AS(eta_solvent(kPoly, 1.0, 0.0), DomainError);
}

TEST_CASE("affine stiffness") {
  const ElasticLaw law = ElasticLaw::hookean(0.5, 0.5);
  CHECK(stiffness_K(law, 1.0) == 1.0);
  CHECK(stiffness_K(law, 1e-300) == doctest::Approx(0.5));
  CHECK(stiffness_K(law, 3.0) == 2.0);
}

TEST_CASE("elastic energy, Hookean and FENE-P") {
  CHECK(elastic_energy(ElasticLaw::hookean(0.5, 0.5), SymMat3::identity(), 1.0, 1.0, 1.0) ==
        doctest::Approx(1.5));
  CHECK(elastic_energy(ElasticLaw::fenep(0.5, 0.5, 10.0), SymMat3::identity(), 1.0, 1.0, 1.0) ==
        doctest::Approx(0.5 * (-100.0 * std::log(0.97))).epsilon(1e-14));
  CHECK_THROWS_AS(elastic_energy(ElasticLaw::fenep(0.5, 0.5, 1.0), SymMat3::identity(), 1.0, 1.0, 1.0),
                  ExtensionExceeded);
  CHECK_THROWS_AS(elastic_energy(ElasticLaw::hookean(0.5, 0.5), SymMat3::diag(1, 1, -1), 1.0, 1.0, 1.0),
                  NotSPD);
}

TEST_CASE("FENE-P energy approaches Hookean as O(1/b²)") {
  const SymMat3 C{{2.0, 0.3, -0.1, 1.5, 0.2, 0.8}};
  const double hooke = elastic_energy(ElasticLaw::hookean(0.5, 0.5), C, 1.3, 1.0, 1.0);
  std::vector<double> err;
  for (double b : {1e2, 1e3, 1e4})
    err.push_back(std::fabs(elastic_energy(ElasticLaw::fenep(0.5, 0.5, b), C, 1.3, 1.0, 1.0) - hooke));
  // Leading term (α/2)K·(tr C)²/(2b²).
  const double lead = 0.5 * stiffness_K(ElasticLaw::hookean(0.5, 0.5), 1.3) * trace(C) * trace(C) / 2.0;
  CHECK(err[0] * 1e4 == doctest::Approx(lead).epsilon(1e-3));
  CHECK(err[1] * 1e6 == doctest::Approx(lead).epsilon(1e-3));
  CHECK(err[0] / err[1] == doctest::Approx(100.0).epsilon(0.01));
}

TEST_CASE("trace measure and extension factor") {
  const ElasticLaw f = ElasticLaw::fenep(0.5, 0.5, 2.0);
  CHECK(extension_factor(ElasticLaw::hookean(0.5, 0.5), 100.0) == 1.0);
  CHECK(extension_factor(f, 3.0) == doctest::Approx(4.0));
  const double h = 1e-6;
  CHECK(rel((trace_measure(f, 3.0 + h) - trace_measure(f, 3.0 - h)) / (2 * h), extension_factor(f, 3.0)) < 1e-8);
  CHECK_THROWS_AS(trace_measure(f, 4.0), ExtensionExceeded);
}
