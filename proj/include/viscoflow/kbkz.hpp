#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "viscoflow/material.hpp"
#include "viscoflow/solver.hpp"
#include "viscoflow/state.hpp"

// Two-network model: a Cauchy-Green-like strain C1 = F·Y1^{-1/2}·Fᵀ and a
// cofactor strain C2 = Cof F·Y2^{-1/2}·(Cof F)ᵀ, with F⁻¹ carried by its own
// conservation law.
namespace viscoflow::kbkz {

namespace layout {
inline constexpr int rho = 0;
inline constexpr int eta = 1;
inline constexpr int q = 2;
inline constexpr int v = 5;
inline constexpr int F = 8;   // row-major F^i_α
inline constexpr int G = 17;  // row-major ρ(Cof F)ᵀ, entry (α, i)
inline constexpr int Y1 = 26;
inline constexpr int Y2 = 32;
inline constexpr int detY1 = 38;
inline constexpr int detY2 = 39;
inline constexpr int size = 40;
}  // namespace layout

struct Params {
  double K0_1 = 0.5, K1_1 = 0.5;
  double K0_2 = 0.5, K1_2 = 0.5;

  double K1(double theta) const { return K0_1 + K1_1 * theta; }
  double K2(double theta) const { return K0_2 + K1_2 * theta; }
};

// Material constants plus the two stiffness laws. mat.elastic is not used.
struct Model {
  MaterialParams mat;
  Params params;
};

struct State {
  static constexpr int size = layout::size;

  double rho = 0.0;
  double rho_eta = 0.0;
  Vec3 rho_q{};
  Vec3 rho_v{};
  Mat3 rho_F;
  Mat3 rho_G;  // ρ(Cof F)ᵀ = ρ_R·F⁻¹ on consistent states
  SymMat3 rho_Y1, rho_Y2;
  double rho_detY1 = 0.0, rho_detY2 = 0.0;

  std::array<double, size> pack() const;
  static State unpack(const double* x);
};

State operator+(const State& a, const State& b);
State operator-(const State& a, const State& b);
State operator*(double s, const State& a);
// The State overloads above would otherwise hide the tensor ones.
using viscoflow::operator+;
using viscoflow::operator-;
using viscoflow::operator*;

struct Primitive {
  double rho, eta;
  Vec3 q, v;
  Mat3 F;
  Mat3 G;  // (Cof F)ᵀ carrier
  SymMat3 Y1, Y2;
  double y1, y2;
  SymMat3 Y1_inv_sqrt, Y2_inv_sqrt;
  double Y_min_eig;
  SymMat3 C1, C2;
  double trC1, trC2;
  double eta_shifted, e_solvent, theta, p;
  double E, E_math;
};

Primitive to_primitive(const State& u, const Model& m);
Admissibility is_admissible(const State& u, const Model& m);

// Consistent initialisation: Cof F from F, both families on the same metric.
State from_primitive(const Model& m, double rho, double eta, const Vec3& q, const Vec3& v,
                     const Mat3& F, const SymMat3& Y1, const SymMat3& Y2, double y1, double y2);
State from_primitive(const Model& m, double rho, double eta, const Vec3& q, const Vec3& v,
                     const Mat3& F, const Mat3& G, const SymMat3& Y1, const SymMat3& Y2, double y1,
                     double y2);

double entropy_shift(const Model& m, double rho, double trC1, double trC2, double y1, double y2);
double entropy_for_temperature(const Model& m, double rho, double theta, const Mat3& F,
                               const Mat3& G, const SymMat3& Y1, const SymMat3& Y2, double y1,
                               double y2);

// T = −pI + αρ[K¹C1 − K²C2 + (K²·tr C2 − 3k_Bθ)I]
SymMat3 stress(const Primitive& pv, const Model& m);
double entropy_production(const Primitive& pv, const Model& m);

struct Sources {
  SymMat3 Y1, Y2;
  double y1, y2;
};
// Rates of Y1, Y2, 𝓎1, 𝓎2; family 2 uses Cof F in place of F.
Sources relax_sources(const Primitive& pv, const Model& m);
State full_source(const State& u, const Model& m);

State physical_flux(const State& u, const Model& m, int axis);
double entropy_flux(const State& u, const Model& m, int axis);
double math_entropy(const State& u, const Model& m);
double total_energy(const State& u, const Model& m);

Eigen::VectorXd to_vector(const State& u);
State state_from_vector(const Eigen::VectorXd& x);

Eigen::MatrixXd numerical_jacobian(const State& u, const Model& m, int axis, double fd_rel = 1e-6,
                                   bool richardson = false);
Eigen::MatrixXd entropy_hessian(const State& u, const Model& m);

// Godunov matrix for the involutions ∂_k(ρF^k_α) = 0 and curl F⁻¹ = 0; see
// the base-model involution_term.
Eigen::MatrixXd involution_term(const State& u, const Model& m, int axis);

struct SymmetrizerResult {
  double min_eig_H;
  double asym_rel;
};
SymmetrizerResult symmetrizer_check(const State& u, const Model& m, int axis, bool godunov = false);

double wave_speed_bound(const State& u, const Model& m, int axis);
double analytic_wave_bound(const Primitive& pv, const Model& m, int axis);

struct Residuals {
  double detY;  // max over both families of |𝓎·det Y − 1|
  double rhoR;  // |ρ·det F − ρ_R|/ρ_R
};
Residuals constraint_residuals(const State& u, const Model& m);

// As the base-model relaxation_time, taking the faster metric family.
double relaxation_time(const Primitive& pv, const Model& m);
State relax_substep(const State& u, const Model& m, double dt);
CellSummary summarize(const State& u, const Model& m);

struct System {
  using State = kbkz::State;
  Model model;

  State flux(const State& u) const { return physical_flux(u, model, 0); }
  double wave_speed(const State& u) const { return wave_speed_bound(u, model, 0); }
  State relax(const State& u, double dt) const { return relax_substep(u, model, dt); }
  Admissibility admissible(const State& u) const { return is_admissible(u, model); }
  CellSummary summarize(const State& u) const { return kbkz::summarize(u, model); }
};

// Max over cells and rows α of the central-difference curl of [F⁻¹]^α_·; in a
// slab only ∂/∂x¹ survives, so the entries are ∂₁[F⁻¹]^α_2 and ∂₁[F⁻¹]^α_3.
double piola_curl_residual(const Grid1D<State>& g, const Model& m);

// With F(t) = exp(tL): max over sample times in [0, t_end] of the difference
// between a central time difference of Cof F and ((tr L)I − Lᵀ)·Cof F.
double cofactor_kinematics_check(const Mat3& L, double t_end);

}  // namespace viscoflow::kbkz
