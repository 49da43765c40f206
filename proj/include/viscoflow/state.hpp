#pragma once

#include <array>

#include "viscoflow/errors.hpp"
#include "viscoflow/material.hpp"
#include "viscoflow/tensor.hpp"

namespace viscoflow {

// Offsets of each block inside the packed 24-vector.
namespace layout {
inline constexpr int rho = 0;
inline constexpr int eta = 1;
inline constexpr int q = 2;
inline constexpr int v = 5;
inline constexpr int F = 8;   // row-major F^i_α
inline constexpr int Y = 17;  // xx, xy, xz, yy, yz, zz
inline constexpr int detY = 23;
inline constexpr int size = 24;
}  // namespace layout

struct ConservedState {
  static constexpr int size = layout::size;

  double rho = 0.0;
  double rho_eta = 0.0;
  Vec3 rho_q{};
  Vec3 rho_v{};
  Mat3 rho_F;
  SymMat3 rho_Y;
  double rho_detY = 0.0;  // ρ𝓎, with 𝓎 the independent stand-in for 1/det Y

  std::array<double, size> pack() const;
  static ConservedState unpack(const double* x);
};

ConservedState operator+(const ConservedState& a, const ConservedState& b);
ConservedState operator-(const ConservedState& a, const ConservedState& b);
ConservedState operator*(double s, const ConservedState& a);

struct PrimitiveView {
  double rho;
  double eta;
  Vec3 q;
  Vec3 v;
  Mat3 F;
  SymMat3 Y;
  double ydet;  // 𝓎
  SymMat3 Y_inv_sqrt;
  double Y_min_eig;
  SymMat3 C;  // F·Y^{-1/2}·Fᵀ
  double trC;
  double eta_shifted;  // η̃
  double e_solvent;    // e_s(ρ, η̃)
  double theta;
  double p;
  double E;       // specific total energy
  double E_math;  // specific mathematical entropy Ẽ
};

struct Admissibility {
  bool ok;
  Reason reason;
  explicit operator bool() const { return ok; }
};

// η̃ − η: (α/2)(K1·φ(tr C) − k_B·log((ρ_R/ρ)²·𝓎^{1/2})), φ the elastic trace measure.
double entropy_shift(const MaterialParams& mat, double rho, double trC, double ydet);

PrimitiveView to_primitive(const ConservedState& u, const MaterialParams& mat);
Admissibility is_admissible(const ConservedState& u, const MaterialParams& mat);

ConservedState from_primitive(const MaterialParams& mat, double rho, double eta, const Vec3& q,
                              const Vec3& v, const Mat3& F, const SymMat3& Y, double ydet);

// Specific entropy η that yields temperature θ for the given mechanical data.
double entropy_for_temperature(const MaterialParams& mat, double rho, double theta, const Mat3& F,
                               const SymMat3& Y, double ydet);

// ρE
double total_energy(const ConservedState& u, const MaterialParams& mat);
double total_energy(const PrimitiveView& pv, const MaterialParams& mat);
// ρẼ = ρE + ρ(e_ref/2)‖Y‖²
double math_entropy(const ConservedState& u, const MaterialParams& mat);

struct ConstraintResiduals {
  double detY;  // |𝓎·det Y − 1|
  double rhoR;  // |ρ·det F − ρ_R|/ρ_R
};

ConstraintResiduals constraint_residuals(const ConservedState& u, const MaterialParams& mat);

}  // namespace viscoflow
