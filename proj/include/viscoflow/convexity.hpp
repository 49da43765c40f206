#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "viscoflow/kbkz.hpp"
#include "viscoflow/material.hpp"
#include "viscoflow/state.hpp"

namespace viscoflow {

// Auxiliary functions whose Hessian minors certify convexity of the shifted
// solvent energy, and their closed-form leading principal minors.
//   pg:   e^{qy}/(x^p z^r)
//   nasg: e^{qy}/((x−b)^p x^r z^r)
//   kbkz: e^{qy}/(x^p z1^r z2^r)
double pg_aux(double p, double q, double r, double x, double y, double z);
double nasg_aux(double p, double q, double r, double b, double x, double y, double z);
double kbkz_aux(double p, double q, double r, double x, double y, double z1, double z2);

std::array<double, 3> pg_minors(double p, double q, double r, double x, double y, double z);
// H1's quadratic is (p+r)(1+p+r)x² − 2br(1+p+r)x + b²r(1+r).
std::array<double, 3> nasg_minors(double p, double q, double r, double b, double x, double y,
                                  double z);
// Closed forms −4b²pr(1+p+r) and −4b²pr of the two quadratics' discriminants.
std::array<double, 2> nasg_discriminants(double p, double q, double r, double b);
// The same discriminants evaluated directly from the quadratic coefficients.
std::array<double, 2> nasg_discriminants_direct(double p, double q, double r, double b);
std::array<double, 4> kbkz_minors(double p, double q, double r, double x, double y, double z1,
                                  double z2);

using Rng = std::mt19937_64;

double log_uniform(Rng& rng, double lo, double hi);
// Q·diag(λ)·Qᵀ with λ log-uniform in [lo, hi] and Q from QR of a Gaussian matrix.
SymMat3 random_spd(Rng& rng, double lo, double hi);
// I + 0.5·Gaussian, redrawn while |det F| < 0.2.
Mat3 random_deformation(Rng& rng);

enum class MinorFamily { PG, NASG, KBKZ };
const char* to_string(MinorFamily f);

struct MinorReport {
  MinorFamily family;
  long index;
  std::vector<double> params;  // p, q, r[, b]
  std::vector<double> point;
  std::vector<double> closed_form;
  std::vector<double> fd;
  std::vector<double> rel_err;
  bool pass;
};

std::vector<MinorReport> minor_reports(MinorFamily family, int n_samples, std::uint64_t seed,
                                       double tol = 1e-6);

struct DiscriminantReport {
  long index;
  double p, q, r, b;
  std::array<double, 2> closed_form;
  std::array<double, 2> direct;
  double rel_err;
  bool pass;
};

std::vector<DiscriminantReport> discriminant_reports(int n_samples, std::uint64_t seed,
                                                     double tol = 1e-12);

struct VerificationRecord {
  std::string check;
  long index;
  double measured;
  double threshold;
  bool pass;
};

struct VerificationReport {
  std::string name;
  std::vector<VerificationRecord> records;

  bool passed() const;
  std::size_t failures() const;
  void add(const std::string& check, long index, double measured, double threshold, bool pass);
  void append(const VerificationReport& other);
};

// Admissible states drawn by the sampling rules above: ρ, 𝓎 log-uniform in
// [0.1, 10]; v, q and the shifted entropy η̃ Gaussian, so θ stays moderate.
// Throws SamplingFailure when more than 99% of draws are rejected.
ConservedState sample_state(const MaterialParams& mat, Rng& rng);
kbkz::State sample_state(const kbkz::Model& m, Rng& rng);

enum class ConvexityTarget {
  SolventTilde,    // shifted solvent energy in (1/ρ, η, 𝓎), F = I, Y = I
  HookeanTrace,    // tr(F·Y^{-1/2}·Fᵀ) in (F, Y): convex, not strictly
  FenepTrace,      // −b²·log(1 − tr(F·Y^{-1/2}·Fᵀ)/b²): convex, strictly in F
  MathEntropy,     // ρẼ in the 24 conserved variables
  KBKZMathEntropy  // ρẼ in the 40 conserved variables
};
const char* to_string(ConvexityTarget t);

// FD-Hessian minimum eigenvalue at n_samples points plus 100 midpoint checks.
VerificationReport strict_convexity_sample(ConvexityTarget target, const MaterialParams& mat,
                                           int n_samples, std::uint64_t seed,
                                           const kbkz::Params& kp = {});

// Godunov-Mock check at sampled states, axis 0. The literal criterion uses the
// bare flux Jacobian; with godunov the involution terms are added first.
VerificationReport symmetrizer_sample(const MaterialParams& mat, int n_samples, std::uint64_t seed,
                                      bool godunov, double tol = 1e-4);
VerificationReport symmetrizer_sample(const kbkz::Model& m, int n_samples, std::uint64_t seed,
                                      bool godunov, double tol = 1e-4);

}  // namespace viscoflow
