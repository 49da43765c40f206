#pragma once

#include <cmath>
#include <random>

#include "viscoflow/convexity.hpp"
#include "viscoflow/state.hpp"
#include "viscoflow/tensor.hpp"

namespace vt {

using namespace viscoflow;

inline Mat3 random_mat(Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Mat3 m;
  for (double& x : m.a) x = n(rng);
  return m;
}

inline double max_abs_diff(const Mat3& a, const Mat3& b) {
  double d = 0.0;
  for (int k = 0; k < 9; ++k) d = std::max(d, std::fabs(a.a[k] - b.a[k]));
  return d;
}

inline double max_abs_diff(const SymMat3& a, const SymMat3& b) {
  double d = 0.0;
  for (int k = 0; k < 6; ++k) d = std::max(d, std::fabs(a.s[k] - b.s[k]));
  return d;
}

inline double rel(double a, double b) { return std::fabs(a - b) / std::max(1e-300, std::fabs(b)); }

// F = I, Y = I, 𝓎 = 1, η = −0.75: θ = 1, p = 0.4 with baseline constants.
inline ConservedState rest_state(const MaterialParams& mat = MaterialParams::baseline(),
                                 const Vec3& v = {0, 0, 0}, const Vec3& q = {0, 0, 0}) {
  return from_primitive(mat, 1.0, -0.75, q, v, Mat3::identity(), SymMat3::identity(), 1.0);
}

template <class S>
double norm2(const S& u) {
  double a = 0.0;
  for (double x : u.pack()) a += x * x;
  return std::sqrt(a);
}

// Fourth-order central difference of g at 0.
template <class G>
double derivative4(const G& g, double h) {
  return (8.0 * (g(h) - g(-h)) - (g(2.0 * h) - g(-2.0 * h))) / (12.0 * h);
}

// Sampled state that also satisfies 𝓎·det Y = 1 and ρ·det F = ρ_R.
inline ConservedState consistent_state(const MaterialParams& mat, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Mat3 F = random_deformation(rng);
    if (det(F) < 0.0) F = Mat3::diag(-1, 1, 1) * F;
    const SymMat3 Y = random_spd(rng, 0.3, 3.0);
    const double rho = mat.rhoR / det(F);
    const Vec3 q{n(rng), n(rng), n(rng)}, v{n(rng), n(rng), n(rng)};
    const double theta = log_uniform(rng, 0.3, 3.0);
    try {
      const double eta = entropy_for_temperature(mat, rho, theta, F, Y, 1.0 / det(Y));
      const ConservedState u = from_primitive(mat, rho, eta, q, v, F, Y, 1.0 / det(Y));
      if (is_admissible(u, mat)) return u;
    } catch (const Error&) {
    }
  }
}

}  // namespace vt
