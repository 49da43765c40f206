#include "viscoflow/tensor.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "viscoflow/errors.hpp"

namespace viscoflow {

Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int k = 0; k < 9; ++k) r.a[k] = a.a[k] + b.a[k];
  return r;
}

Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int k = 0; k < 9; ++k) r.a[k] = a.a[k] - b.a[k];
  return r;
}

Mat3 operator*(double s, const Mat3& a) {
  Mat3 r;
  for (int k = 0; k < 9; ++k) r.a[k] = s * a.a[k];
  return r;
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return r;
}

Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {a(0, 0) * v[0] + a(0, 1) * v[1] + a(0, 2) * v[2],
          a(1, 0) * v[0] + a(1, 1) * v[1] + a(1, 2) * v[2],
          a(2, 0) * v[0] + a(2, 1) * v[1] + a(2, 2) * v[2]};
}

SymMat3 operator+(const SymMat3& a, const SymMat3& b) {
  SymMat3 r;
  for (int k = 0; k < 6; ++k) r.s[k] = a.s[k] + b.s[k];
  return r;
}

SymMat3 operator-(const SymMat3& a, const SymMat3& b) {
  SymMat3 r;
  for (int k = 0; k < 6; ++k) r.s[k] = a.s[k] - b.s[k];
  return r;
}

SymMat3 operator*(double s, const SymMat3& a) {
  SymMat3 r;
  for (int k = 0; k < 6; ++k) r.s[k] = s * a.s[k];
  return r;
}

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Mat3 transpose(const Mat3& m) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(j, i);
  return r;
}

double trace(const Mat3& m) { return m(0, 0) + m(1, 1) + m(2, 2); }
double trace(const SymMat3& m) { return m.s[0] + m.s[3] + m.s[5]; }

double det(const Mat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

double det(const SymMat3& m) { return det(to_mat(m)); }

Mat3 cofactor(const Mat3& m) {
  Mat3 c;
  c(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  c(0, 1) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  c(0, 2) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  c(1, 0) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  c(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  c(1, 2) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  c(2, 0) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  c(2, 1) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  c(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return c;
}

Mat3 inverse(const Mat3& m) {
  const double d = det(m);
  if (d == 0.0 || !std::isfinite(d)) throw std::domain_error("inverse of a singular 3x3 matrix");
  return (1.0 / d) * transpose(cofactor(m));
}

Mat3 to_mat(const SymMat3& s) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = s(i, j);
  return m;
}

SymMat3 sym(const Mat3& m) {
  SymMat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) r(i, j) = 0.5 * (m(i, j) + m(j, i));
  return r;
}

SymMat3 congruence(const Mat3& a, const SymMat3& s) {
  const Mat3 as = a * to_mat(s);
  SymMat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) r(i, j) = as(i, 0) * a(j, 0) + as(i, 1) * a(j, 1) + as(i, 2) * a(j, 2);
  return r;
}

double frobenius_sq(const Mat3& m) {
  double r = 0.0;
  for (double x : m.a) r += x * x;
  return r;
}

double frobenius_sq(const SymMat3& m) { return ddot(m, m); }

double ddot(const Mat3& a, const Mat3& b) {
  double r = 0.0;
  for (int k = 0; k < 9; ++k) r += a.a[k] * b.a[k];
  return r;
}

double ddot(const SymMat3& a, const SymMat3& b) {
  return a.s[0] * b.s[0] + a.s[3] * b.s[3] + a.s[5] * b.s[5] +
         2.0 * (a.s[1] * b.s[1] + a.s[2] * b.s[2] + a.s[4] * b.s[4]);
}

namespace {

using Dense = std::array<std::array<double, 3>, 3>;

// Unit null vector of the rank-2 matrix m, from the best-conditioned row cross product.
Vec3 null_vector(const Dense& m) {
  const Vec3 r0{m[0][0], m[0][1], m[0][2]};
  const Vec3 r1{m[1][0], m[1][1], m[1][2]};
  const Vec3 r2{m[2][0], m[2][1], m[2][2]};
  Vec3 c[3] = {cross(r0, r1), cross(r0, r2), cross(r1, r2)};
  int best = 0;
  double bn = dot(c[0], c[0]);
  for (int k = 1; k < 3; ++k) {
    const double n = dot(c[k], c[k]);
    if (n > bn) { bn = n; best = k; }
  }
  if (bn == 0.0) return {1.0, 0.0, 0.0};
  return (1.0 / std::sqrt(bn)) * c[best];
}

// Orthonormal pair spanning the plane orthogonal to unit v.
void complement(const Vec3& v, Vec3& u, Vec3& w) {
  if (std::fabs(v[0]) > std::fabs(v[1])) {
    const double inv = 1.0 / std::sqrt(v[0] * v[0] + v[2] * v[2]);
    u = {-v[2] * inv, 0.0, v[0] * inv};
  } else {
    const double inv = 1.0 / std::sqrt(v[1] * v[1] + v[2] * v[2]);
    u = {0.0, v[2] * inv, -v[1] * inv};
  }
  w = cross(v, u);
}

Vec3 apply(const Dense& a, const Vec3& x) {
  return {a[0][0] * x[0] + a[0][1] * x[1] + a[0][2] * x[2],
          a[1][0] * x[0] + a[1][1] * x[1] + a[1][2] * x[2],
          a[2][0] * x[0] + a[2][1] * x[1] + a[2][2] * x[2]};
}

// Eigenvector of a for eigenvalue lam inside span{u, w}.
Vec3 in_plane_vector(const Dense& a, double lam, const Vec3& u, const Vec3& w) {
  const Vec3 au = apply(a, u), aw = apply(a, w);
  const double m00 = dot(u, au) - lam, m01 = dot(u, aw), m11 = dot(w, aw) - lam;
  double x, y;
  if (m00 * m00 + m01 * m01 >= m01 * m01 + m11 * m11) {
    x = -m01;
    y = m00;
  } else {
    x = -m11;
    y = m01;
  }
  const double n = std::hypot(x, y);
  if (n == 0.0) return u;
  return (x / n) * u + (y / n) * w;
}

// Cyclic Jacobi sweeps on d = Vᵀ·A·V; accumulates rotations into v.
void jacobi_polish(Dense& d, Dense& v) {
  const double scale = std::fabs(d[0][0]) + std::fabs(d[1][1]) + std::fabs(d[2][2]) +
                       std::fabs(d[0][1]) + std::fabs(d[0][2]) + std::fabs(d[1][2]);
  for (int sweep = 0; sweep < 6; ++sweep) {
    const double off = std::fabs(d[0][1]) + std::fabs(d[0][2]) + std::fabs(d[1][2]);
    if (off <= 1e-18 * scale) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (d[p][q] == 0.0) continue;
        const double th = (d[q][q] - d[p][p]) / (2.0 * d[p][q]);
        const double t = (th >= 0.0 ? 1.0 : -1.0) / (std::fabs(th) + std::sqrt(th * th + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double dkp = d[k][p], dkq = d[k][q];
          d[k][p] = c * dkp - s * dkq;
          d[k][q] = s * dkp + c * dkq;
        }
        for (int k = 0; k < 3; ++k) {
          const double dpk = d[p][k], dqk = d[q][k];
          d[p][k] = c * dpk - s * dqk;
          d[q][k] = s * dpk + c * dqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
}

SymEigen sorted(const Vec3& lam, const Dense& v) {
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return lam[x] > lam[y]; });
  SymEigen r;
  for (int k = 0; k < 3; ++k) {
    r.values[k] = lam[order[k]];
    for (int i = 0; i < 3; ++i) r.vectors(i, k) = v[i][order[k]];
  }
  return r;
}

}  // namespace

SymEigen sym_eigen(const SymMat3& s) {
  double m = 0.0;
  for (double x : s.s) m = std::max(m, std::fabs(x));
  Dense ident{};
  for (int i = 0; i < 3; ++i) ident[i][i] = 1.0;
  if (m == 0.0) return sorted({0.0, 0.0, 0.0}, ident);

  const double off = s.s[1] * s.s[1] + s.s[2] * s.s[2] + s.s[4] * s.s[4];
  if (off == 0.0) return sorted({s.s[0], s.s[3], s.s[5]}, ident);

  Dense a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = s(i, j) / m;

  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) +
                    (a[2][2] - q) * (a[2][2] - q) + 2.0 * off / (m * m);
  const double p = std::sqrt(p2 / 6.0);
  Mat3 b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = (a[i][j] - (i == j ? q : 0.0)) / p;
  const double r = std::clamp(det(b) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double l1 = q + 2.0 * p * std::cos(phi);
  const double l3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double l2 = 3.0 * q - l1 - l3;

  // Start from the best-separated eigenvalue, solve the rest in its complement.
  const bool top_isolated = (l1 - l2) >= (l2 - l3);
  const double first = top_isolated ? l1 : l3;
  Dense shifted = a;
  for (int i = 0; i < 3; ++i) shifted[i][i] -= first;
  const Vec3 v_first = null_vector(shifted);
  Vec3 u, w;
  complement(v_first, u, w);
  const Vec3 v_mid = in_plane_vector(a, l2, u, w);
  const Vec3 v_last = cross(v_first, v_mid);

  Dense v;
  for (int i = 0; i < 3; ++i) {
    v[i][0] = v_first[i];
    v[i][1] = v_mid[i];
    v[i][2] = v_last[i];
  }
  Dense d{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) acc += v[k][i] * a[k][l] * v[l][j];
      d[i][j] = acc;
    }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) d[j][i] = d[i][j] = 0.5 * (d[i][j] + d[j][i]);
  jacobi_polish(d, v);
  return sorted({d[0][0] * m, d[1][1] * m, d[2][2] * m}, v);
}

SymMat3 from_eigen(const Vec3& values, const Mat3& vectors) {
  SymMat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += vectors(i, k) * values[k] * vectors(j, k);
      r(i, j) = acc;
    }
  return r;
}

double spd_eps(const SymMat3& s) { return 1e-12 * (1.0 + std::fabs(trace(s))); }

bool is_spd(const SymMat3& s) {
  for (double x : s.s)
    if (!std::isfinite(x)) return false;
  return sym_eigen(s).values[2] > spd_eps(s);
}

namespace {

SymEigen checked_eigen(const SymMat3& s) {
  for (double x : s.s)
    if (!std::isfinite(x)) throw NotSPD("non-finite matrix entry");
  SymEigen e = sym_eigen(s);
  if (!(e.values[2] > spd_eps(s))) throw NotSPD("smallest eigenvalue below SPD threshold");
  return e;
}

}  // namespace

SymMat3 spd_inv_sqrt(const SymMat3& s) {
  const SymEigen e = checked_eigen(s);
  return from_eigen({1.0 / std::sqrt(e.values[0]), 1.0 / std::sqrt(e.values[1]),
                     1.0 / std::sqrt(e.values[2])},
                    e.vectors);
}

SymMat3 spd_sqrt(const SymMat3& s) {
  const SymEigen e = checked_eigen(s);
  return from_eigen({std::sqrt(e.values[0]), std::sqrt(e.values[1]), std::sqrt(e.values[2])},
                    e.vectors);
}

SymMat3 spd_inverse(const SymMat3& s) {
  const SymEigen e = checked_eigen(s);
  return from_eigen({1.0 / e.values[0], 1.0 / e.values[1], 1.0 / e.values[2]}, e.vectors);
}

double spd_log_det(const SymMat3& s) {
  const SymEigen e = checked_eigen(s);
  return std::log(e.values[0]) + std::log(e.values[1]) + std::log(e.values[2]);
}

}  // namespace viscoflow
