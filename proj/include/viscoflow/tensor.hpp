#pragma once

#include <array>
#include <cmath>

namespace viscoflow {

using Vec3 = std::array<double, 3>;

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> a{};

  double& operator()(int i, int j) { return a[3 * i + j]; }
  double operator()(int i, int j) const { return a[3 * i + j]; }

  static Mat3 identity() { return diag(1.0, 1.0, 1.0); }
  static Mat3 diag(double x, double y, double z) {
    Mat3 m;
    m(0, 0) = x;
    m(1, 1) = y;
    m(2, 2) = z;
    return m;
  }
};

// Symmetric 3x3 matrix stored as the upper triangle (xx, xy, xz, yy, yz, zz).
struct SymMat3 {
  std::array<double, 6> s{};

  static constexpr int index(int i, int j) {
    if (i > j) { int t = i; i = j; j = t; }
    return i == 0 ? j : (i == 1 ? 2 + j : 5);
  }
  double& operator()(int i, int j) { return s[index(i, j)]; }
  double operator()(int i, int j) const { return s[index(i, j)]; }

  static SymMat3 identity() { return diag(1.0, 1.0, 1.0); }
  static SymMat3 diag(double x, double y, double z) {
    SymMat3 m;
    m.s = {x, 0.0, 0.0, y, 0.0, z};
    return m;
  }
};

struct SymEigen {
  Vec3 values;   // descending
  Mat3 vectors;  // column k is the eigenvector of values[k]
};

Mat3 operator+(const Mat3& a, const Mat3& b);
Mat3 operator-(const Mat3& a, const Mat3& b);
Mat3 operator*(double s, const Mat3& a);
Mat3 operator*(const Mat3& a, const Mat3& b);
Vec3 operator*(const Mat3& a, const Vec3& v);
SymMat3 operator+(const SymMat3& a, const SymMat3& b);
SymMat3 operator-(const SymMat3& a, const SymMat3& b);
SymMat3 operator*(double s, const SymMat3& a);
Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& a);

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);

Mat3 transpose(const Mat3& m);
double trace(const Mat3& m);
double trace(const SymMat3& m);
double det(const Mat3& m);
double det(const SymMat3& m);
Mat3 cofactor(const Mat3& m);
// Throws std::domain_error when det(m) == 0.
Mat3 inverse(const Mat3& m);

Mat3 to_mat(const SymMat3& s);
// Symmetric part ½(m + mᵀ).
SymMat3 sym(const Mat3& m);
// a·s·aᵀ
SymMat3 congruence(const Mat3& a, const SymMat3& s);

double frobenius_sq(const Mat3& m);
double frobenius_sq(const SymMat3& m);
// Frobenius inner product a:b.
double ddot(const Mat3& a, const Mat3& b);
double ddot(const SymMat3& a, const SymMat3& b);

// Closed-form eigenvalues, Jacobi-polished eigenvectors; values sorted descending.
SymEigen sym_eigen(const SymMat3& s);

// Scale-aware SPD threshold 1e-12·(1 + |tr s|).
double spd_eps(const SymMat3& s);
bool is_spd(const SymMat3& s);

// Spectral functions on the SPD cone. All throw NotSPD when the smallest
// eigenvalue is not above spd_eps.
SymMat3 spd_inv_sqrt(const SymMat3& s);
SymMat3 spd_sqrt(const SymMat3& s);
SymMat3 spd_inverse(const SymMat3& s);
double spd_log_det(const SymMat3& s);

// Rebuild V·diag(λ)·Vᵀ.
SymMat3 from_eigen(const Vec3& values, const Mat3& vectors);

}  // namespace viscoflow
