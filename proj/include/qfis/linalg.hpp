#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfis {

using complexd = std::complex<double>;

struct precondition_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct branch_error : std::domain_error {
  using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Vec3
// ---------------------------------------------------------------------------

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
  double n = norm(v);
  if (n == 0.0) throw precondition_error("normalized: zero vector");
  return v * (1.0 / n);
}

inline const Vec3 kZhat{0.0, 0.0, 1.0};

// ---------------------------------------------------------------------------
// Mat3 (real 3x3, row-major)
// ---------------------------------------------------------------------------

struct Mat3 {
  std::array<double, 9> a{};

  double operator()(int i, int j) const { return a[3 * i + j]; }
  double& operator()(int i, int j) { return a[3 * i + j]; }

  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }

  Mat3 transpose() const {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = (*this)(j, i);
    return m;
  }

  Vec3 operator*(const Vec3& v) const {
    Vec3 r;
    for (int i = 0; i < 3; ++i)
      r[i] = (*this)(i, 0) * v.x + (*this)(i, 1) * v.y + (*this)(i, 2) * v.z;
    return r;
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }

  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = a[i] - o.a[i];
    return r;
  }

  double det() const {
    const Mat3& m = *this;
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
};

// ---------------------------------------------------------------------------
// Mat2 (complex 2x2, row-major)
// ---------------------------------------------------------------------------

struct Mat2 {
  std::array<complexd, 4> a{};

  Mat2() = default;
  Mat2(complexd a00, complexd a01, complexd a10, complexd a11)
      : a{a00, a01, a10, a11} {}

  complexd operator()(int i, int j) const { return a[2 * i + j]; }
  complexd& operator()(int i, int j) { return a[2 * i + j]; }

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 zero() { return {}; }

  Mat2 adjoint() const {
    return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
  }

  complexd trace() const { return a[0] + a[3]; }
  complexd det() const { return a[0] * a[3] - a[1] * a[2]; }

  Mat2 operator+(const Mat2& o) const {
    return {a[0] + o.a[0], a[1] + o.a[1], a[2] + o.a[2], a[3] + o.a[3]};
  }
  Mat2 operator-(const Mat2& o) const {
    return {a[0] - o.a[0], a[1] - o.a[1], a[2] - o.a[2], a[3] - o.a[3]};
  }
  Mat2 operator*(const Mat2& o) const {
    return {a[0] * o.a[0] + a[1] * o.a[2], a[0] * o.a[1] + a[1] * o.a[3],
            a[2] * o.a[0] + a[3] * o.a[2], a[2] * o.a[1] + a[3] * o.a[3]};
  }
  Mat2 operator*(complexd s) const { return {a[0] * s, a[1] * s, a[2] * s, a[3] * s}; }
  Mat2 operator*(double s) const { return *this * complexd(s, 0.0); }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
  }
};

inline Mat2 operator*(complexd s, const Mat2& m) { return m * s; }
inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

inline double frobenius(const Mat2& m) {
  double s = 0.0;
  for (const auto& v : m.a) s += std::norm(v);
  return std::sqrt(s);
}

inline double hermiticity_defect(const Mat2& m) {
  return (m - m.adjoint()).max_abs();
}

inline double unitarity_defect(const Mat2& u) {
  return (u.adjoint() * u - Mat2::identity()).max_abs();
}

// ---------------------------------------------------------------------------
// RealMatrix (small dense, dynamic size)
// ---------------------------------------------------------------------------

struct RealMatrix {
  int rows = 0, cols = 0;
  std::vector<double> data;

  RealMatrix() = default;
  RealMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
  double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }

  static RealMatrix identity(int n) {
    RealMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  RealMatrix transpose() const {
    RealMatrix m(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  RealMatrix operator*(const RealMatrix& o) const {
    if (cols != o.rows) throw precondition_error("RealMatrix: dimension mismatch in product");
    RealMatrix r(rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k) {
        double v = (*this)(i, k);
        if (v == 0.0) continue;
        for (int j = 0; j < o.cols; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }

  RealMatrix operator-(const RealMatrix& o) const {
    RealMatrix r(rows, cols);
    for (size_t i = 0; i < data.size(); ++i) r.data[i] = data[i] - o.data[i];
    return r;
  }

  RealMatrix operator*(double s) const {
    RealMatrix r = *this;
    for (double& v : r.data) v *= s;
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::abs(v));
    return m;
  }
};

struct SymEigen {
  std::vector<double> values;  // ascending
  RealMatrix vectors;          // column j pairs with values[j]
};

// Cyclic Jacobi; fine for the tiny matrices that show up here.
inline SymEigen eig_symmetric(const RealMatrix& m) {
  if (m.rows != m.cols) throw precondition_error("eig_symmetric: not square");
  const int n = m.rows;
  RealMatrix a = m;
  RealMatrix v = RealMatrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-300) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  SymEigen out;
  out.values.resize(n);
  for (int i = 0; i < n; ++i) out.values[i] = a(i, i);
  // sort ascending, permuting eigenvector columns alongside
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (out.values[idx[j]] < out.values[idx[i]]) std::swap(idx[i], idx[j]);
  std::vector<double> vals(n);
  RealMatrix vecs(n, n);
  for (int j = 0; j < n; ++j) {
    vals[j] = out.values[idx[j]];
    for (int i = 0; i < n; ++i) vecs(i, j) = v(i, idx[j]);
  }
  out.values = std::move(vals);
  out.vectors = std::move(vecs);
  return out;
}

inline double det_symmetric(const RealMatrix& m) {
  double d = 1.0;
  for (double lam : eig_symmetric(m).values) d *= lam;
  return d;
}

inline RealMatrix inverse_symmetric(const RealMatrix& m) {
  SymEigen e = eig_symmetric(m);
  const int n = m.rows;
  RealMatrix inv(n, n);
  for (int j = 0; j < n; ++j) {
    if (e.values[j] == 0.0)
      throw precondition_error("inverse_symmetric: singular matrix");
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        inv(i, k) += e.vectors(i, j) * e.vectors(k, j) / e.values[j];
  }
  return inv;
}

}  // namespace qfis
