#pragma once

#include "qfis/linalg.hpp"

namespace qfis {

/// Default numeric tolerances; every precondition check takes one of these
/// so callers can tighten or relax as needed.
struct Tolerances {
  double hermitian = 1e-14;
  double traceless = 1e-12;
  double unitary = 1e-12;
  double unit_vector = 1e-12;
};

inline const Tolerances kDefaultTol{};

inline const Mat2 kSigmaX{0.0, 1.0, 1.0, 0.0};
inline const Mat2 kSigmaY{0.0, complexd(0.0, -1.0), complexd(0.0, 1.0), 0.0};
inline const Mat2 kSigmaZ{1.0, 0.0, 0.0, -1.0};

inline const Mat2& sigma(int k) {
  switch (k) {
    case 0: return kSigmaX;
    case 1: return kSigmaY;
    default: return kSigmaZ;
  }
}

/// m -> m.sigma (traceless Hermitian for real m).
inline Mat2 pauli_compose(const Vec3& m) {
  return {complexd(m.z, 0.0), complexd(m.x, -m.y),
          complexd(m.x, m.y), complexd(-m.z, 0.0)};
}

/// Traceless Hermitian M -> m with M = m.sigma, [m]_k = Tr{sigma_k M}/2.
inline Vec3 pauli_decompose(const Mat2& m, const Tolerances& tol = kDefaultTol) {
  double hd = hermiticity_defect(m);
  if (hd > tol.hermitian)
    throw precondition_error("pauli_decompose: non-Hermitian input, defect " +
                             std::to_string(hd));
  double tr = std::abs(m.trace());
  if (tr > tol.traceless)
    throw precondition_error("pauli_decompose: non-traceless input, |Tr| " +
                             std::to_string(tr));
  return {0.5 * std::real(m(0, 1) + m(1, 0)),
          0.5 * std::real(complexd(0.0, 1.0) * (m(0, 1) - m(1, 0))),
          0.5 * std::real(m(0, 0) - m(1, 1))};
}

/// Same extraction without the precondition gate, for quality metrics on
/// finite-difference matrices that are only approximately Hermitian.
inline Vec3 pauli_project(const Mat2& m) {
  return {0.5 * std::real(m(0, 1) + m(1, 0)),
          0.5 * std::real(complexd(0.0, 1.0) * (m(0, 1) - m(1, 0))),
          0.5 * std::real(m(0, 0) - m(1, 1))};
}

/// exp(-i scale a.sigma) = cos(scale|a|) 1 - i sin(scale|a|) a_hat.sigma.
inline Mat2 su2_exp(const Vec3& a, double scale) {
  double n = norm(a);
  double arg = scale * n;
  double c = std::cos(arg);
  // sin(arg)/n stays finite as n -> 0: use scale * sinc(arg)
  double s_over_n;
  if (std::abs(arg) < 1e-8) {
    s_over_n = scale * (1.0 - arg * arg / 6.0);
  } else {
    s_over_n = std::sin(arg) / n;
  }
  const complexd mi(0.0, -1.0);
  Mat2 u = Mat2::identity() * c;
  Mat2 as = pauli_compose(a);
  return u + mi * s_over_n * as;
}

/// O_ij = Re Tr[sigma_i U sigma_j U^dag]/2, the SO(3) image of U.
inline Mat3 adjoint_rotation(const Mat2& u, const Tolerances& tol = kDefaultTol) {
  double ud = unitarity_defect(u);
  if (ud > tol.unitary)
    throw precondition_error("adjoint_rotation: non-unitary input, defect " +
                             std::to_string(ud));
  Mat3 o;
  Mat2 udag = u.adjoint();
  for (int j = 0; j < 3; ++j) {
    Mat2 rotated = u * sigma(j) * udag;
    for (int i = 0; i < 3; ++i)
      o(i, j) = 0.5 * std::real((sigma(i) * rotated).trace());
  }
  return o;
}

/// Columns are eigenvectors of sigma.n_hat(theta, phi) with eigenvalues +1, -1.
inline Mat2 omega_frame(double theta, double phi) {
  double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  complexd eip = std::exp(complexd(0.0, phi));
  return {c, -std::conj(eip) * s, eip * s, c};
}

struct Eig2 {
  std::array<double, 2> values;  // descending
  Mat2 vectors;                  // column a pairs with values[a]
};

/// 2x2 Hermitian eigendecomposition with deterministic phase: the first
/// nonzero component of each eigenvector is real positive. For H close to a
/// multiple of the identity both eigenvectors default to the computational
/// basis.
inline Eig2 eig_hermitian2(const Mat2& h, const Tolerances& tol = kDefaultTol) {
  double hd = hermiticity_defect(h);
  if (hd > 1e-12)
    throw precondition_error("eig_hermitian2: non-Hermitian input, defect " +
                             std::to_string(hd));
  (void)tol;
  double c0 = 0.5 * std::real(h.trace());
  Vec3 hv = pauli_project(h);
  double r = norm(hv);
  Eig2 out;
  out.values = {c0 + r, c0 - r};
  if (r < 1e-15) {
    out.vectors = Mat2::identity();
    return out;
  }
  Vec3 nh = hv * (1.0 / r);
  double theta = std::acos(std::clamp(nh.z, -1.0, 1.0));
  double phi = std::atan2(nh.y, nh.x);
  Mat2 v = omega_frame(theta, phi);
  // phase fix per column
  for (int j = 0; j < 2; ++j) {
    complexd lead = v(0, j);
    if (std::abs(lead) < 1e-15) lead = v(1, j);
    complexd ph = lead / std::abs(lead);
    v(0, j) /= ph;
    v(1, j) /= ph;
  }
  out.vectors = v;
  return out;
}

}  // namespace qfis
