#pragma once

#include <functional>

#include "qfis/qfi.hpp"

namespace qfis {

// ---------------------------------------------------------------------------
// Transfer matrix S[k][l] = d alpha_k / d beta_l between two parametrizations
// of the same unitary.
// ---------------------------------------------------------------------------

struct TransferMatrix {
  RealMatrix s;  // rows = source (alpha) parameters, cols = target (beta)
  std::vector<std::string> source_params;
  std::vector<std::string> target_params;
  std::vector<double> at_point;  // beta coordinates of evaluation
};

/// A differentiable map beta -> alpha. `angular_output[k]` marks outputs that
/// live on a circle; their finite differences are wrapped into (-pi, pi].
struct ParamMap {
  int n_in = 0;
  int n_out = 0;
  std::function<std::vector<double>(const std::vector<double>&)> f;
  std::function<RealMatrix(const std::vector<double>&)> analytic_jacobian;  // optional
  std::vector<bool> angular_output;
  std::vector<std::string> in_names;
  std::vector<std::string> out_names;
};

namespace detail {

inline double wrap_pi(double x) {
  x = std::fmod(x + M_PI, 2.0 * M_PI);
  if (x < 0.0) x += 2.0 * M_PI;
  return x - M_PI;
}

}  // namespace detail

inline TransferMatrix transfer_from_map(const ParamMap& map,
                                        const std::vector<double>& beta,
                                        double step = 1e-6) {
  if (static_cast<int>(beta.size()) != map.n_in)
    throw precondition_error("transfer_from_map: point dimension mismatch");
  TransferMatrix out;
  out.source_params = map.out_names;
  out.target_params = map.in_names;
  out.at_point = beta;
  if (map.analytic_jacobian) {
    out.s = map.analytic_jacobian(beta);
    return out;
  }
  out.s = RealMatrix(map.n_out, map.n_in);
  for (int l = 0; l < map.n_in; ++l) {
    std::vector<double> bp = beta, bm = beta;
    bp[l] += step;
    bm[l] -= step;
    std::vector<double> fp, fm;
    try {
      fp = map.f(bp);
      fm = map.f(bm);
    } catch (const std::exception& e) {
      throw precondition_error("transfer_from_map: map evaluation failed at coordinate " +
                               std::to_string(l) + ": " + e.what());
    }
    for (int k = 0; k < map.n_out; ++k) {
      double d = fp[k] - fm[k];
      if (k < static_cast<int>(map.angular_output.size()) && map.angular_output[k])
        d = detail::wrap_pi(d);
      out.s(k, l) = d / (2.0 * step);
    }
  }
  return out;
}

/// F^beta = S^t F^alpha S.
inline QfiMatrix transform_qfi(const QfiMatrix& f_alpha, const TransferMatrix& s) {
  if (f_alpha.size() != s.s.rows)
    throw precondition_error("transform_qfi: QFI dimension does not match transfer matrix");
  QfiMatrix out;
  out.params = s.target_params;
  out.f = s.s.transpose() * f_alpha.f * s.s;
  // symmetrize away round-off
  for (int i = 0; i < out.f.rows; ++i)
    for (int j = i + 1; j < out.f.cols; ++j) {
      double v = 0.5 * (out.f(i, j) + out.f(j, i));
      out.f(i, j) = v;
      out.f(j, i) = v;
    }
  return out;
}

/// m_beta_l = sum_k m_alpha_k S[k][l].
inline MVectorSet transform_m_vectors(const MVectorSet& m_alpha, const TransferMatrix& s) {
  if (m_alpha.size() != s.s.rows)
    throw precondition_error("transform_m_vectors: m-vector count does not match transfer matrix");
  MVectorSet out;
  out.params = s.target_params;
  out.point.theta = s.at_point;
  out.point.t = m_alpha.point.t;
  out.m.resize(s.s.cols);
  for (int l = 0; l < s.s.cols; ++l) {
    Vec3 v{};
    for (int k = 0; k < s.s.rows; ++k) v += s.s(k, l) * m_alpha.m[k];
    out.m[l] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coset <-> canonical worked example
// ---------------------------------------------------------------------------

struct CanonicalPoint {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  bool theta_singular = false;  // phi undefined; the 0 convention was used
};

/// Canonical (r, theta, phi) of the unitary U = Omega2(gamma, xi) Omega1(eta).
/// The quadrant of phi is recovered from the Pauli components of U rather
/// than from the arctan closed form, which leaves the branch ambiguous.
inline CanonicalPoint canonical_from_coset(double eta, double gamma, double xi, double t) {
  if (t <= 0.0) throw precondition_error("canonical_from_coset: t must be > 0");
  auto q = detail::coset_quat(eta, gamma, xi);
  double vn = norm(q.v);
  CanonicalPoint out;
  if (vn < 1e-12 && q.c > 0.0) {
    // identity element; (theta, phi) = (0, 0) by convention
    out.theta_singular = true;
    return out;
  }
  if (vn < 1e-9 && q.c < 0.0)
    throw branch_error("canonical_from_coset: branch point rt = pi (U = -1)");
  out.r = q.rt / t;
  Vec3 ah = q.v * (1.0 / vn);
  out.theta = std::acos(std::clamp(ah.z, -1.0, 1.0));
  if (std::sin(out.theta) < 1e-9) {
    out.theta_singular = true;
    out.phi = 0.0;
  } else {
    out.phi = std::atan2(ah.y, ah.x);
  }
  return out;
}

/// Closed-form coset m-vectors (direct route, independent of the transfer
/// construction): with G = xi + eta,
///   m_eta   = (0, 0, 1)/2
///   m_gamma = (sin G, cos G, 0)/2
///   m_xi    = sin(g/2) (cos(g/2) cos G, -cos(g/2) sin G, sin(g/2))
/// The sign of the last component follows from the BCH expansion of
/// i U^dag dU/dxi (check eta = 0, small gamma: m_z = +gamma^2/4 + ...).
inline MVectorSet coset_m_vectors(double eta, double gamma, double xi) {
  double g = std::sin(0.5 * gamma), cgh = std::cos(0.5 * gamma);
  double big_gamma = xi + eta;
  double sg = std::sin(big_gamma), cg = std::cos(big_gamma);
  MVectorSet out;
  out.params = {"eta", "gamma", "xi"};
  out.point.theta = {eta, gamma, xi};
  out.m = {
      {0.0, 0.0, 0.5},
      {0.5 * sg, 0.5 * cg, 0.0},
      {g * cgh * cg, -g * cgh * sg, g * g},
  };
  return out;
}

/// The (eta, gamma, xi) -> (r, theta, phi) map as a ParamMap, for transfer
/// matrix construction at fixed t.
inline ParamMap coset_to_canonical_map(double t) {
  ParamMap map;
  map.n_in = 3;
  map.n_out = 3;
  map.in_names = {"eta", "gamma", "xi"};
  map.out_names = {"r", "theta", "phi"};
  map.angular_output = {false, false, true};
  map.f = [t](const std::vector<double>& beta) {
    CanonicalPoint cp = canonical_from_coset(beta[0], beta[1], beta[2], t);
    if (cp.theta_singular)
      throw branch_error("coset_to_canonical_map: theta-singular point");
    return std::vector<double>{cp.r, cp.theta, cp.phi};
  };
  return map;
}

}  // namespace qfis
