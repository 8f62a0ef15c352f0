#pragma once

#include "qfis/gauss_legendre.hpp"
#include "qfis/qfi.hpp"

namespace qfis {
namespace oracle {

/// U(theta) = exp(-i H t) with H = alpha(theta).sigma.
inline Mat2 unitary_of(const HamiltonianSpec& spec, const ParamPoint& p) {
  return su2_exp(alpha_at(spec, p), p.t);
}

enum class GeneratorFlavor { M, K };  // M = i U^dag dU,  K = i (dU) U^dag

struct GeneratorMatrix {
  Mat2 mat;  // Hermitian traceless (up to the recorded residual)
  int param_index = 0;
  GeneratorFlavor flavor = GeneratorFlavor::M;
  double anti_hermitian_residual = 0.0;
  bool residual_warning = false;
};

namespace detail_o {

inline GeneratorMatrix hermitize(Mat2 raw, int index, GeneratorFlavor flavor) {
  GeneratorMatrix g;
  g.mat = 0.5 * (raw + raw.adjoint());
  g.param_index = index;
  g.flavor = flavor;
  g.anti_hermitian_residual = (raw - g.mat).max_abs();
  g.residual_warning = g.anti_hermitian_residual > 1e-6;
  return g;
}

}  // namespace detail_o

inline double default_fd_step(const ParamPoint& p, int i) {
  return 1e-5 * std::max(1.0, std::abs(p.theta[i]));
}

/// M_i = i U^dag dU/dtheta_i by central differences on U.
inline GeneratorMatrix m_matrix_fd(const HamiltonianSpec& spec, const ParamPoint& p,
                                   int i, double h = 0.0) {
  check_point(spec, p);
  if (h <= 0.0) h = default_fd_step(p, i);
  ParamPoint pp = p, pm = p;
  pp.theta[i] += h;
  pm.theta[i] -= h;
  Mat2 du = (unitary_of(spec, pp) - unitary_of(spec, pm)) * (0.5 / h);
  Mat2 raw = complexd(0.0, 1.0) * (unitary_of(spec, p).adjoint() * du);
  return detail_o::hermitize(raw, i, GeneratorFlavor::M);
}

/// K_i = i (dU/dtheta_i) U^dag by central differences on U.
inline GeneratorMatrix k_matrix_fd(const HamiltonianSpec& spec, const ParamPoint& p,
                                   int i, double h = 0.0) {
  check_point(spec, p);
  if (h <= 0.0) h = default_fd_step(p, i);
  ParamPoint pp = p, pm = p;
  pp.theta[i] += h;
  pm.theta[i] -= h;
  Mat2 du = (unitary_of(spec, pp) - unitary_of(spec, pm)) * (0.5 / h);
  Mat2 raw = complexd(0.0, 1.0) * (du * unitary_of(spec, p).adjoint());
  return detail_o::hermitize(raw, i, GeneratorFlavor::K);
}

/// Analytic rotation O_lk(s) appearing in the Wilcox integrand:
/// O_lk = cos(2 tau) d_kl - sin(2 tau) eps_ktl a_t + 2 sin^2(tau) a_k a_l
/// with tau = (1-s)|alpha| t. Returns the matrix with entry (l, k).
inline Mat3 wilcox_rotation_analytic(const Vec3& alpha, double s, double t) {
  double a = norm(alpha);
  double tau = (1.0 - s) * a * t;
  Vec3 ah = a > 0.0 ? alpha * (1.0 / a) : kZhat;
  double c2 = std::cos(2.0 * tau), s2 = std::sin(2.0 * tau);
  double ss = std::sin(tau);
  auto eps = [](int i, int j, int k) -> double {
    if (i == j || j == k || i == k) return 0.0;
    return ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
  };
  Mat3 o;
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k) {
      double v = (k == l ? c2 : 0.0) + 2.0 * ss * ss * ah[k] * ah[l];
      for (int tt = 0; tt < 3; ++tt) v -= s2 * eps(k, tt, l) * ah[tt];
      o(l, k) = v;
    }
  return o;
}

/// m-vector via the Wilcox derivative formula: [m]_k = t sum_l (dalpha_l)
/// int_0^1 O_lk(s) ds, with O(s) the adjoint rotation of V(s) = e^{-i(1-s)Ht}.
inline Vec3 m_vector_wilcox(const HamiltonianSpec& spec, const ParamPoint& p, int i,
                            int quadrature_order = 32) {
  check_point(spec, p);
  if (quadrature_order < 2)
    throw precondition_error("m_vector_wilcox: quadrature order must be >= 2");
  Vec3 alpha = alpha_at(spec, p);
  RealMatrix jac = jacobian_at(spec, p);
  Vec3 d{jac(0, i), jac(1, i), jac(2, i)};
  QuadratureRule rule = gauss_legendre(quadrature_order);
  Vec3 m{};
  for (int q = 0; q < quadrature_order; ++q) {
    double s = rule.nodes[q];
    Mat3 o = adjoint_rotation(su2_exp(alpha, (1.0 - s) * p.t));
    m += rule.weights[q] * (o.transpose() * d);
  }
  return p.t * m;
}

/// Truncated commutator series for the generator: returns -H_series so the
/// result follows the M convention. H_series = i sum_n F_n H^{xn}(dH) with
/// F_n = (it)^{n+1}/(n+1)!.
inline GeneratorMatrix h_series(const HamiltonianSpec& spec, const ParamPoint& p,
                                int i, int n_terms) {
  check_point(spec, p);
  if (n_terms < 1) throw precondition_error("h_series: n_terms must be >= 1");
  Vec3 alpha = alpha_at(spec, p);
  double at = norm(alpha) * p.t;
  if (at > 10.0 && n_terms < 60)
    throw precondition_error(
        "h_series: |alpha| t > 10 needs n_terms >= 60 for convergence");
  RealMatrix jac = jacobian_at(spec, p);
  Mat2 h = pauli_compose(alpha);
  Mat2 dh = pauli_compose({jac(0, i), jac(1, i), jac(2, i)});
  const complexd it(0.0, p.t);
  Mat2 nested = dh;          // H^{x0}(dH)
  complexd fn = it;          // F_0 = it
  Mat2 sum = fn * nested;
  for (int n = 1; n < n_terms; ++n) {
    nested = h * nested - nested * h;
    fn *= it / complexd(n + 1.0, 0.0);
    sum = sum + fn * nested;
  }
  Mat2 raw = complexd(0.0, -1.0) * sum;  // -H_series = -i sum
  return detail_o::hermitize(raw, i, GeneratorFlavor::M);
}

// ---------------------------------------------------------------------------
// SLD and QFI from the generic formulas
// ---------------------------------------------------------------------------

/// Eigenbasis of rho0: column a is |phi_a>, the (+/-) eigenvector of
/// sigma.n_hat.
inline Mat2 probe_basis(const ProbeState& probe) {
  double theta = std::acos(std::clamp(probe.n_hat.z, -1.0, 1.0));
  double phi = std::atan2(probe.n_hat.y, probe.n_hat.x);
  return omega_frame(theta, phi);
}

struct SldMatrix {
  Mat2 mat;  // expressed in the rotated eigenbasis {U|phi_a>}
  int param_index = 0;
};

/// SLD matrix elements from the generator: L_ab = 2i (p_a - p_b)/(p_a + p_b)
/// M_ab in the probe eigenbasis. Pairs outside the support are dropped.
inline SldMatrix sld_matrix(const GeneratorMatrix& gen, const ProbeState& probe) {
  probe.validate();
  Mat2 phi = probe_basis(probe);
  Mat2 m_eig = phi.adjoint() * gen.mat * phi;
  std::array<double, 2> pr{probe.p0, probe.p1};
  SldMatrix l;
  l.param_index = gen.param_index;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double psum = pr[a] + pr[b];
      if (psum <= 0.0) {
        l.mat(a, b) = 0.0;
        continue;
      }
      l.mat(a, b) = complexd(0.0, 2.0) * ((pr[a] - pr[b]) / psum) * m_eig(a, b);
    }
  return l;
}

/// F_ij = sum_{a,b} 2 (p_a - p_b)^2/(p_a + p_b) (M_i)_ab (M_j)_ba with
/// elements in the rho0 eigenbasis; support-restricted like sld_matrix.
inline QfiMatrix qfi_eigenbasis(const std::vector<GeneratorMatrix>& m_list,
                                const ProbeState& probe,
                                const std::vector<std::string>& params = {}) {
  probe.validate();
  const int n = static_cast<int>(m_list.size());
  Mat2 phi = probe_basis(probe);
  std::vector<Mat2> m_eig(n);
  for (int i = 0; i < n; ++i) m_eig[i] = phi.adjoint() * m_list[i].mat * phi;
  std::array<double, 2> pr{probe.p0, probe.p1};
  QfiMatrix out;
  out.params = params.empty() ? std::vector<std::string>(n, "") : params;
  out.f = RealMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          if (a == b) continue;
          double psum = pr[a] + pr[b];
          if (psum <= 0.0) continue;
          double w = 2.0 * (pr[a] - pr[b]) * (pr[a] - pr[b]) / psum;
          v += w * std::real(m_eig[i](a, b) * m_eig[j](b, a));
        }
      out.f(i, j) = v;
      out.f(j, i) = v;
    }
  return out;
}

/// Covariance-form QFI: F_ij = sum_a 4 p_a cov_a(H_i, H_j)
/// - sum_{a != b} 8 p_a p_b/(p_a + p_b) Re{<a|H_i|b><b|H_j|a>}.
/// The generators enter bilinearly, so either sign convention (M or -M) gives
/// the same matrix.
inline QfiMatrix qfi_covariance(const std::vector<GeneratorMatrix>& h_list,
                                const ProbeState& probe,
                                const std::vector<std::string>& params = {}) {
  probe.validate();
  const int n = static_cast<int>(h_list.size());
  Mat2 phi = probe_basis(probe);
  std::vector<Mat2> h_eig(n);
  for (int i = 0; i < n; ++i) h_eig[i] = phi.adjoint() * h_list[i].mat * phi;
  std::array<double, 2> pr{probe.p0, probe.p1};
  QfiMatrix out;
  out.params = params.empty() ? std::vector<std::string>(n, "") : params;
  out.f = RealMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = 0.0;
      for (int a = 0; a < 2; ++a) {
        if (pr[a] <= 0.0) continue;
        complexd hihj = h_eig[i](a, 0) * h_eig[j](0, a) + h_eig[i](a, 1) * h_eig[j](1, a);
        complexd hjhi = h_eig[j](a, 0) * h_eig[i](0, a) + h_eig[j](a, 1) * h_eig[i](1, a);
        double cov = 0.5 * std::real(hihj + hjhi) -
                     std::real(h_eig[i](a, a)) * std::real(h_eig[j](a, a));
        v += 4.0 * pr[a] * cov;
      }
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          if (a == b) continue;
          double psum = pr[a] + pr[b];
          if (psum <= 0.0) continue;
          v -= 8.0 * pr[a] * pr[b] / psum *
               std::real(h_eig[i](a, b) * h_eig[j](b, a));
        }
      out.f(i, j) = v;
      out.f(j, i) = v;
    }
  return out;
}

}  // namespace oracle
}  // namespace qfis
