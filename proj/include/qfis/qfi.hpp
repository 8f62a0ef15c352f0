#pragma once

#include "qfis/hamiltonian.hpp"

namespace qfis {

// ---------------------------------------------------------------------------
// Probe state
// ---------------------------------------------------------------------------

/// Qubit probe as eigenvalues (p0 >= p1) plus the Bloch direction of the
/// dominant eigenvector: rho0 = p0 |n><n| + p1 |-n><-n|.
struct ProbeState {
  double p0 = 1.0;
  double p1 = 0.0;
  Vec3 n_hat = kZhat;

  double weight() const { return p0 - p1; }

  void validate(const Tolerances& tol = kDefaultTol) const {
    if (std::abs(p0 + p1 - 1.0) > 1e-12 || p1 < -1e-12 || p0 < p1)
      throw precondition_error("ProbeState: eigenvalues must satisfy p0 >= p1 >= 0, p0+p1 = 1");
    if (std::abs(norm(n_hat) - 1.0) > tol.unit_vector)
      throw precondition_error("ProbeState: |n_hat| must be 1");
  }

  Mat2 density() const {
    Mat2 plus = 0.5 * (Mat2::identity() + pauli_compose(n_hat));
    Mat2 minus = 0.5 * (Mat2::identity() - pauli_compose(n_hat));
    return p0 * plus + p1 * minus;
  }
};

inline ProbeState probe_from_density(const Mat2& rho0) {
  if (hermiticity_defect(rho0) > 1e-12)
    throw precondition_error("probe_from_density: density matrix must be Hermitian");
  if (std::abs(rho0.trace() - 1.0) > 1e-12)
    throw precondition_error("probe_from_density: density matrix must have unit trace");
  Eig2 e = eig_hermitian2(rho0);
  if (e.values[1] < -1e-12 || e.values[0] > 1.0 + 1e-12)
    throw precondition_error("probe_from_density: eigenvalues outside [0, 1]");
  ProbeState probe;
  probe.p0 = std::clamp(e.values[0], 0.0, 1.0);
  probe.p1 = std::clamp(e.values[1], 0.0, 1.0);
  complexd v0 = e.vectors(0, 0), v1 = e.vectors(1, 0);
  probe.n_hat = {2.0 * std::real(std::conj(v0) * v1),
                 2.0 * std::imag(std::conj(v0) * v1),
                 std::norm(v0) - std::norm(v1)};
  double nn = norm(probe.n_hat);
  probe.n_hat = nn > 1e-12 ? probe.n_hat * (1.0 / nn) : kZhat;
  return probe;
}

// ---------------------------------------------------------------------------
// m-vectors
// ---------------------------------------------------------------------------

/// Per-parameter Bloch vectors m_i with i U^dag dU/dtheta_i = m_i . sigma.
struct MVectorSet {
  std::vector<Vec3> m;
  std::vector<std::string> params;
  ParamPoint point;

  int size() const { return static_cast<int>(m.size()); }
};

namespace detail {

// m = A da + B (alpha x da) + C (alpha.da) alpha, with x = 2|alpha|t:
//   A = sin(x)/(2a) = t sinc(x)
//   B = -(1-cos x)/(2a^2) = -t^2 (1-cos x) 2/x^2
//   C = (x - sin x)/(2a^3) = 4 t^3 (x - sin x)/x^3
// The t-scaled forms are regular at alpha = 0; below x = 1e-4 they are
// evaluated by series so the a -> 0 limit m = t da comes out exactly.
inline Vec3 m_vector_closed(const Vec3& alpha, const Vec3& da, double t) {
  double a = norm(alpha);
  double x = 2.0 * a * t;
  double A, B, C;
  if (std::abs(x) < 1e-4) {
    double x2 = x * x;
    A = t * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
    B = -t * t * (1.0 - x2 / 12.0 + x2 * x2 / 360.0);
    C = (2.0 / 3.0) * t * t * t * (1.0 - x2 / 20.0 + x2 * x2 / 840.0);
  } else {
    A = std::sin(x) / (2.0 * a);
    B = -(1.0 - std::cos(x)) / (2.0 * a * a);
    C = (x - std::sin(x)) / (2.0 * a * a * a);
  }
  return A * da + B * cross(alpha, da) + C * dot(alpha, da) * alpha;
}

}  // namespace detail

inline MVectorSet m_vectors(const HamiltonianSpec& spec, const ParamPoint& p) {
  check_point(spec, p);
  Vec3 alpha = alpha_at(spec, p);
  RealMatrix jac = jacobian_at(spec, p);
  MVectorSet out;
  out.params = spec.params;
  out.point = p;
  out.m.reserve(spec.params.size());
  for (int i = 0; i < spec.n_params(); ++i) {
    Vec3 da{jac(0, i), jac(1, i), jac(2, i)};
    out.m.push_back(detail::m_vector_closed(alpha, da, p.t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// QFI matrix
// ---------------------------------------------------------------------------

struct QfiMatrix {
  RealMatrix f;
  std::vector<std::string> params;

  int size() const { return f.rows; }
  double operator()(int i, int j) const { return f(i, j); }
};

struct singular_fisher : std::runtime_error {
  double det_f;
  std::vector<double> null_direction;
  singular_fisher(double det, std::vector<double> dir)
      : std::runtime_error("singular Fisher matrix, det = " + std::to_string(det)),
        det_f(det),
        null_direction(std::move(dir)) {}
};

/// F_ij = 4 (p0-p1)^2 [ m_i . m_j - (n.m_i)(n.m_j) ].
inline QfiMatrix qfi_matrix(const MVectorSet& m, const ProbeState& probe) {
  probe.validate();
  const int n = m.size();
  QfiMatrix out;
  out.params = m.params;
  out.f = RealMatrix(n, n);
  double w = probe.weight();
  if (w == 0.0) return out;
  double w2 = 4.0 * w * w;
  std::vector<double> proj(n);
  for (int i = 0; i < n; ++i) proj[i] = dot(probe.n_hat, m.m[i]);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = w2 * (dot(m.m[i], m.m[j]) - proj[i] * proj[j]);
      out.f(i, j) = v;
      out.f(j, i) = v;
    }
  return out;
}

/// Single-parameter ceiling 4|m|^2, attained by any pure probe with
/// n_hat perpendicular to m.
inline double qfi_single_max(const Vec3& m_theta) { return 4.0 * dot(m_theta, m_theta); }

namespace detail {

inline double singularity_floor(const RealMatrix& f) {
  double prod = 1.0;
  for (int i = 0; i < f.rows; ++i) prod *= std::max(f(i, i), 1.0);
  return 1e-10 * prod;
}

}  // namespace detail

/// Tr F^{-1}; throws singular_fisher below the scale-aware determinant floor.
inline double precision_limit(const QfiMatrix& fm) {
  SymEigen e = eig_symmetric(fm.f);
  double det = 1.0;
  for (double lam : e.values) det *= lam;
  if (std::abs(det) < detail::singularity_floor(fm.f)) {
    std::vector<double> dir(fm.size());
    for (int i = 0; i < fm.size(); ++i) dir[i] = e.vectors(i, 0);
    throw singular_fisher(det, std::move(dir));
  }
  double tr = 0.0;
  for (double lam : e.values) tr += 1.0 / lam;
  return tr;
}

/// Per-parameter Cramer-Rao bounds sqrt((F^{-1})_ii / N).
inline std::vector<double> cramer_rao_bound(const QfiMatrix& fm, long n_trials) {
  if (n_trials <= 0) throw precondition_error("cramer_rao_bound: N must be positive");
  SymEigen e = eig_symmetric(fm.f);
  double det = 1.0;
  for (double lam : e.values) det *= lam;
  if (std::abs(det) < detail::singularity_floor(fm.f)) {
    std::vector<double> dir(fm.size());
    for (int i = 0; i < fm.size(); ++i) dir[i] = e.vectors(i, 0);
    throw singular_fisher(det, std::move(dir));
  }
  RealMatrix inv = inverse_symmetric(fm.f);
  std::vector<double> out(fm.size());
  for (int i = 0; i < fm.size(); ++i)
    out[i] = std::sqrt(inv(i, i) / static_cast<double>(n_trials));
  return out;
}

// ---------------------------------------------------------------------------
// Singularity diagnostics
// ---------------------------------------------------------------------------

struct SingularityReport {
  double det_f = 0.0;
  int gram_rank = 0;
  // flag (i, j) set when n_hat lies in span{m_i, m_j} of an independent pair
  std::vector<std::array<int, 2>> n_in_span_pairs;
  bool singular = false;
};

inline SingularityReport singularity_report(const MVectorSet& m, const ProbeState& probe) {
  const int n = m.size();
  SingularityReport rep;
  QfiMatrix f = qfi_matrix(m, probe);
  rep.det_f = det_symmetric(f.f);

  RealMatrix gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gram(i, j) = dot(m.m[i], m.m[j]);
  SymEigen ge = eig_symmetric(gram);
  double gmax = std::max(std::abs(ge.values.empty() ? 0.0 : ge.values.back()), 1e-300);
  for (double lam : ge.values)
    if (lam > 1e-12 * gmax) ++rep.gram_rank;

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double scale = norm(m.m[i]) * norm(m.m[j]);
      if (scale < 1e-300) continue;
      double triple = dot(probe.n_hat, cross(m.m[i], m.m[j]));
      double indep = norm(cross(m.m[i], m.m[j]));
      if (indep > 1e-10 * scale && std::abs(triple) < 1e-10 * indep)
        rep.n_in_span_pairs.push_back({i, j});
    }

  rep.singular = std::abs(rep.det_f) < detail::singularity_floor(f.f);
  return rep;
}

}  // namespace qfis
