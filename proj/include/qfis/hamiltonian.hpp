#pragma once

#include <algorithm>
#include <functional>
#include <optional>

#include "qfis/pauli.hpp"

namespace qfis {

enum class HamiltonianKind { AngleAxis, FixedAxisField, Coset, LinearCustom };

inline std::string kind_name(HamiltonianKind k) {
  switch (k) {
    case HamiltonianKind::AngleAxis: return "angle-axis";
    case HamiltonianKind::FixedAxisField: return "fixed-axis-field";
    case HamiltonianKind::Coset: return "coset";
    default: return "linear-custom";
  }
}

/// Evaluation point: parameter vector plus evolution time (hbar = 1).
struct ParamPoint {
  std::vector<double> theta;
  double t = 0.0;
};

/// Parametrized qubit Hamiltonian H(theta) = alpha(theta).sigma.
///
/// Built-in kinds:
///   angle-axis        params (r, theta, phi):  alpha = r (sin th cos ph, sin th sin ph, cos th)
///   fixed-axis-field  params (theta, B):       alpha = B (sin th, 0, cos th)
///   coset             params (eta, gamma, xi): alpha from U = Omega2(gamma,xi) Omega1(eta)
///   linear-custom     alpha = alpha0 + sum_i theta_i v_i
struct HamiltonianSpec {
  HamiltonianKind kind = HamiltonianKind::LinearCustom;
  std::vector<std::string> params;

  // linear-custom data
  Vec3 base{};
  std::vector<Vec3> directions;

  // linear-custom pieces declared non-analytic fall back to central
  // differences in jacobian_at; built-ins never do.
  bool numeric_jacobian_only = false;

  int n_params() const { return static_cast<int>(params.size()); }

  void validate() const {
    if (params.empty())
      throw precondition_error("HamiltonianSpec: needs at least one parameter");
    for (size_t i = 0; i < params.size(); ++i)
      for (size_t j = i + 1; j < params.size(); ++j)
        if (params[i] == params[j])
          throw precondition_error("HamiltonianSpec: duplicate parameter name '" +
                                   params[i] + "'");
    switch (kind) {
      case HamiltonianKind::AngleAxis:
      case HamiltonianKind::Coset:
        if (params.size() != 3)
          throw precondition_error(kind_name(kind) + " spec requires 3 parameters");
        break;
      case HamiltonianKind::FixedAxisField:
        if (params.size() != 2)
          throw precondition_error("fixed-axis-field spec requires 2 parameters");
        break;
      case HamiltonianKind::LinearCustom: {
        if (directions.size() != params.size())
          throw precondition_error("linear-custom: one direction per parameter required");
        bool any = false;
        for (const Vec3& v : directions) any = any || norm(v) > 0.0;
        if (!any) throw precondition_error("linear-custom: all directions are zero");
        break;
      }
    }
  }

  static HamiltonianSpec angle_axis() {
    return {HamiltonianKind::AngleAxis, {"r", "theta", "phi"}};
  }
  static HamiltonianSpec fixed_axis_field() {
    return {HamiltonianKind::FixedAxisField, {"theta", "B"}};
  }
  static HamiltonianSpec coset() {
    return {HamiltonianKind::Coset, {"eta", "gamma", "xi"}};
  }
  static HamiltonianSpec linear_custom(Vec3 alpha0, std::vector<Vec3> dirs,
                                       std::vector<std::string> names) {
    HamiltonianSpec s{HamiltonianKind::LinearCustom, std::move(names)};
    s.base = alpha0;
    s.directions = std::move(dirs);
    return s;
  }
};

namespace detail {

// Quaternion-like data of the coset unitary U = Omega2(gamma,xi) Omega1(eta):
// U = c 1 - i v.sigma with c = cos(g/2)cos(e/2) and
// v = (sin(g/2) sin(xi+e/2), sin(g/2) cos(xi+e/2), cos(g/2) sin(e/2)).
struct CosetQuat {
  double c;
  Vec3 v;
  double rt;  // = |alpha| t = atan2(|v|, c), in [0, pi]
};

inline CosetQuat coset_quat(double eta, double gamma, double xi) {
  double ce = std::cos(0.5 * eta), se = std::sin(0.5 * eta);
  double cg = std::cos(0.5 * gamma), sg = std::sin(0.5 * gamma);
  double gh = xi + 0.5 * eta;
  CosetQuat q;
  q.c = cg * ce;
  q.v = {sg * std::sin(gh), sg * std::cos(gh), cg * se};
  q.rt = std::atan2(norm(q.v), q.c);
  return q;
}

// g(x) = x/sin(x) and q(x) = (sin x - x cos x)/sin^3 x, series near 0.
inline double sinc_inv(double x) {
  if (std::abs(x) < 1e-3) {
    double x2 = x * x;
    return 1.0 + x2 / 6.0 + 7.0 * x2 * x2 / 360.0;
  }
  return x / std::sin(x);
}

inline double sinc_inv_slope(double x) {
  if (std::abs(x) < 1e-3) {
    double x2 = x * x;
    return 1.0 / 3.0 + 2.0 * x2 / 15.0;
  }
  double s = std::sin(x);
  return (s - x * std::cos(x)) / (s * s * s);
}

}  // namespace detail

inline void check_point(const HamiltonianSpec& spec, const ParamPoint& p) {
  if (static_cast<int>(p.theta.size()) != spec.n_params())
    throw precondition_error("ParamPoint has " + std::to_string(p.theta.size()) +
                             " coordinates, spec expects " +
                             std::to_string(spec.n_params()));
  if (p.t < 0.0) throw precondition_error("ParamPoint: t must be >= 0");
}

inline Vec3 alpha_at(const HamiltonianSpec& spec, const ParamPoint& p) {
  check_point(spec, p);
  switch (spec.kind) {
    case HamiltonianKind::AngleAxis: {
      double r = p.theta[0], th = p.theta[1], ph = p.theta[2];
      return r * Vec3{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                      std::cos(th)};
    }
    case HamiltonianKind::FixedAxisField: {
      double th = p.theta[0], b = p.theta[1];
      return b * Vec3{std::sin(th), 0.0, std::cos(th)};
    }
    case HamiltonianKind::Coset: {
      if (p.t <= 0.0)
        throw precondition_error("coset spec requires t > 0");
      auto q = detail::coset_quat(p.theta[0], p.theta[1], p.theta[2]);
      if (norm(q.v) < 1e-9 && q.c < 0.0)
        throw branch_error("coset spec at branch point rt = pi");
      // alpha t = rt * v_hat, so alpha = (rt/sin rt) v / t
      return q.v * (detail::sinc_inv(q.rt) / p.t);
    }
    default: {
      Vec3 a = spec.base;
      for (int i = 0; i < spec.n_params(); ++i) a += p.theta[i] * spec.directions[i];
      return a;
    }
  }
}

inline RealMatrix numeric_jacobian(const HamiltonianSpec& spec, const ParamPoint& p,
                                   double step = 0.0) {
  check_point(spec, p);
  const int n = spec.n_params();
  RealMatrix j(3, n);
  const double eps_cbrt = std::cbrt(2.220446049250313e-16);
  for (int i = 0; i < n; ++i) {
    double h = step > 0.0 ? step : eps_cbrt * std::max(1.0, std::abs(p.theta[i]));
    ParamPoint pp = p, pm = p;
    pp.theta[i] += h;
    pm.theta[i] -= h;
    Vec3 d = (alpha_at(spec, pp) - alpha_at(spec, pm)) * (0.5 / h);
    for (int k = 0; k < 3; ++k) j(k, i) = d[k];
  }
  return j;
}

/// Column i is d alpha / d theta_i. Analytic for the built-in kinds.
inline RealMatrix jacobian_at(const HamiltonianSpec& spec, const ParamPoint& p) {
  check_point(spec, p);
  const int n = spec.n_params();
  RealMatrix j(3, n);
  auto set_col = [&](int i, const Vec3& v) {
    for (int k = 0; k < 3; ++k) j(k, i) = v[k];
  };
  switch (spec.kind) {
    case HamiltonianKind::AngleAxis: {
      double r = p.theta[0], th = p.theta[1], ph = p.theta[2];
      double st = std::sin(th), ct = std::cos(th);
      double sp = std::sin(ph), cp = std::cos(ph);
      set_col(0, {st * cp, st * sp, ct});
      set_col(1, r * Vec3{ct * cp, ct * sp, -st});
      set_col(2, r * Vec3{-st * sp, st * cp, 0.0});
      return j;
    }
    case HamiltonianKind::FixedAxisField: {
      double th = p.theta[0], b = p.theta[1];
      set_col(0, b * Vec3{std::cos(th), 0.0, -std::sin(th)});
      set_col(1, {std::sin(th), 0.0, std::cos(th)});
      return j;
    }
    case HamiltonianKind::Coset: {
      if (p.t <= 0.0) throw precondition_error("coset spec requires t > 0");
      double eta = p.theta[0], gamma = p.theta[1], xi = p.theta[2];
      double ce = std::cos(0.5 * eta), se = std::sin(0.5 * eta);
      double cg = std::cos(0.5 * gamma), sg = std::sin(0.5 * gamma);
      double gh = xi + 0.5 * eta;
      double sG = std::sin(gh), cG = std::cos(gh);
      auto q = detail::coset_quat(eta, gamma, xi);
      if (norm(q.v) < 1e-6 && q.c < 0.0)
        throw branch_error("coset jacobian at branch point rt = pi");
      // alpha = g(rt) v / t with cos(rt) = c; d(alpha) = (-q(rt) dc v + g dv)/t
      double g = detail::sinc_inv(q.rt);
      double qs = detail::sinc_inv_slope(q.rt);
      Vec3 dv_eta = {0.5 * sg * cG, -0.5 * sg * sG, 0.5 * cg * ce};
      Vec3 dv_gamma = {0.5 * cg * sG, 0.5 * cg * cG, -0.5 * sg * se};
      Vec3 dv_xi = {sg * cG, -sg * sG, 0.0};
      double dc_eta = -0.5 * cg * se;
      double dc_gamma = -0.5 * sg * ce;
      set_col(0, (g * dv_eta - qs * dc_eta * q.v) * (1.0 / p.t));
      set_col(1, (g * dv_gamma - qs * dc_gamma * q.v) * (1.0 / p.t));
      set_col(2, (g * dv_xi) * (1.0 / p.t));
      return j;
    }
    default: {
      if (spec.numeric_jacobian_only) return numeric_jacobian(spec, p);
      for (int i = 0; i < n; ++i) set_col(i, spec.directions[i]);
      return j;
    }
  }
}

}  // namespace qfis
