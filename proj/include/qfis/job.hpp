#pragma once

#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qfis/oracle.hpp"
#include "qfis/reparam.hpp"

namespace qfis {

using json = nlohmann::json;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Config schema
// ---------------------------------------------------------------------------

struct SweepSpec {
  std::string variable;  // parameter name or "t"
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
};

struct OracleOptions {
  std::vector<std::string> routes = {"closed", "wilcox", "fd", "series",
                                     "eigenbasis", "covariance"};
  int n_terms = 30;
  int quadrature_order = 32;
  double fd_step = 0.0;  // 0 = per-coordinate default
};

struct ReparamSpec {
  std::string map;  // "identity" | "linear" | "coset-to-canonical"
  RealMatrix matrix;  // for "linear": theta_alpha = matrix * theta_beta
};

struct JobConfig {
  HamiltonianSpec hamiltonian;
  ProbeState probe;
  ParamPoint point;
  std::optional<SweepSpec> sweep;
  OracleOptions oracle;
  std::optional<ReparamSpec> reparam;
};

namespace detail_job {

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw config_error("missing field: " + path + "." + key);
  return *it;
}

inline double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw config_error("expected number at " + path);
  return j.get<double>();
}

inline Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3)
    throw config_error("expected 3-element array at " + path);
  return {num(j[0], path), num(j[1], path), num(j[2], path)};
}

}  // namespace detail_job

inline HamiltonianSpec parse_hamiltonian(const json& j, const std::string& path = "hamiltonian") {
  using detail_job::field;
  std::string kind = field(j, "kind", path).get<std::string>();
  HamiltonianSpec spec;
  if (kind == "angle-axis") {
    spec = HamiltonianSpec::angle_axis();
  } else if (kind == "fixed-axis-field") {
    spec = HamiltonianSpec::fixed_axis_field();
  } else if (kind == "coset") {
    spec = HamiltonianSpec::coset();
  } else if (kind == "linear-custom") {
    spec.kind = HamiltonianKind::LinearCustom;
    const json& params = field(j, "params", path);
    for (const auto& p : params) spec.params.push_back(p.get<std::string>());
    const json& consts = field(j, "constants", path);
    spec.base = detail_job::vec3(field(consts, "alpha0", path + ".constants"),
                                 path + ".constants.alpha0");
    const json& dirs = field(consts, "directions", path + ".constants");
    for (size_t i = 0; i < dirs.size(); ++i)
      spec.directions.push_back(
          detail_job::vec3(dirs[i], path + ".constants.directions[" + std::to_string(i) + "]"));
    if (consts.contains("numeric_jacobian"))
      spec.numeric_jacobian_only = consts["numeric_jacobian"].get<bool>();
  } else {
    throw config_error("unknown hamiltonian kind '" + kind + "' at " + path + ".kind");
  }
  if (j.contains("params") && kind != "linear-custom") {
    // optional renaming of the built-in parameters
    std::vector<std::string> names;
    for (const auto& p : j["params"]) names.push_back(p.get<std::string>());
    if (names.size() != spec.params.size())
      throw config_error("wrong parameter count at " + path + ".params");
    spec.params = std::move(names);
  }
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw config_error(path + ": " + e.what());
  }
  return spec;
}

inline ProbeState parse_probe(const json& j, const std::string& path = "probe") {
  bool has_bloch = j.contains("bloch") || j.contains("p0");
  bool has_density = j.contains("density");
  if (has_bloch == has_density)
    throw config_error(path + ": give exactly one of {p0, bloch} or {density}");
  if (has_density) {
    const json& d = j["density"];
    if (!d.is_array() || d.size() != 2)
      throw config_error(path + ".density: expected 2x2 matrix of [re, im] pairs");
    Mat2 rho;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        const json& e = d[r][c];
        if (!e.is_array() || e.size() != 2)
          throw config_error(path + ".density: entries must be [re, im] pairs");
        rho(r, c) = complexd(e[0].get<double>(), e[1].get<double>());
      }
    try {
      return probe_from_density(rho);
    } catch (const std::exception& e) {
      throw config_error(path + ".density: " + e.what());
    }
  }
  ProbeState probe;
  probe.p0 = detail_job::num(detail_job::field(j, "p0", path), path + ".p0");
  probe.p1 = 1.0 - probe.p0;
  probe.n_hat = detail_job::vec3(detail_job::field(j, "bloch", path), path + ".bloch");
  try {
    probe.validate();
  } catch (const std::exception& e) {
    throw config_error(path + ": " + e.what());
  }
  return probe;
}

inline JobConfig parse_config(const json& j) {
  using detail_job::field;
  JobConfig cfg;
  cfg.hamiltonian = parse_hamiltonian(field(j, "hamiltonian", "$"));
  cfg.probe = parse_probe(field(j, "probe", "$"));
  const json& pt = field(j, "point", "$");
  for (const auto& v : field(pt, "theta", "point"))
    cfg.point.theta.push_back(detail_job::num(v, "point.theta"));
  cfg.point.t = detail_job::num(field(pt, "t", "point"), "point.t");
  if (static_cast<int>(cfg.point.theta.size()) != cfg.hamiltonian.n_params())
    throw config_error("point.theta length does not match hamiltonian parameter count");
  if (cfg.point.t < 0.0) throw config_error("point.t must be >= 0");

  if (j.contains("sweep")) {
    const json& sw = j["sweep"];
    SweepSpec s;
    s.variable = field(sw, "variable", "sweep").get<std::string>();
    s.from = detail_job::num(field(sw, "from", "sweep"), "sweep.from");
    s.to = detail_job::num(field(sw, "to", "sweep"), "sweep.to");
    s.steps = field(sw, "steps", "sweep").get<int>();
    if (s.steps < 1) throw config_error("sweep.steps must be >= 1");
    if (s.variable != "t") {
      auto& ps = cfg.hamiltonian.params;
      if (std::find(ps.begin(), ps.end(), s.variable) == ps.end())
        throw config_error("sweep.variable '" + s.variable + "' is not a parameter");
    }
    cfg.sweep = s;
  }

  if (j.contains("oracle")) {
    const json& oc = j["oracle"];
    if (oc.contains("routes")) {
      cfg.oracle.routes.clear();
      for (const auto& r : oc["routes"]) cfg.oracle.routes.push_back(r.get<std::string>());
    }
    if (oc.contains("n_terms")) cfg.oracle.n_terms = oc["n_terms"].get<int>();
    if (oc.contains("quadrature_order"))
      cfg.oracle.quadrature_order = oc["quadrature_order"].get<int>();
    if (oc.contains("fd_step")) cfg.oracle.fd_step = oc["fd_step"].get<double>();
  }

  if (j.contains("reparam")) {
    const json& rp = j["reparam"];
    ReparamSpec r;
    r.map = field(rp, "map", "reparam").get<std::string>();
    if (r.map == "linear") {
      const json& mat = field(rp, "matrix", "reparam");
      int rows = static_cast<int>(mat.size());
      if (rows == 0) throw config_error("reparam.matrix must be non-empty");
      int cols = static_cast<int>(mat[0].size());
      r.matrix = RealMatrix(rows, cols);
      for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(mat[i].size()) != cols)
          throw config_error("reparam.matrix rows have unequal length");
        for (int c = 0; c < cols; ++c)
          r.matrix(i, c) = detail_job::num(mat[i][c], "reparam.matrix");
      }
    } else if (r.map != "identity" && r.map != "coset-to-canonical") {
      throw config_error("reparam.map must be identity, linear, or coset-to-canonical");
    }
    cfg.reparam = r;
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Serialization helpers
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline json to_json(const RealMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct PointReport {
  MVectorSet m;
  QfiMatrix f;
  double det_f = 0.0;
  std::optional<double> tr_f_inv;
  std::optional<std::vector<double>> cramer_rao;
  SingularityReport singularity;
};

inline PointReport evaluate_point(const HamiltonianSpec& spec, const ParamPoint& p,
                                  const ProbeState& probe) {
  PointReport rep;
  rep.m = m_vectors(spec, p);
  rep.f = qfi_matrix(rep.m, probe);
  rep.singularity = singularity_report(rep.m, probe);
  rep.det_f = rep.singularity.det_f;
  if (!rep.singularity.singular) {
    rep.tr_f_inv = precision_limit(rep.f);
    rep.cramer_rao = cramer_rao_bound(rep.f, 1);
  }
  return rep;
}

inline json report_to_json(const JobConfig& cfg, const PointReport& rep) {
  json out;
  out["params"] = cfg.hamiltonian.params;
  out["point"] = {{"theta", cfg.point.theta}, {"t", cfg.point.t}};
  out["probe"] = {{"p0", cfg.probe.p0}, {"p1", cfg.probe.p1}, {"n_hat", to_json(cfg.probe.n_hat)}};
  json mv = json::array();
  for (const Vec3& v : rep.m.m) mv.push_back(to_json(v));
  out["m_vectors"] = mv;
  out["qfi"] = to_json(rep.f.f);
  out["det_f"] = rep.det_f;
  out["tr_f_inv"] = rep.tr_f_inv ? json(*rep.tr_f_inv) : json(nullptr);
  out["cramer_rao"] = rep.cramer_rao ? json(*rep.cramer_rao) : json(nullptr);
  json pairs = json::array();
  for (const auto& pq : rep.singularity.n_in_span_pairs)
    pairs.push_back(json::array({pq[0], pq[1]}));
  out["singularity"] = {{"gram_rank", rep.singularity.gram_rank},
                        {"n_in_span_pairs", pairs},
                        {"singular", rep.singularity.singular}};
  return out;
}

inline json run_compute(const JobConfig& cfg) {
  return report_to_json(cfg, evaluate_point(cfg.hamiltonian, cfg.point, cfg.probe));
}

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // NaN marks null precision fields
};

inline SweepTable run_sweep(const JobConfig& cfg) {
  if (!cfg.sweep) throw config_error("sweep block required");
  const SweepSpec& sw = *cfg.sweep;
  const int n = cfg.hamiltonian.n_params();
  SweepTable table;
  table.columns.push_back(sw.variable);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      table.columns.push_back("F_" + cfg.hamiltonian.params[i] + "_" +
                              cfg.hamiltonian.params[j]);
  table.columns.push_back("det_F");
  table.columns.push_back("tr_F_inv");

  int var_index = -1;
  if (sw.variable != "t") {
    auto& ps = cfg.hamiltonian.params;
    var_index = static_cast<int>(std::find(ps.begin(), ps.end(), sw.variable) - ps.begin());
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int step = 0; step < sw.steps; ++step) {
    double v = sw.steps == 1
                   ? sw.from
                   : sw.from + (sw.to - sw.from) * step / (sw.steps - 1.0);
    ParamPoint p = cfg.point;
    if (var_index < 0)
      p.t = v;
    else
      p.theta[var_index] = v;
    PointReport rep = evaluate_point(cfg.hamiltonian, p, cfg.probe);
    std::vector<double> row;
    row.push_back(v);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) row.push_back(rep.f(i, j));
    row.push_back(rep.det_f);
    row.push_back(rep.tr_f_inv ? *rep.tr_f_inv : nan);
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::string sweep_to_csv(const SweepTable& table) {
  std::ostringstream os;
  for (size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << "\n";
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << format_double(row[c]);
    os << "\n";
  }
  return os.str();
}

inline json sweep_to_json(const SweepTable& table) {
  json out;
  out["columns"] = table.columns;
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = json::array();
    for (double v : row) r.push_back(std::isnan(v) ? json(nullptr) : json(v));
    rows.push_back(r);
  }
  out["rows"] = rows;
  return out;
}

inline json run_reparam(const JobConfig& cfg) {
  if (!cfg.reparam) throw config_error("reparam block required");
  const ReparamSpec& rp = *cfg.reparam;
  json out;
  if (rp.map == "identity") {
    PointReport rep = evaluate_point(cfg.hamiltonian, cfg.point, cfg.probe);
    TransferMatrix s;
    s.s = RealMatrix::identity(cfg.hamiltonian.n_params());
    s.source_params = s.target_params = cfg.hamiltonian.params;
    s.at_point = cfg.point.theta;
    QfiMatrix f_beta = transform_qfi(rep.f, s);
    out["s"] = to_json(s.s);
    out["f_alpha"] = to_json(rep.f.f);
    out["f_beta"] = to_json(f_beta.f);
    out["residual"] = (f_beta.f - rep.f.f).max_abs();
    return out;
  }
  if (rp.map == "linear") {
    const RealMatrix& a = rp.matrix;
    if (a.rows != cfg.hamiltonian.n_params())
      throw config_error("reparam.matrix row count must match hamiltonian parameter count");
    if (a.cols != static_cast<int>(cfg.point.theta.size()))
      throw config_error("reparam.matrix column count must match point dimension");
    // theta_alpha = A theta_beta; the configured point holds beta coordinates
    ParamPoint alpha_pt;
    alpha_pt.t = cfg.point.t;
    alpha_pt.theta.assign(a.rows, 0.0);
    for (int k = 0; k < a.rows; ++k)
      for (int l = 0; l < a.cols; ++l) alpha_pt.theta[k] += a(k, l) * cfg.point.theta[l];
    PointReport rep = evaluate_point(cfg.hamiltonian, alpha_pt, cfg.probe);
    TransferMatrix s;
    s.s = a;
    s.source_params = cfg.hamiltonian.params;
    for (int l = 0; l < a.cols; ++l) s.target_params.push_back("beta" + std::to_string(l));
    s.at_point = cfg.point.theta;
    QfiMatrix f_beta = transform_qfi(rep.f, s);
    // independent route: push the m-vectors through S, then rebuild F
    MVectorSet m_beta = transform_m_vectors(rep.m, s);
    QfiMatrix f_beta_direct = qfi_matrix(m_beta, cfg.probe);
    out["s"] = to_json(s.s);
    out["f_alpha"] = to_json(rep.f.f);
    out["f_beta"] = to_json(f_beta.f);
    out["residual"] = (f_beta.f - f_beta_direct.f).max_abs();
    return out;
  }
  // coset-to-canonical
  if (cfg.hamiltonian.kind != HamiltonianKind::Coset)
    throw config_error("reparam map coset-to-canonical requires a coset hamiltonian");
  double t = cfg.point.t;
  CanonicalPoint cp = canonical_from_coset(cfg.point.theta[0], cfg.point.theta[1],
                                           cfg.point.theta[2], t);
  if (cp.theta_singular)
    throw branch_error("reparam: coset point maps to a theta-singular canonical point");
  TransferMatrix s = transfer_from_map(coset_to_canonical_map(t), cfg.point.theta);
  ParamPoint canon_pt{{cp.r, cp.theta, cp.phi}, t};
  PointReport rep_alpha = evaluate_point(HamiltonianSpec::angle_axis(), canon_pt, cfg.probe);
  PointReport rep_beta = evaluate_point(cfg.hamiltonian, cfg.point, cfg.probe);
  QfiMatrix f_beta_transferred = transform_qfi(rep_alpha.f, s);
  out["canonical_point"] = {{"r", cp.r}, {"theta", cp.theta}, {"phi", cp.phi}};
  out["s"] = to_json(s.s);
  out["f_alpha"] = to_json(rep_alpha.f.f);
  out["f_beta"] = to_json(rep_beta.f.f);
  out["residual"] = (f_beta_transferred.f - rep_beta.f.f).max_abs();
  return out;
}

// ---------------------------------------------------------------------------
// Oracle cross-check
// ---------------------------------------------------------------------------

struct OracleCheckRow {
  std::string quantity;
  std::string route_a, route_b;
  double max_dev = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct OracleCheckResult {
  std::vector<OracleCheckRow> rows;
  bool all_pass = true;
};

inline double route_pair_tolerance(const std::string& a, const std::string& b) {
  auto is_fd = [](const std::string& r) { return r == "fd"; };
  if (is_fd(a) || is_fd(b)) return 1e-6;
  if (a == "series" || b == "series") return 1e-10;
  return 1e-12;  // closed vs wilcox
}

inline OracleCheckResult run_oracle_check(const JobConfig& cfg) {
  std::set<std::string> routes(cfg.oracle.routes.begin(), cfg.oracle.routes.end());
  static const std::set<std::string> known = {"closed", "wilcox", "fd",
                                              "series", "eigenbasis", "covariance"};
  for (const auto& r : routes)
    if (!known.count(r)) throw config_error("unknown oracle route '" + r + "'");
  if (routes.size() < 2) throw config_error("oracle check needs at least 2 routes");

  const HamiltonianSpec& spec = cfg.hamiltonian;
  const ParamPoint& p = cfg.point;
  const int n = spec.n_params();
  OracleCheckResult res;

  // m-vector routes
  std::vector<std::pair<std::string, std::vector<Vec3>>> mroutes;
  MVectorSet closed = m_vectors(spec, p);
  if (routes.count("closed")) mroutes.push_back({"closed", closed.m});
  if (routes.count("wilcox")) {
    std::vector<Vec3> m(n);
    for (int i = 0; i < n; ++i)
      m[i] = oracle::m_vector_wilcox(spec, p, i, cfg.oracle.quadrature_order);
    mroutes.push_back({"wilcox", m});
  }
  if (routes.count("fd")) {
    std::vector<Vec3> m(n);
    for (int i = 0; i < n; ++i)
      m[i] = pauli_project(oracle::m_matrix_fd(spec, p, i, cfg.oracle.fd_step).mat);
    mroutes.push_back({"fd", m});
  }
  if (routes.count("series")) {
    std::vector<Vec3> m(n);
    for (int i = 0; i < n; ++i)
      m[i] = pauli_project(oracle::h_series(spec, p, i, cfg.oracle.n_terms).mat);
    mroutes.push_back({"series", m});
  }
  for (size_t a = 0; a < mroutes.size(); ++a)
    for (size_t b = a + 1; b < mroutes.size(); ++b) {
      double dev = 0.0;
      for (int i = 0; i < n; ++i) {
        Vec3 d = mroutes[a].second[i] - mroutes[b].second[i];
        dev = std::max({dev, std::abs(d.x), std::abs(d.y), std::abs(d.z)});
      }
      OracleCheckRow row{"m_vectors", mroutes[a].first, mroutes[b].first, dev,
                         route_pair_tolerance(mroutes[a].first, mroutes[b].first)};
      row.pass = dev <= row.tolerance;
      res.rows.push_back(row);
      res.all_pass = res.all_pass && row.pass;
    }

  // QFI routes, all fed from the closed-form generators so only the formulas
  // themselves are compared
  std::vector<oracle::GeneratorMatrix> gens(n);
  for (int i = 0; i < n; ++i) {
    gens[i].mat = pauli_compose(closed.m[i]);
    gens[i].param_index = i;
  }
  std::vector<std::pair<std::string, QfiMatrix>> froutes;
  if (routes.count("closed")) froutes.push_back({"closed", qfi_matrix(closed, cfg.probe)});
  if (routes.count("eigenbasis"))
    froutes.push_back({"eigenbasis", oracle::qfi_eigenbasis(gens, cfg.probe, spec.params)});
  if (routes.count("covariance"))
    froutes.push_back({"covariance", oracle::qfi_covariance(gens, cfg.probe, spec.params)});
  for (size_t a = 0; a < froutes.size(); ++a)
    for (size_t b = a + 1; b < froutes.size(); ++b) {
      double dev = (froutes[a].second.f - froutes[b].second.f).max_abs();
      OracleCheckRow row{"qfi", froutes[a].first, froutes[b].first, dev, 1e-10};
      row.pass = dev <= row.tolerance;
      res.rows.push_back(row);
      res.all_pass = res.all_pass && row.pass;
    }
  return res;
}

inline json oracle_check_to_json(const OracleCheckResult& res) {
  json out;
  json rows = json::array();
  for (const auto& r : res.rows)
    rows.push_back({{"quantity", r.quantity},
                    {"route_a", r.route_a},
                    {"route_b", r.route_b},
                    {"max_dev", r.max_dev},
                    {"tolerance", r.tolerance},
                    {"pass", r.pass}});
  out["checks"] = rows;
  out["all_pass"] = res.all_pass;
  return out;
}

}  // namespace qfis
