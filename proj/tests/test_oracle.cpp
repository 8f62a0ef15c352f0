#include <doctest.h>

#include "test_util.hpp"

using namespace qfis;
using namespace qfis::oracle;
using testutil::max_abs_diff;

TEST_CASE("unitary_of") {
  std::mt19937 rng(1);
  auto [spec, p] = testutil::random_instance(rng);
  ParamPoint zero = p;
  zero.t = 0.0;
  if (spec.kind != HamiltonianKind::Coset)
    CHECK((unitary_of(spec, zero) - Mat2::identity()).max_abs() < 1e-15);

  auto lin = HamiltonianSpec::linear_custom({0, 0, 1}, {{1, 0, 0}}, {"x"});
  Mat2 u = unitary_of(lin, {{0.0}, M_PI});
  CHECK(std::abs(u(0, 0) - std::exp(complexd(0, -M_PI))) < 1e-14);
  CHECK(std::abs(u(1, 1) - std::exp(complexd(0, M_PI))) < 1e-14);

  for (int i = 0; i < 50; ++i) {
    auto [s2, p2] = testutil::random_instance(rng);
    CHECK(unitarity_defect(unitary_of(s2, p2)) < 1e-13);
  }
}

TEST_CASE("m_matrix_fd basics") {
  // parameter the Hamiltonian does not depend on
  auto spec = HamiltonianSpec::linear_custom({0.3, 0.1, -0.4}, {{1, 0, 0}, {0, 0, 0}},
                                             {"x", "dead"});
  GeneratorMatrix dead = m_matrix_fd(spec, {{0.5, 7.0}, 1.2}, 1);
  CHECK(dead.mat.max_abs() < 1e-9);

  // angle-axis r-column: m_r = t alpha_hat
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> uang(0.2, M_PI - 0.2), uphi(-3.0, 3.0),
      ut(0.2, 3.0), ur(0.2, 2.0);
  for (int i = 0; i < 50; ++i) {
    ParamPoint p{{ur(rng), uang(rng), uphi(rng)}, ut(rng)};
    GeneratorMatrix g = m_matrix_fd(HamiltonianSpec::angle_axis(), p, 0, 1e-5);
    Vec3 ahat = normalized(alpha_at(HamiltonianSpec::angle_axis(), p));
    CHECK(max_abs_diff(pauli_project(g.mat), p.t * ahat) < 1e-8);
    CHECK(g.anti_hermitian_residual < 1e-6);
    CHECK(std::abs(g.mat.trace()) < 1e-10);
  }
}

TEST_CASE("wilcox rotation identity") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> us(0.0, 1.0), ut(0.1, 4.0);
  for (int i = 0; i < 200; ++i) {
    Vec3 alpha = testutil::random_vec3(rng, 2.0);
    double s = us(rng), t = ut(rng);
    Mat3 analytic = wilcox_rotation_analytic(alpha, s, t);
    Mat3 adjoint = adjoint_rotation(su2_exp(alpha, (1.0 - s) * t));
    CHECK((analytic - adjoint).max_abs() < 1e-12);
  }
}

TEST_CASE("m_vector_wilcox agrees with the closed form") {
  std::mt19937 rng(14);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    auto [spec, p] = testutil::random_instance(rng);
    MVectorSet closed = m_vectors(spec, p);
    for (int i = 0; i < spec.n_params(); ++i)
      worst = std::max(worst, max_abs_diff(m_vector_wilcox(spec, p, i, 32), closed.m[i]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("m_vector_wilcox special cases") {
  auto spec = HamiltonianSpec::linear_custom({0, 0, 0}, {{0.4, -0.2, 0.9}}, {"x"});
  ParamPoint p{{1.3}, 0.0};
  CHECK(norm(m_vector_wilcox(spec, p, 0)) < 1e-15);

  // magnitude-only dependence: m = t (d|alpha|/dtheta) alpha_hat exactly
  std::mt19937 rng(15);
  std::uniform_real_distribution<double> ut(0.2, 4.0), ur(0.3, 2.0);
  for (int i = 0; i < 50; ++i) {
    ParamPoint q{{ur(rng), 1.1, 0.7}, ut(rng)};
    Vec3 m = m_vector_wilcox(HamiltonianSpec::angle_axis(), q, 0, 32);
    Vec3 ahat = normalized(alpha_at(HamiltonianSpec::angle_axis(), q));
    CHECK(max_abs_diff(m, q.t * ahat) < 1e-12);
  }
}

TEST_CASE("m_matrix_fd agrees with wilcox to fd accuracy") {
  std::mt19937 rng(16);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    auto [spec, p] = testutil::random_instance(rng, 5.0);
    for (int i = 0; i < spec.n_params(); ++i) {
      Vec3 fd = pauli_project(m_matrix_fd(spec, p, i).mat);
      worst = std::max(worst, max_abs_diff(fd, m_vector_wilcox(spec, p, i, 32)));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("h_series") {
  SUBCASE("commuting case terminates at the first term") {
    auto spec = HamiltonianSpec::linear_custom({0, 0, 0}, {{0, 0, 1}}, {"x"});
    ParamPoint p{{0.8}, 1.7};
    GeneratorMatrix g = h_series(spec, p, 0, 1);
    CHECK(max_abs_diff(pauli_project(g.mat), {0, 0, p.t}) < 1e-14);
    GeneratorMatrix g30 = h_series(spec, p, 0, 30);
    CHECK((g.mat - g30.mat).max_abs() < 1e-14);
  }

  SUBCASE("|alpha| t = 1 at 30 terms matches quadrature") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      Vec3 dir = testutil::random_unit(rng);
      auto spec = HamiltonianSpec::linear_custom({0, 0, 0},
                                                 {dir, testutil::random_vec3(rng)},
                                                 {"mag", "other"});
      ParamPoint p{{1.0, 0.6}, 1.0};
      p.t = 1.0 / norm(alpha_at(spec, p));  // |alpha| t = 1
      for (int i = 0; i < 2; ++i) {
        Vec3 series = pauli_project(h_series(spec, p, i, 30).mat);
        CHECK(max_abs_diff(series, m_vector_wilcox(spec, p, i, 32)) < 1e-12);
      }
    }
  }

  SUBCASE("error decays factorially in the term count") {
    HamiltonianSpec spec = HamiltonianSpec::angle_axis();
    ParamPoint p{{1.0, 1.1, 0.4}, 1.0};
    Vec3 ref = m_vector_wilcox(spec, p, 1, 32);
    std::vector<double> errs;
    for (int n : {5, 10, 15})
      errs.push_back(max_abs_diff(pauli_project(h_series(spec, p, 1, n).mat), ref));
    CHECK(errs[1] < errs[0] * 1e-2);
    CHECK(errs[2] < errs[1] * 1e-2);
    // factorial convergence: successive log-error drops grow
    CHECK(std::log(errs[0] / errs[1]) < std::log(errs[1] / errs[2]));
  }

  SUBCASE("large-argument guard") {
    auto spec = HamiltonianSpec::linear_custom({0, 0, 0}, {{1, 0, 0}}, {"x"});
    CHECK_THROWS_AS(h_series(spec, {{3.0}, 5.0}, 0, 30), precondition_error);
    CHECK_NOTHROW(h_series(spec, {{3.0}, 5.0}, 0, 80));
  }
}

TEST_CASE("K/M conjugacy") {
  std::mt19937 rng(18);
  for (int trial = 0; trial < 100; ++trial) {
    auto [spec, p] = testutil::random_instance(rng, 5.0);
    Mat2 u = unitary_of(spec, p);
    for (int i = 0; i < spec.n_params(); ++i) {
      Mat2 k = k_matrix_fd(spec, p, i).mat;
      Mat2 m = m_matrix_fd(spec, p, i).mat;
      CHECK((m - u.adjoint() * k * u).max_abs() < 1e-9);
    }
  }
}

TEST_CASE("generators are traceless Hermitian") {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    auto [spec, p] = testutil::random_instance(rng, 5.0);
    for (int i = 0; i < spec.n_params(); ++i) {
      for (const Mat2& g : {m_matrix_fd(spec, p, i).mat, k_matrix_fd(spec, p, i).mat}) {
        CHECK(hermiticity_defect(g) < 1e-14);  // hermitized by construction
        CHECK(std::abs(g.trace()) < 1e-10);
      }
      Mat2 s = h_series(spec, p, i, norm(alpha_at(spec, p)) * p.t > 10 ? 80 : 40).mat;
      CHECK(std::abs(s.trace()) < 1e-12);
    }
  }
}

TEST_CASE("sld_matrix") {
  std::mt19937 rng(20);

  SUBCASE("degenerate probe gives zero") {
    GeneratorMatrix g;
    g.mat = testutil::random_traceless_hermitian(rng);
    ProbeState probe{0.5, 0.5, testutil::random_unit(rng)};
    CHECK(sld_matrix(g, probe).mat.max_abs() == 0.0);
  }

  SUBCASE("pure probe keeps only weighted off-diagonals") {
    GeneratorMatrix g;
    g.mat = testutil::random_traceless_hermitian(rng);
    ProbeState probe{1.0, 0.0, testutil::random_unit(rng)};
    SldMatrix l = sld_matrix(g, probe);
    Mat2 phi = probe_basis(probe);
    Mat2 m_eig = phi.adjoint() * g.mat * phi;
    CHECK(std::abs(l.mat(0, 0)) < 1e-15);
    CHECK(std::abs(l.mat(1, 1)) < 1e-15);
    CHECK(std::abs(l.mat(0, 1) - complexd(0, 2.0) * m_eig(0, 1)) < 1e-13);
    CHECK(hermiticity_defect(l.mat) < 1e-13);
  }

  SUBCASE("defining equation residual") {
    for (int trial = 0; trial < 50; ++trial) {
      auto [spec, p] = testutil::random_instance(rng, 3.0);
      ProbeState probe = testutil::random_probe(rng, false);
      Mat2 u = unitary_of(spec, p);
      for (int i = 0; i < spec.n_params(); ++i) {
        SldMatrix l = sld_matrix(m_matrix_fd(spec, p, i), probe);
        // back to the computational basis of rho_theta
        Mat2 basis = u * probe_basis(probe);
        Mat2 l_full = basis * l.mat * basis.adjoint();
        Mat2 rho_theta = u * probe.density() * u.adjoint();
        // finite-difference d rho / d theta_i
        double h = 1e-6 * std::max(1.0, std::abs(p.theta[i]));
        ParamPoint pp = p, pm = p;
        pp.theta[i] += h;
        pm.theta[i] -= h;
        Mat2 up = unitary_of(spec, pp), um = unitary_of(spec, pm);
        Mat2 drho = (up * probe.density() * up.adjoint() -
                     um * probe.density() * um.adjoint()) *
                    (0.5 / h);
        Mat2 residual = drho - 0.5 * (l_full * rho_theta + rho_theta * l_full);
        CHECK(residual.max_abs() < 1e-8);
      }
    }
  }
}

TEST_CASE("qfi_eigenbasis matches the closed form") {
  std::mt19937 rng(21);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    auto [spec, p] = testutil::random_instance(rng, 5.0);
    ProbeState probe = testutil::random_probe(rng);
    MVectorSet m = m_vectors(spec, p);
    std::vector<GeneratorMatrix> gens(m.size());
    for (int i = 0; i < m.size(); ++i) gens[i].mat = pauli_compose(m.m[i]);
    QfiMatrix closed = qfi_matrix(m, probe);
    QfiMatrix eigen = qfi_eigenbasis(gens, probe, spec.params);
    worst = std::max(worst, (closed.f - eigen.f).max_abs());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("qfi_eigenbasis z-probe component form and degenerate probe") {
  std::mt19937 rng(22);
  std::vector<GeneratorMatrix> gens(2);
  std::vector<Vec3> ms = {testutil::random_vec3(rng), testutil::random_vec3(rng)};
  for (int i = 0; i < 2; ++i) gens[i].mat = pauli_compose(ms[i]);

  ProbeState zp{0.8, 0.2, kZhat};
  QfiMatrix f = qfi_eigenbasis(gens, zp);
  double w2 = 4.0 * zp.weight() * zp.weight();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(f(i, j) - w2 * (dot(ms[i], ms[j]) - ms[i].z * ms[j].z)) < 1e-12);

  ProbeState degenerate{0.5, 0.5, testutil::random_unit(rng)};
  CHECK(qfi_eigenbasis(gens, degenerate).f.max_abs() == 0.0);
}

TEST_CASE("qfi_covariance") {
  std::mt19937 rng(23);

  SUBCASE("pure probe reduces to 4 cov") {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<GeneratorMatrix> gens(2);
      std::vector<Vec3> ms = {testutil::random_vec3(rng), testutil::random_vec3(rng)};
      for (int i = 0; i < 2; ++i) gens[i].mat = pauli_compose(ms[i]);
      ProbeState pure{1.0, 0.0, testutil::random_unit(rng)};
      QfiMatrix f = qfi_covariance(gens, pure);
      Mat2 phi = probe_basis(pure);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          Mat2 hi = phi.adjoint() * gens[i].mat * phi;
          Mat2 hj = phi.adjoint() * gens[j].mat * phi;
          Mat2 anti = hi * hj + hj * hi;
          double cov = 0.5 * std::real(anti(0, 0)) -
                       std::real(hi(0, 0)) * std::real(hj(0, 0));
          CHECK(std::abs(f(i, j) - 4.0 * cov) < 1e-12);
        }
    }
  }

  SUBCASE("equals eigenbasis route on random mixed probes") {
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
      auto [spec, p] = testutil::random_instance(rng, 5.0);
      ProbeState probe = testutil::random_probe(rng);
      MVectorSet m = m_vectors(spec, p);
      std::vector<GeneratorMatrix> gens(m.size());
      for (int i = 0; i < m.size(); ++i) gens[i].mat = pauli_compose(m.m[i]);
      worst = std::max(worst, (qfi_covariance(gens, probe).f -
                               qfi_eigenbasis(gens, probe, spec.params).f)
                                  .max_abs());
    }
    CHECK(worst < 1e-10);
  }

  SUBCASE("degenerate probe agrees with eigenbasis route") {
    std::vector<GeneratorMatrix> gens(2);
    for (int i = 0; i < 2; ++i) gens[i].mat = testutil::random_traceless_hermitian(rng);
    ProbeState degenerate{0.5, 0.5, testutil::random_unit(rng)};
    QfiMatrix cov = qfi_covariance(gens, degenerate);
    QfiMatrix eig = qfi_eigenbasis(gens, degenerate);
    CHECK((cov.f - eig.f).max_abs() < 1e-12);
  }
}

TEST_CASE("three m-vector routes pairwise agree on randomized sweeps") {
  std::mt19937 rng(24);
  double closed_vs_wilcox = 0.0, closed_vs_fd = 0.0, wilcox_vs_fd = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    auto [spec, p] = testutil::random_instance(rng, 10.0);
    MVectorSet closed = m_vectors(spec, p);
    for (int i = 0; i < spec.n_params(); ++i) {
      Vec3 w = m_vector_wilcox(spec, p, i, 32);
      Vec3 fd = pauli_project(m_matrix_fd(spec, p, i).mat);
      closed_vs_wilcox = std::max(closed_vs_wilcox, max_abs_diff(closed.m[i], w));
      closed_vs_fd = std::max(closed_vs_fd, max_abs_diff(closed.m[i], fd));
      wilcox_vs_fd = std::max(wilcox_vs_fd, max_abs_diff(w, fd));
    }
  }
  CHECK(closed_vs_wilcox < 1e-12);
  CHECK(closed_vs_fd < 1e-6);
  CHECK(wilcox_vs_fd < 1e-6);
}
