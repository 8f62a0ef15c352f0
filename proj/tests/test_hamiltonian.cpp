#include <doctest.h>

#include "test_util.hpp"

using namespace qfis;
using testutil::max_abs_diff;

namespace {

Vec3 jac_col(const RealMatrix& j, int i) { return {j(0, i), j(1, i), j(2, i)}; }

}  // namespace

TEST_CASE("alpha_at built-ins") {
  ParamPoint p{{1.0, M_PI / 2, 0.0}, 1.0};
  CHECK(max_abs_diff(alpha_at(HamiltonianSpec::angle_axis(), p), {1, 0, 0}) < 1e-15);

  ParamPoint q{{0.0, 2.0}, 1.0};
  CHECK(max_abs_diff(alpha_at(HamiltonianSpec::fixed_axis_field(), q), {0, 0, 2}) < 1e-15);

  auto lin = HamiltonianSpec::linear_custom({0, 0, 0}, {{0, 0, 1}}, {"x"});
  CHECK(max_abs_diff(alpha_at(lin, {{0.7}, 1.0}), {0, 0, 0.7}) < 1e-15);
}

TEST_CASE("alpha_at validation") {
  ParamPoint wrong{{1.0}, 1.0};
  CHECK_THROWS_AS(alpha_at(HamiltonianSpec::angle_axis(), wrong), precondition_error);
  HamiltonianSpec bad{HamiltonianKind::LinearCustom, {"a"}, {}, {{0, 0, 0}}};
  CHECK_THROWS_AS(bad.validate(), precondition_error);
  HamiltonianSpec dup{HamiltonianKind::LinearCustom, {"a", "a"}, {}, {{1, 0, 0}, {0, 1, 0}}};
  CHECK_THROWS_AS(dup.validate(), precondition_error);
}

TEST_CASE("jacobian_at angle-axis closed forms") {
  ParamPoint p{{1.0, M_PI / 2, 0.0}, 1.0};
  RealMatrix j = jacobian_at(HamiltonianSpec::angle_axis(), p);
  CHECK(max_abs_diff(jac_col(j, 0), {1, 0, 0}) < 1e-15);
  CHECK(max_abs_diff(jac_col(j, 1), {0, 0, -1}) < 1e-15);
  CHECK(max_abs_diff(jac_col(j, 2), {0, 1, 0}) < 1e-15);
}

TEST_CASE("jacobian_at fixed-axis-field closed forms") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uth(0.0, M_PI), ub(0.1, 3.0);
  for (int i = 0; i < 50; ++i) {
    double th = uth(rng), b = ub(rng);
    RealMatrix j = jacobian_at(HamiltonianSpec::fixed_axis_field(), {{th, b}, 1.0});
    CHECK(max_abs_diff(jac_col(j, 0), b * Vec3{std::cos(th), 0, -std::sin(th)}) < 1e-14);
    CHECK(max_abs_diff(jac_col(j, 1), {std::sin(th), 0, std::cos(th)}) < 1e-14);
  }
}

TEST_CASE("linear-custom jacobian is the direction set") {
  std::mt19937 rng(17);
  std::vector<Vec3> dirs = {testutil::random_vec3(rng), testutil::random_vec3(rng),
                            testutil::random_vec3(rng)};
  auto spec = HamiltonianSpec::linear_custom(testutil::random_vec3(rng), dirs, {"a", "b", "c"});
  ParamPoint p{{0.3, -1.2, 2.0}, 1.0};
  RealMatrix j = jacobian_at(spec, p);
  for (int i = 0; i < 3; ++i) CHECK(max_abs_diff(jac_col(j, i), dirs[i]) == 0.0);
  // exact match for any step: zero curvature
  for (double h : {1e-2, 1e-4, 1e-6})
    CHECK((numeric_jacobian(spec, p, h) - j).max_abs() < 1e-9);
}

TEST_CASE("numeric vs analytic jacobian on 200 random points per built-in") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uang(0.2, M_PI - 0.2), umag(0.1, 2.0),
      uphi(-2.0, 2.0), ueta(0.1, 2.0);
  for (int i = 0; i < 200; ++i) {
    ParamPoint p{{umag(rng), uang(rng), uphi(rng)}, 1.0};
    RealMatrix d = jacobian_at(HamiltonianSpec::angle_axis(), p) -
                   numeric_jacobian(HamiltonianSpec::angle_axis(), p, 1e-5);
    CHECK(d.max_abs() < 1e-6);

    ParamPoint q{{uang(rng), umag(rng)}, 1.0};
    RealMatrix d2 = jacobian_at(HamiltonianSpec::fixed_axis_field(), q) -
                    numeric_jacobian(HamiltonianSpec::fixed_axis_field(), q, 1e-5);
    CHECK(d2.max_abs() < 1e-6);

    ParamPoint c{{ueta(rng), uang(rng) * 0.8, uphi(rng)}, 1.3};
    RealMatrix d3 = jacobian_at(HamiltonianSpec::coset(), c) -
                    numeric_jacobian(HamiltonianSpec::coset(), c, 1e-5);
    CHECK(d3.max_abs() < 1e-6);
  }
}

TEST_CASE("central differences converge at second order") {
  HamiltonianSpec spec = HamiltonianSpec::angle_axis();
  ParamPoint p{{1.3, 0.9, 0.4}, 1.0};
  RealMatrix exact = jacobian_at(spec, p);
  std::vector<double> hs = {1e-1, 1e-2, 1e-3};
  std::vector<double> errs;
  for (double h : hs) errs.push_back((numeric_jacobian(spec, p, h) - exact).max_abs());
  double slope = std::log10(errs[0] / errs[2]) / 2.0;
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("angle-axis direction derivatives stay tangent") {
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> uang(0.2, M_PI - 0.2), uphi(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    ParamPoint p{{1.0, uang(rng), uphi(rng)}, 1.0};
    HamiltonianSpec spec = HamiltonianSpec::angle_axis();
    Vec3 ahat = normalized(alpha_at(spec, p));
    RealMatrix j = jacobian_at(spec, p);
    // with r = 1, columns theta and phi are d(alpha_hat)
    CHECK(std::abs(dot(ahat, jac_col(j, 1))) < 1e-12);
    CHECK(std::abs(dot(ahat, jac_col(j, 2))) < 1e-12);
  }
}

TEST_CASE("fixed-axis-field is angle-axis at phi = 0") {
  std::mt19937 rng(88);
  std::uniform_real_distribution<double> uang(0.0, M_PI), ub(0.1, 3.0);
  for (int i = 0; i < 100; ++i) {
    double th = uang(rng), b = ub(rng);
    Vec3 a1 = alpha_at(HamiltonianSpec::fixed_axis_field(), {{th, b}, 1.0});
    Vec3 a2 = alpha_at(HamiltonianSpec::angle_axis(), {{b, th, 0.0}, 1.0});
    CHECK(max_abs_diff(a1, a2) == 0.0);
  }
}

TEST_CASE("coset alpha reconstructs the factorized unitary") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> ueta(0.1, 2.5), ugam(0.1, 2.5), uxi(-3.0, 3.0),
      ut(0.2, 3.0);
  for (int i = 0; i < 100; ++i) {
    double eta = ueta(rng), gamma = ugam(rng), xi = uxi(rng), t = ut(rng);
    Vec3 alpha = alpha_at(HamiltonianSpec::coset(), {{eta, gamma, xi}, t});
    Mat2 u = su2_exp(alpha, t);
    Mat2 omega1 = su2_exp({0, 0, 1}, eta / 2);
    Mat2 omega2 = su2_exp({std::sin(xi), std::cos(xi), 0}, gamma / 2);
    CHECK((u - omega2 * omega1).max_abs() < 1e-12);
  }
}

TEST_CASE("coset branch point is rejected") {
  // eta = 2 pi, gamma = 0 gives U = -1 (rt = pi)
  CHECK_THROWS_AS(alpha_at(HamiltonianSpec::coset(), {{2 * M_PI, 0.0, 0.3}, 1.0}),
                  branch_error);
  CHECK_THROWS_AS(alpha_at(HamiltonianSpec::coset(), {{1.0, 1.0, 0.0}, 0.0}),
                  precondition_error);
}
