#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "bentwire/quadrature.hpp"
#include "bentwire/regularization.hpp"

using namespace bentwire;
using std::numbers::pi;

namespace {

const PhysicalParams kParams{};
const double kK = power_law_amplitude(0.5, pi / 8, -5, 5);

std::vector<double> decades(int from, int to) {
  std::vector<double> out;
  for (int k = from; k <= to; ++k) out.push_back(std::pow(10.0, -k));
  return out;
}

// Smooth compactly supported test function on (c - r, c + r) and its derivative.
double test_fn(double s, double c, double r) {
  const double x = (s - c) / r;
  return std::abs(x) < 1 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
}
double test_fn_prime(double s, double c, double r) {
  const double x = (s - c) / r;
  if (std::abs(x) >= 1) return 0.0;
  const double q = 1.0 - x * x;
  return std::exp(-1.0 / q) * (-2.0 * x / (q * q)) / r;
}

}  // namespace

TEST_CASE("regularize builds the shifted power law") {
  const auto base = CurvatureSpec::power_law(kK, 0.5);
  const auto reg = regularize(base, 0.01);
  CHECK(reg.kind() == CurvatureKind::PowerLawRegularized);
  CHECK(reg.epsilon() == 0.01);
  CHECK(reg(0.0) == doctest::Approx(kK / 0.1));
  CHECK(reg(0.99) == doctest::Approx(kK));
  CHECK_THROWS_AS(regularize(base, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(regularize(base, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(regularize(CurvatureSpec::constant(1.0), 0.1), std::invalid_argument);
}

TEST_CASE("geometric potential values") {
  const auto mesh = Mesh::uniform(-5, 5, 10);
  const auto zero = geometric_potential(CurvatureSpec::zero(), kParams, mesh);
  for (double v : zero.v_samples) CHECK(v == 0.0);

  const auto sing = CurvatureSpec::power_law(kK, 0.5);
  const double A = hbar2_over_2me / 4 * kK * kK;
  CHECK(A == doctest::Approx(0.8997).epsilon(1e-4));
  CHECK(geometric_potential_value(sing, kParams, 2.0) == doctest::Approx(-A / 2.0));
  CHECK(geometric_potential_value(sing, kParams, -0.5) == doctest::Approx(-A / 0.5));

  const auto c = geometric_potential(CurvatureSpec::constant(0.2), kParams, mesh);
  for (double v : c.v_samples) CHECK(v == doctest::Approx(-0.38100).epsilon(1e-4));

  // Odd cell count puts a staggered node on the singular point.
  CHECK_THROWS_AS(geometric_potential(sing, kParams, Mesh::uniform(-5, 5, 11)), SingularPointError);
  CHECK_NOTHROW(geometric_potential(sing, kParams, mesh));
}

TEST_CASE("primitive examples") {
  const auto sing = CurvatureSpec::power_law(kK, 0.5);
  const auto model = potential_primitive(sing, kParams, 0.0);
  const double A = kParams.geometric_prefactor() * kK * kK;
  CHECK(model.U(std::exp(1.0)) == doctest::Approx(-A));
  CHECK(model.U(-std::exp(1.0)) == doctest::Approx(A));
  CHECK(model.U(1.0) == 0.0);
  CHECK_FALSE(model.bounded);
  CHECK(potential_primitive(sing, kParams, 2.5).U(1.0) == doctest::Approx(2.5));
  CHECK(potential_primitive(CurvatureSpec::zero(), kParams, 0.0).U(3.0) == 0.0);
}

TEST_CASE("property: primitive scales with K^2 and 1/m") {
  const PhysicalParams heavy{-5, 5, 2.0};
  for (double alpha : {0.25, 0.5}) {
    const auto u1 = potential_primitive(CurvatureSpec::power_law(0.3, alpha), kParams, 0.0);
    const auto u2 = potential_primitive(CurvatureSpec::power_law(0.6, alpha), kParams, 0.0);
    const auto um = potential_primitive(CurvatureSpec::power_law(0.3, alpha), heavy, 0.0);
    for (double s : {-4.0, -0.3, 0.01, 2.0}) {
      CHECK(u2.U(s) == doctest::Approx(4.0 * u1.U(s)));
      CHECK(um.U(s) == doctest::Approx(0.5 * u1.U(s)));
    }
  }
}

TEST_CASE("property: closed-form primitive differences match quadrature of V") {
  const std::vector<CurvatureSpec> specs{CurvatureSpec::constant(0.4), CurvatureSpec::power_law(kK, 0.5),
                                         CurvatureSpec::power_law(0.5, 0.25),
                                         CurvatureSpec::power_law_regularized(kK, 0.5, 1e-3),
                                         CurvatureSpec::power_law_regularized(0.5, 0.3, 0.1),
                                         CurvatureSpec::tabulated({{-5, 0.1}, {0, 0.6}, {5, 0.2}})};
  const std::vector<std::pair<double, double>> ranges{{-4.5, -0.2}, {0.1, 4.9}, {0.3, 0.7}};
  for (const auto& spec : specs) {
    const auto model = potential_primitive(spec, kParams, 0.0);
    for (auto [lo, hi] : ranges) {
      const double numeric = integrate([&](double s) { return geometric_potential_value(spec, kParams, s); }, lo, hi,
                                       spec.breakpoints());
      CHECK(model.U(hi) - model.U(lo) == doctest::Approx(numeric).epsilon(1e-9));
    }
  }
  // Across the origin for regularized and integrable-singular kinds.
  for (const auto& spec : {specs[2], specs[3], specs[4]}) {
    const auto model = potential_primitive(spec, kParams, 0.0);
    const double numeric = integrate([&](double s) { return geometric_potential_value(spec, kParams, s); }, -1.0, 2.0,
                                     spec.breakpoints());
    CHECK(model.U(2.0) - model.U(-1.0) == doctest::Approx(numeric).epsilon(1e-9));
  }
}

TEST_CASE("property: U is a weak primitive of V") {
  // -int U phi' = int V phi; across the origin only when V is integrable there.
  struct Case {
    CurvatureSpec spec;
    double c, r;
  };
  const std::vector<Case> cases{{CurvatureSpec::power_law(0.5, 0.25), 0.2, 1.0},
                                {CurvatureSpec::power_law(kK, 0.5), 1.5, 1.0},
                                {CurvatureSpec::power_law_regularized(kK, 0.5, 0.01), 0.0, 1.0}};
  for (const auto& [spec, c, r] : cases) {
    const auto model = potential_primitive(spec, kParams, 0.7);
    std::vector<double> cuts = spec.breakpoints();
    const double lhs =
        -integrate([&](double s) { return model.U(s) * test_fn_prime(s, c, r); }, c - r, c + r, cuts);
    const double rhs = integrate(
        [&](double s) { return geometric_potential_value(spec, kParams, s) * test_fn(s, c, r); }, c - r, c + r, cuts);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("branchwise primitive carries a ln(1/eps) step at the origin") {
  const double A = kParams.geometric_prefactor() * kK * kK;
  for (double eps : {1e-2, 1e-5, 1e-8}) {
    const auto spec = CurvatureSpec::power_law_regularized(kK, 0.5, eps);
    const auto branch = potential_primitive(spec, kParams, 0.0, PrimitiveConvention::Branchwise);
    const auto classic = potential_primitive(spec, kParams, 0.0, PrimitiveConvention::Classical);
    const double tiny = 1e-14;
    CHECK(branch.U(tiny) - branch.U(-tiny) == doctest::Approx(-2.0 * A * std::log(eps)).epsilon(1e-6));
    CHECK(std::abs(classic.U(tiny) - classic.U(-tiny)) <= 2.0 * A * tiny / eps * (1 + 1e-6));
    // Away from the origin the two conventions differ by a sign-dependent constant.
    CHECK(branch.U(2.0) - classic.U(2.0) == doctest::Approx(-A * std::log(eps)));
    CHECK(branch.U(-2.0) - classic.U(-2.0) == doctest::Approx(A * std::log(eps)));
  }
}

TEST_CASE("bounded family is admissible with zero errors") {
  const auto family = make_family(CurvatureSpec::constant(0.2), decades(0, 4));
  const auto report = assess_admissibility(family, kParams);
  for (double e : report.l1_curvature_errors) CHECK(e == 0.0);
  for (double e : report.l2_primitive_errors) CHECK(e == 0.0);
  CHECK(report.verdict == Verdict::Admissible);
}

TEST_CASE("alpha = 1/4 power-law family is admissible") {
  const auto base = CurvatureSpec::power_law(power_law_amplitude(0.25, pi / 8, -5, 5), 0.25);
  const auto report = assess_admissibility(make_family(base, decades(0, 8)), kParams);
  CHECK(report.l1_converging);
  CHECK(report.l2_converging);
  CHECK(report.l2_slope > 0.4);
  CHECK(report.verdict == Verdict::Admissible);
}

TEST_CASE("alpha = 1/2 family is pre-admissible only under the classical primitive") {
  const auto base = CurvatureSpec::power_law(kK, 0.5);
  const auto report = assess_admissibility(make_family(base, decades(0, 8)), kParams);
  CHECK(report.l1_converging);
  CHECK_FALSE(report.l2_converging);
  for (std::size_t i = 1; i < report.l2_primitive_errors.size(); ++i) {
    CHECK(report.l2_primitive_errors[i] > report.l2_primitive_errors[i - 1]);
    CHECK(report.l2_branchwise_errors[i] < report.l2_branchwise_errors[i - 1]);
  }
  CHECK(report.verdict == Verdict::PreAdmissibleOnly);
}

TEST_CASE("fewer than three epsilons is inconclusive") {
  const auto report = assess_admissibility(make_family(CurvatureSpec::constant(0.2), {1.0, 0.1}), kParams);
  CHECK(report.verdict == Verdict::Inconclusive);
}

TEST_CASE("family validation") {
  CHECK_THROWS(make_family(CurvatureSpec::zero(), {}));
  CHECK_THROWS(make_family(CurvatureSpec::zero(), {1.0, 1.0}));
  CHECK_THROWS(make_family(CurvatureSpec::zero(), {1.0, -0.5}));
  const auto family = make_family(CurvatureSpec::power_law(kK, 0.5), {1.0, 0.1});
  CHECK_THROWS_AS(family.member(2), std::out_of_range);
}

TEST_CASE("step primitive norm matches direct integration") {
  const double P = 0.5, s0 = 1.0;
  const double height = -kParams.geometric_prefactor() * P;
  auto step = [&](double s) { return s < s0 ? 0.0 : height; };
  const std::vector<double> cut{s0};
  const double mean = integrate(step, -5, 5, cut) / 10.0;
  const double direct =
      std::sqrt(integrate([&](double s) { return (step(s) - mean) * (step(s) - mean); }, -5, 5, cut));
  CHECK(step_primitive_norm(P, s0, kParams) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("bump perturbation of an admissible family plateaus at the step norm") {
  const auto base = CurvatureSpec::power_law(power_law_amplitude(0.25, pi / 8, -5, 5), 0.25);
  const auto family = make_family(base, decades(0, 8));
  const double P = 0.5, s0 = 1.0;
  const auto bumped = perturb_with_bump(family, P, WidthRule{1.0, 1.0}, s0);
  const double target = step_primitive_norm(P, s0, kParams);
  const double tail = l2_primitive_error(bumped, bumped.size() - 1, kParams);
  CHECK(std::abs(tail - target) < 0.05 * target);
  // The bump costs only O(sqrt(P w)) in L1, so the family stays pre-admissible.
  for (std::size_t i = 0; i < family.size(); ++i)
    CHECK(l1_curvature_error(bumped, i, kParams) >= l1_curvature_error(family, i, kParams));
  const auto report = assess_admissibility(bumped, kParams);
  CHECK(report.l1_converging);
  CHECK_FALSE(report.l2_converging);
  CHECK(report.verdict == Verdict::PreAdmissibleOnly);
}

TEST_CASE("zero-height bump leaves the family unchanged") {
  const auto family = make_family(CurvatureSpec::power_law(kK, 0.5), decades(0, 3));
  const auto same = perturb_with_bump(family, 0.0);
  CHECK_FALSE(same.defect.has_value());
  for (std::size_t i = 0; i < family.size(); ++i)
    CHECK(l2_primitive_error(same, i, kParams) == l2_primitive_error(family, i, kParams));
}

TEST_CASE("negative bump that would make kappa^2 negative is rejected") {
  const auto family = make_family(CurvatureSpec::zero(), decades(0, 3));
  CHECK_THROWS_AS(perturb_with_bump(family, -0.1, WidthRule{0.5, 0.0}, 1.0), std::invalid_argument);
  const auto strong = make_family(CurvatureSpec::constant(2.0), decades(0, 3));
  CHECK_NOTHROW(perturb_with_bump(strong, -0.1, WidthRule{0.5, 0.0}, 1.0));
}

TEST_CASE("cell-averaged bump keeps its integral on a coarse mesh") {
  const auto mesh = Mesh::uniform(-5, 5, 20);
  const auto spec = CurvatureSpec::zero().with_bump({0.5, 1.0, 1e-4});
  const auto model = geometric_potential(spec, kParams, mesh);
  double total = 0.0;
  for (double v : model.v_samples) total += v * mesh.h;
  CHECK(total == doctest::Approx(-kParams.geometric_prefactor() * 0.5).epsilon(1e-12));
}
