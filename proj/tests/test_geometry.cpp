#include <doctest.h>

#include <cmath>
#include <vector>

#include "calabi/geometry.hpp"
#include "calabi/halton.hpp"
#include "calabi/products.hpp"
#include "oracles.hpp"

using namespace calabi;

namespace {

GeometryReport report_of(const ExprPtr& f, int arity, std::vector<double> x) {
  return geometry_report(jet4(f, arity, x), x);
}

}  // namespace

TEST_CASE("paraboloid: identity metric, vanishing cubic form") {
  ExprPtr f = parse_expression("x1^2/2+x2^2/2", 2);
  GeometryReport r = report_of(f, 2, {0.7, -0.4});
  CHECK(r.metric(0, 0) == doctest::Approx(1.0));
  CHECK(r.metric(1, 1) == doctest::Approx(1.0));
  CHECK(r.metric(0, 1) == doctest::Approx(0.0));
  CHECK(r.fubini_pick.max_abs() == 0.0);
  CHECK(r.riemann_max == 0.0);
  CHECK(r.nabla_A_max == 0.0);
  CHECK(r.scalar_curvature == 0.0);
  CHECK(r.tcheb_norm2 == 0.0);
  CHECK(r.pick_invariant == 0.0);
  CHECK(r.weingarten_max == 0.0);
}

TEST_CASE("Q(1;2) at (1,0): frozen invariants") {
  ExprPtr f = q_family(std::vector<double>{1.0}, 2);
  GeometryReport r = report_of(f, 2, {1.0, 0.0});
  CHECK(r.metric(0, 0) == doctest::Approx(1.0));
  CHECK(r.metric(1, 1) == doctest::Approx(1.0));
  CHECK(r.fubini_pick(0, 0, 0) == doctest::Approx(1.0));
  CHECK(r.fubini_pick(0, 0, 1) == doctest::Approx(0.0));
  CHECK(r.christoffel(0, 0, 0) == doctest::Approx(-1.0));
  CHECK(r.riemann_max <= 1e-14);
  CHECK(r.pick_invariant == doctest::Approx(0.5));
  CHECK(r.tcheb_norm2 == doctest::Approx(0.25));
  CHECK(std::fabs(r.scalar_curvature) <= 1e-14);
  CHECK(r.nabla_A_max <= 1e-14);
  CHECK(r.codazzi_max <= 1e-14);
  CHECK(r.gauss_gap_max <= 1e-13);
}

TEST_CASE("log-quadric at (0,0,2): scalar curvature -2") {
  CatalogEntry entry = catalog("log-quadric", {{"lambda", {1.0}}});
  GeometryReport r = report_of(entry.expr, 3, {0.0, 0.0, 2.0});
  CHECK(r.scalar_curvature == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(r.nabla_A_max <= 1e-12);
  CHECK(r.riemann_max > 1e-3);  // non-flat
  CHECK(r.gauss_gap_max <= 1e-12);
  CHECK(r.scalar_identity_residual <= 1e-12);
  // frozen values from the closed form: J = 7/6, |T|^2 = 1
  CHECK(r.pick_invariant == doctest::Approx(7.0 / 6.0).epsilon(1e-10));
  CHECK(r.tcheb_norm2 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("non-convex input propagates the failing pivot") {
  ExprPtr f = parse_expression("ln(x1)", 1);
  CHECK_THROWS_AS(report_of(f, 1, {1.0}), NotPositiveDefinite);
}

TEST_CASE("internal oracle sweep on random quartic-perturbed potentials") {
  SplitMix64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 2);
    ExprPtr f = oracles::random_perturbed_potential(n, rng);
    DerivativeTable table(f, n);
    int accepted = 0;
    for (int s = 0; accepted < 10 && s < 100; ++s) {
      std::vector<double> x(static_cast<std::size_t>(n));
      for (double& v : x) v = rng.uniform(-1.0, 1.0);
      Jet4 jet = table.jet(x);
      if (!SpdFactor::try_compute(jet.hess)) continue;
      ++accepted;
      GeometryReport r = geometry_report(jet, x);
      CHECK(r.codazzi_max <= 1e-7 * (1.0 + r.nabla_A_max));
      CHECK(r.gauss_gap_max <= 1e-7 * (1.0 + r.riemann_max));
      CHECK(r.scalar_identity_residual <= 1e-7 * (1.0 + std::fabs(r.scalar_curvature)));
      // full symmetry of nabla A under every slot permutation
      double asym = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
              asym = std::max(asym, std::fabs(r.nabla_A(i, j, k, l) - r.nabla_A(j, i, k, l)));
              asym = std::max(asym, std::fabs(r.nabla_A(i, j, k, l) - r.nabla_A(i, k, j, l)));
              asym = std::max(asym, std::fabs(r.nabla_A(i, j, k, l) - r.nabla_A(i, j, l, k)));
            }
          }
        }
      }
      CHECK(asym <= 1e-12);
    }
    CHECK(accepted == 10);
  }
}

TEST_CASE("verify_function on Q(2,3;4): canonical") {
  ExprPtr f = q_family(std::vector<double>{2.0, 3.0}, 4);
  Box box;
  box.intervals = {{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}};
  VerifyOptions opts;
  opts.samples = 32;
  opts.seed = 0;
  VerificationReport rep = verify_function(f, 4, box, opts);
  CHECK(rep.accepted_samples == 32);
  CHECK(rep.convexity_failures == 0);
  CHECK(rep.verdicts.convex);
  CHECK(rep.verdicts.parallel);
  CHECK(rep.verdicts.flat);
  CHECK(rep.verdicts.codazzi);
  CHECK(rep.verdicts.gauss_consistent);
  CHECK(rep.verdicts.scalar_identity);
  CHECK(rep.nabla_A_max < 1e-8);
  CHECK(rep.riemann_max < 1e-8);
}

TEST_CASE("quartic perturbation: Codazzi holds but the form is not parallel") {
  ExprPtr f = parse_expression("x1^2/2 + x1^4/12 + x2^2/2", 2);
  Box box;
  box.intervals = {{-1.0, 1.0}, {-1.0, 1.0}};
  VerificationReport rep = verify_function(f, 2, box, {});
  CHECK(rep.verdicts.convex);
  CHECK(rep.verdicts.codazzi);
  CHECK(!rep.verdicts.parallel);
}

TEST_CASE("paraboloid verification is exact") {
  ExprPtr f = parse_expression("x1^2/2+x2^2/2", 2);
  Box box;
  box.intervals = {{-1.0, 1.0}, {-1.0, 1.0}};
  VerificationReport rep = verify_function(f, 2, box, {});
  CHECK(rep.verdicts.parallel);
  CHECK(rep.verdicts.flat);
  CHECK(rep.nabla_A_max == 0.0);
  CHECK(rep.riemann_max == 0.0);
  CHECK(rep.codazzi_max == 0.0);
}

TEST_CASE("x1^4 is not strictly convex on [-1,1]") {
  ExprPtr f = parse_expression("x1^4", 1);
  Box box;
  box.intervals = {{-1.0, 1.0}};
  VerificationReport rep = verify_function(f, 1, box, {});
  CHECK(!rep.verdicts.convex);
  CHECK(rep.convexity_failures > 0);
}

TEST_CASE("verification is deterministic for a fixed seed") {
  ExprPtr f = q_family(std::vector<double>{2.0}, 2);
  Box box;
  box.intervals = {{1.0, 2.0}, {-1.0, 1.0}};
  VerifyOptions opts;
  opts.seed = 42;
  VerificationReport a = verify_function(f, 2, box, opts);
  VerificationReport b = verify_function(f, 2, box, opts);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i] == b.points[i]);
  }
  CHECK(a.nabla_A_max == b.nabla_A_max);
}

TEST_CASE("apply_affine with a constant shift keeps the invariants") {
  ExprPtr f = q_family(std::vector<double>{1.0}, 2);
  Matrix id = Matrix::identity(2);
  ExprPtr g = apply_affine(f, id, std::vector<double>{0.0, 0.0}, 5.0);
  GeometryReport rf = report_of(f, 2, {1.3, 0.4});
  GeometryReport rg = report_of(g, 2, {1.3, 0.4});
  CHECK(rg.pick_invariant == doctest::Approx(rf.pick_invariant).epsilon(1e-12));
  CHECK(rg.scalar_curvature == doctest::Approx(rf.scalar_curvature).epsilon(1e-12));
  CHECK(rg.tcheb_norm2 == doctest::Approx(rf.tcheb_norm2).epsilon(1e-12));
  const double pt[2] = {1.3, 0.4};
  CHECK(evaluate(g, pt) == doctest::Approx(evaluate(f, pt) + 5.0));
}

TEST_CASE("apply_affine with diag(2,1) maps invariants to mapped points") {
  ExprPtr f = q_family(std::vector<double>{1.0}, 2);
  Matrix m = Matrix::identity(2);
  m(0, 0) = 2.0;
  ExprPtr g = apply_affine(f, m, {}, 0.0);
  const std::vector<double> x = {1.2, 0.3};
  const std::vector<double> y = {2.4, 0.3};
  GeometryReport rf = report_of(f, 2, x);
  GeometryReport rg = report_of(g, 2, y);
  CHECK(rg.pick_invariant == doctest::Approx(rf.pick_invariant).epsilon(1e-10));
  CHECK(rg.scalar_curvature == doctest::Approx(rf.scalar_curvature).epsilon(1e-10));
  CHECK(rg.tcheb_norm2 == doctest::Approx(rf.tcheb_norm2).epsilon(1e-10));
}

TEST_CASE("apply_affine rejects singular matrices") {
  ExprPtr f = q_family(std::vector<double>{1.0}, 2);
  Matrix m(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  m(1, 1) = 1.0;
  CHECK_THROWS_AS(apply_affine(f, m, {}, 0.0), std::invalid_argument);
}

TEST_CASE("affine invariance sweep over random SA elements") {
  SplitMix64 rng(202);
  CatalogEntry entry = catalog("log-quadric", {});
  DerivativeTable table(entry.expr, entry.arity);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = entry.arity;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        m(i, j) = (i == j ? 1.0 : 0.0) + rng.uniform(-0.2, 0.2);
      }
    }
    std::vector<double> a(static_cast<std::size_t>(n));
    for (double& v : a) v = rng.uniform(-1.0, 1.0);
    const double b = rng.uniform(-1.0, 1.0);
    ExprPtr g = apply_affine(entry.expr, m, a, b);

    std::vector<double> x = {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1),
                             rng.uniform(1.9, 2.1)};
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) y[static_cast<std::size_t>(i)] += m(i, j) * x[static_cast<std::size_t>(j)];
    }
    GeometryReport rf = geometry_report(table.jet(x), x);
    GeometryReport rg = report_of(g, n, y);
    CHECK(std::fabs(rf.pick_invariant - rg.pick_invariant) <=
          1e-8 * (1.0 + std::fabs(rf.pick_invariant)));
    CHECK(std::fabs(rf.scalar_curvature - rg.scalar_curvature) <=
          1e-8 * (1.0 + std::fabs(rf.scalar_curvature)));
    CHECK(std::fabs(rf.tcheb_norm2 - rg.tcheb_norm2) <=
          1e-8 * (1.0 + std::fabs(rf.tcheb_norm2)));
  }
}

TEST_CASE("n=1 potentials: curvature is zero and the report is well formed") {
  ExprPtr f = q_family(std::vector<double>{1.0}, 1);
  GeometryReport r = report_of(f, 1, {2.0});
  CHECK(r.scalar_curvature == doctest::Approx(0.0));
  CHECK(r.riemann_max <= 1e-15);
  CHECK(r.scalar_identity_residual <= 1e-12);
  CHECK(r.pick_invariant == 0.0);
}
