#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "calabi/classify.hpp"
#include "calabi/halton.hpp"
#include "calabi/products.hpp"
#include "oracles.hpp"

using namespace calabi;

namespace {

GeometryReport report_of(const ExprPtr& f, int arity, std::vector<double> x) {
  return geometry_report(jet4(f, arity, x), x);
}

std::vector<double> box_point(const Box& box, SplitMix64& rng) {
  std::vector<double> x(static_cast<std::size_t>(box.dim()));
  for (int d = 0; d < box.dim(); ++d) {
    const auto& iv = box.intervals[static_cast<std::size_t>(d)];
    x[static_cast<std::size_t>(d)] = rng.uniform(iv[0], iv[1]);
  }
  return x;
}

}  // namespace

TEST_CASE("q_family produces the expected tree for c=(1), n=2") {
  ExprPtr e = q_family(std::vector<double>{1.0}, 2);
  CHECK(expr_equal(e, parse_expression("-ln(x1)+x2^2/2", 2)));
  CHECK(to_string(e) == "-ln(x1)+x2^2/2");
}

TEST_CASE("q_family with r = n has no quadratic tail") {
  ExprPtr e = q_family(std::vector<double>{2.0, 3.0}, 2);
  CHECK(expr_equal(e, parse_expression("-2*ln(x1)-3*ln(x2)", 2)));
}

TEST_CASE("q_family rejects bad parameters") {
  CHECK_THROWS_AS(q_family(std::vector<double>{-1.0}, 1), std::domain_error);
  CHECK_THROWS_AS(q_family(std::vector<double>{1.0, 1.0}, 1), std::domain_error);
  CHECK_THROWS_AS(q_family(std::vector<double>{}, 1), std::domain_error);
}

TEST_CASE("join_calabi_factor builds Q(1;2) from the paraboloid line") {
  ExprPtr f2 = parse_expression("x1^2/2", 1);
  ExprPtr joined = join_calabi_factor(f2, 1, 1.0);
  CHECK(expr_equal(joined, q_family(std::vector<double>{1.0}, 2)));
}

TEST_CASE("joining Q(1;2) gives Q(1,1;3) as a function") {
  ExprPtr joined = join_calabi_factor(q_family(std::vector<double>{1.0}, 2), 2, 1.0);
  ExprPtr expected = q_family(std::vector<double>{1.0, 1.0}, 3);
  SplitMix64 rng(9);
  for (int s = 0; s < 20; ++s) {
    const double pt[3] = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0),
                          rng.uniform(-1.0, 1.0)};
    CHECK(evaluate(joined, pt) == doctest::Approx(evaluate(expected, pt)).epsilon(1e-14));
  }
}

TEST_CASE("join_calabi_factor rejects lambda = 0") {
  CHECK_THROWS_AS(join_calabi_factor(parse_expression("x1^2/2", 1), 1, 0.0),
                  std::domain_error);
}

TEST_CASE("catalog rejects unknown names and bad parameters") {
  CHECK_THROWS_AS(catalog("nope", {}), std::invalid_argument);
  CHECK_THROWS_AS(catalog("thm47", {{"n", {3}}, {"R", {0.0}}}), std::domain_error);
  CHECK_THROWS_AS(catalog("thm47", {{"n", {3}}, {"R", {1.0}}}), std::domain_error);
  CHECK_THROWS_AS(catalog("q-family", {{"c", {-1.0}}, {"n", {1}}}), std::domain_error);
  CHECK_THROWS_AS(catalog("log-quadric", {{"lambda", {0.0}}}), std::domain_error);
  CHECK_THROWS_AS(catalog("log-quadric", {{"bogus", {1.0}}}), std::invalid_argument);
}

TEST_CASE("catalog names include the expected entries") {
  auto names = catalog_names();
  for (const char* want : {"log-quadric", "mixed-R6", "thm47", "q-family"}) {
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
  }
}

TEST_CASE("log-quadric entry is convex near (0,0,2)") {
  CatalogEntry e = catalog("log-quadric", {{"lambda", {1.0}}});
  GeometryReport r = report_of(e.expr, e.arity, {0.0, 0.0, 2.0});
  CHECK(r.metric(0, 0) > 0.0);
  SplitMix64 rng(12);
  for (int s = 0; s < 10; ++s) {
    auto x = box_point(e.default_box, rng);
    CHECK_NOTHROW(report_of(e.expr, e.arity, x));
  }
}

TEST_CASE("thm47 with n=3, R=-2 matches log-quadric after swapping x1 and x3") {
  CatalogEntry t = catalog("thm47", {{"n", {3}}, {"R", {-2.0}}});
  CatalogEntry q = catalog("log-quadric", {{"lambda", {1.0}}});
  SplitMix64 rng(13);
  for (int s = 0; s < 20; ++s) {
    const double a = rng.uniform(-0.2, 0.2);
    const double b = rng.uniform(-0.2, 0.2);
    const double c = rng.uniform(1.8, 2.2);
    const double pt_t[3] = {c, b, a};  // cone variable first
    const double pt_q[3] = {a, b, c};  // cone variable last
    CHECK(evaluate(t.expr, pt_t) == doctest::Approx(evaluate(q.expr, pt_q)).epsilon(1e-13));
  }
}

TEST_CASE("every catalog entry passes verification with its documented flags") {
  std::vector<CatalogEntry> entries = {
      catalog("paraboloid", {{"n", {2}}}),
      catalog("q-family", {{"c", {2.0, 3.0}}, {"n", {4}}}),
      catalog("log-linear", {}),
      catalog("log-quadric", {}),
      catalog("log-lorentz-4", {}),
      catalog("mixed-R6", {}),
      catalog("thm47", {{"n", {4}}, {"R", {-3.0}}}),
  };
  for (const auto& e : entries) {
    CAPTURE(e.name);
    VerifyOptions opts;
    opts.samples = 16;
    VerificationReport rep = verify_function(e.expr, e.arity, e.default_box, opts);
    CHECK(rep.verdicts.convex);
    CHECK(rep.verdicts.codazzi);
    CHECK(rep.verdicts.gauss_consistent);
    CHECK(rep.verdicts.scalar_identity);
    CHECK(rep.verdicts.parallel == e.expect_parallel);
    CHECK(rep.verdicts.flat == e.expect_flat);
  }
}

TEST_CASE("product metric block structure of a joined potential") {
  const double lambda = 1.7;
  ExprPtr joined = join_calabi_factor(parse_expression("x1^2/2+exp(x2)", 2), 2, lambda);
  SplitMix64 rng(31);
  for (int s = 0; s < 20; ++s) {
    std::vector<double> x = {rng.uniform(0.5, 3.0), rng.uniform(-1.0, 1.0),
                             rng.uniform(-1.0, 1.0)};
    Jet4 j = jet4(joined, 3, x);
    const double expected = 1.0 / (lambda * lambda * x[0] * x[0]);
    CHECK(std::fabs(j.hess(0, 0) - expected) <= 1e-12 * std::max(1.0, expected));
    CHECK(std::fabs(j.hess(0, 1)) <= 1e-12);
    CHECK(std::fabs(j.hess(0, 2)) <= 1e-12);
  }
}

TEST_CASE("joining preserves parallelism on catalog factors") {
  ExprPtr factor = q_family(std::vector<double>{2.0}, 2);
  ExprPtr joined = join_calabi_factor(factor, 2, 0.8);
  Box box;
  box.intervals = {{0.5, 2.0}, {1.0, 2.0}, {-1.0, 1.0}};
  VerificationReport rep = verify_function(joined, 3, box, {});
  CHECK(rep.verdicts.convex);
  CHECK(rep.verdicts.parallel);
  CHECK(rep.verdicts.flat);

  CatalogEntry lq = catalog("log-quadric", {});
  ExprPtr joined2 = join_calabi_factor(lq.expr, 3, 1.0);
  Box box2;
  box2.intervals = {{0.5, 2.0}, {-0.2, 0.2}, {-0.2, 0.2}, {1.8, 2.2}};
  VerificationReport rep2 = verify_function(joined2, 4, box2, {});
  CHECK(rep2.verdicts.convex);
  CHECK(rep2.verdicts.parallel);
  CHECK(!rep2.verdicts.flat);
}

TEST_CASE("product relations hold for Q(1;2) at (1,0)") {
  ExprPtr f = q_family(std::vector<double>{1.0}, 2);
  GeometryReport r = report_of(f, 2, {1.0, 0.0});
  std::vector<double> t = {1.0, 0.0};
  std::vector<std::vector<double>> d2;
  std::vector<std::vector<double>> d3 = {{0.0, 1.0}};
  ProductCheck pc = product_structure_check(r, t, 1.0, d2, d3, 1e-8);
  CHECK(pc.verdict);
  CHECK(pc.max_residual() <= 1e-12);
}

TEST_CASE("paraboloid admits no product direction") {
  ExprPtr f = parse_expression("x1^2/2+x2^2/2", 2);
  GeometryReport r = report_of(f, 2, {0.0, 0.0});
  std::vector<double> t = {1.0, 0.0};
  std::vector<std::vector<double>> d2;
  std::vector<std::vector<double>> d3 = {{0.0, 1.0}};
  ProductCheck pc = product_structure_check(r, t, 1.0, d2, d3, 1e-8);
  CHECK(!pc.verdict);
  CHECK(pc.res_tt == doctest::Approx(1.0));  // A(T,T) = 0 misses lambda T by lambda
}

TEST_CASE("product_structure_check validates its inputs") {
  ExprPtr f = q_family(std::vector<double>{1.0}, 2);
  GeometryReport r = report_of(f, 2, {1.0, 0.0});
  std::vector<double> bad_t = {2.0, 0.0};  // not G-unit
  std::vector<std::vector<double>> d2;
  std::vector<std::vector<double>> d3 = {{0.0, 1.0}};
  CHECK_THROWS_AS(product_structure_check(r, bad_t, 1.0, d2, d3, 1e-8), std::domain_error);
  std::vector<double> t = {1.0, 0.0};
  std::vector<std::vector<double>> d3_bad = {{1.0, 0.0}};  // parallel to T
  CHECK_THROWS_AS(product_structure_check(r, t, 1.0, d2, d3_bad, 1e-8), std::domain_error);
  std::vector<std::vector<double>> d3_short;
  CHECK_THROWS_AS(product_structure_check(r, t, 1.0, d2, d3_short, 1e-8),
                  std::invalid_argument);
}

TEST_CASE("product frames verify the catalog entries pointwise") {
  SplitMix64 rng(77);
  std::vector<CatalogEntry> entries = {
      catalog("q-family", {{"c", {1.0}}, {"n", {2}}}),
      catalog("q-family", {{"c", {2.0, 3.0}}, {"n", {4}}}),
      catalog("log-linear", {}),
      catalog("log-quadric", {}),
      catalog("log-lorentz-4", {}),
      catalog("mixed-R6", {}),
      catalog("thm47", {{"n", {3}}, {"R", {-2.0}}}),
  };
  for (const auto& e : entries) {
    CAPTURE(e.name);
    REQUIRE(e.product.has_value());
    for (int s = 0; s < 10; ++s) {
      auto x = box_point(e.default_box, rng);
      GeometryReport r = report_of(e.expr, e.arity, x);
      ProductFrame fr = product_frame(*e.product, r);
      ProductCheck pc =
          product_structure_check(r, fr.t, fr.lambda, fr.d2, fr.d3, 1e-8);
      CAPTURE(pc.res_tt);
      CAPTURE(pc.res_tv);
      CAPTURE(pc.res_tw);
      CAPTURE(pc.res_vw);
      CHECK(pc.verdict);
    }
  }
}

TEST_CASE("log-quadric frame matches the product constant") {
  CatalogEntry e = catalog("log-quadric", {});
  GeometryReport r = report_of(e.expr, 3, {0.0, 0.0, 2.0});
  ProductFrame fr = product_frame(*e.product, r);
  CHECK(metric_inner(r.metric, fr.t, fr.t) == doctest::Approx(1.0));
  CHECK(fr.d2.size() == 2);
  CHECK(fr.d3.empty());
  ProductCheck pc = product_structure_check(r, fr.t, 1.0, fr.d2, fr.d3, 1e-8);
  CHECK(pc.verdict);
}
