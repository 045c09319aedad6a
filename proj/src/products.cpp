#include "calabi/products.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace calabi {

namespace {

// -c*ln(x_i) as the leading term of a sum
ExprPtr lead_log(double c, int var) {
  if (c == 1.0) return make_neg(make_ln(make_var(var)));
  return make_mul(make_const(-c), make_ln(make_var(var)));
}

// c*ln(x_i) as a subtracted term
ExprPtr tail_log(double c, int var) {
  if (c == 1.0) return make_ln(make_var(var));
  return make_mul(make_const(c), make_ln(make_var(var)));
}

ExprPtr half_square(int var) {
  return make_div(make_pow(make_var(var), 2), make_const(2.0));
}

double get_param(const std::map<std::string, std::vector<double>>& params,
                 const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->second.size() != 1) {
    throw std::invalid_argument("parameter '" + key + "' must be a single number");
  }
  return it->second[0];
}

void reject_unknown_params(const std::map<std::string, std::vector<double>>& params,
                           std::initializer_list<const char*> known) {
  for (const auto& [key, _] : params) {
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end()) {
      throw std::invalid_argument("unknown parameter '" + key + "'");
    }
  }
}

Box uniform_box(int n, double lo, double hi) {
  Box b;
  b.intervals.assign(static_cast<std::size_t>(n), {lo, hi});
  return b;
}

}  // namespace

ExprPtr q_family(std::span<const double> c, int n) {
  const int r = static_cast<int>(c.size());
  if (r < 1) throw std::domain_error("q_family: at least one log coefficient required");
  if (r > n) throw std::domain_error("q_family: more coefficients than variables");
  for (double ci : c) {
    if (!(ci > 0.0)) throw std::domain_error("q_family: coefficients must be positive");
  }
  ExprPtr acc = lead_log(c[0], 1);
  for (int i = 1; i < r; ++i) {
    acc = make_sub(std::move(acc), tail_log(c[static_cast<std::size_t>(i)], i + 1));
  }
  for (int j = r; j < n; ++j) {
    acc = make_add(std::move(acc), half_square(j + 1));
  }
  return acc;
}

ExprPtr join_calabi_factor(const ExprPtr& f2, int factor_arity, double lambda) {
  if (lambda == 0.0) throw std::domain_error("join_calabi_factor: lambda must be nonzero");
  if (factor_arity < 0) throw std::invalid_argument("join_calabi_factor: bad factor arity");
  if (max_var_index(f2) > factor_arity) {
    throw std::invalid_argument("join_calabi_factor: factor uses undeclared variables");
  }
  std::vector<ExprPtr> shift(static_cast<std::size_t>(factor_arity));
  for (int i = 0; i < factor_arity; ++i) {
    shift[static_cast<std::size_t>(i)] = make_var(i + 2);
  }
  ExprPtr shifted = substitute(f2, shift);
  return make_add(lead_log(1.0 / (lambda * lambda), 1), std::move(shifted));
}

std::vector<std::string> catalog_names() {
  return {"paraboloid", "q-family", "log-linear",   "log-quadric",
          "log-lorentz-4", "mixed-R6", "thm47"};
}

CatalogEntry catalog(const std::string& name,
                     const std::map<std::string, std::vector<double>>& params) {
  CatalogEntry e;
  e.name = name;
  e.params = params;

  if (name == "paraboloid") {
    reject_unknown_params(params, {"n"});
    const int n = static_cast<int>(get_param(params, "n", 2));
    if (n < 1) throw std::domain_error("paraboloid: n must be >= 1");
    ExprPtr acc = half_square(1);
    for (int j = 2; j <= n; ++j) acc = make_add(std::move(acc), half_square(j));
    e.expr = acc;
    e.arity = n;
    e.default_box = uniform_box(n, -1.0, 1.0);
    e.citation = "elliptic paraboloid, the flat Calabi hypersurface with vanishing cubic form";
    e.expect_parallel = true;
    e.expect_flat = true;
    return e;
  }

  if (name == "q-family") {
    reject_unknown_params(params, {"c", "n"});
    std::vector<double> c = {1.0};
    if (auto it = params.find("c"); it != params.end()) c = it->second;
    const int r = static_cast<int>(c.size());
    const int n = static_cast<int>(get_param(params, "n", static_cast<double>(r)));
    e.expr = q_family(c, n);
    e.arity = n;
    Box b = uniform_box(n, -1.0, 1.0);
    for (int i = 0; i < r; ++i) b.intervals[static_cast<std::size_t>(i)] = {1.0, 2.0};
    e.default_box = b;
    e.citation =
        "logarithmic family Q(c_1..c_r;n), an iterated Calabi product of one-dimensional "
        "hyperbolas and a paraboloid";
    e.expect_parallel = true;
    e.expect_flat = true;
    ProductStructure ps;
    ps.kind = ProductStructure::Kind::JoinFirstVar;
    ps.lambda = 1.0 / std::sqrt(c[0]);
    for (int j = 2; j <= n; ++j) ps.d3_vars.push_back(j);
    e.product = ps;
    return e;
  }

  if (name == "log-linear") {
    reject_unknown_params(params, {"alpha", "beta", "gamma", "lambda"});
    const double alpha = get_param(params, "alpha", 1.0);
    const double beta = get_param(params, "beta", 1.0);
    const double gamma = get_param(params, "gamma", 1.0);
    const double lambda = get_param(params, "lambda", 1.0);
    if (!(alpha > 0.0 && beta > 0.0 && gamma > 0.0)) {
      throw std::domain_error("log-linear: alpha, beta, gamma must be positive");
    }
    if (lambda == 0.0) throw std::domain_error("log-linear: lambda must be nonzero");
    const double k = 1.0 / ((alpha + beta + gamma) * lambda * lambda);
    e.expr = q_family(std::vector<double>{k * alpha, k * beta, k * gamma}, 3);
    e.arity = 3;
    e.default_box = uniform_box(3, 1.0, 2.0);
    e.citation =
        "Calabi product of the canonical centroaffine surface y1^a y2^b y3^c = 1 and a point";
    e.expect_parallel = true;
    e.expect_flat = true;
    ProductStructure ps;
    ps.kind = ProductStructure::Kind::RadialCone;
    ps.lambda = lambda;
    ps.cone_vars = {1, 2, 3};
    e.product = ps;
    return e;
  }

  if (name == "log-quadric") {
    reject_unknown_params(params, {"lambda"});
    const double lambda = get_param(params, "lambda", 1.0);
    if (lambda == 0.0) throw std::domain_error("log-quadric: lambda must be nonzero");
    const double k = 1.0 / (2.0 * lambda * lambda);
    ExprPtr u = make_sub(make_pow(make_var(3), 2),
                         make_add(make_pow(make_var(1), 2), make_pow(make_var(2), 2)));
    e.expr = k == 1.0 ? make_neg(make_ln(u)) : make_mul(make_const(-k), make_ln(std::move(u)));
    e.arity = 3;
    e.default_box.intervals = {{-0.2, 0.2}, {-0.2, 0.2}, {1.8, 2.2}};
    e.citation = "Calabi product of the hyperboloid y1^2 + y2^2 - y3^2 = -1 and a point";
    e.expect_parallel = true;
    e.expect_flat = false;
    ProductStructure ps;
    ps.kind = ProductStructure::Kind::RadialCone;
    ps.lambda = lambda;
    ps.cone_vars = {1, 2, 3};
    e.product = ps;
    return e;
  }

  if (name == "log-lorentz-4") {
    reject_unknown_params(params, {"alpha", "beta", "lambda"});
    // default beta > alpha keeps the cone block the strict maximiser of the
    // cubic form; alpha = beta ties it with the x4 log axis
    const double alpha = get_param(params, "alpha", 1.0);
    const double beta = get_param(params, "beta", 2.0);
    const double lambda = get_param(params, "lambda", 1.0);
    if (!(alpha > 0.0 && beta > 0.0)) {
      throw std::domain_error("log-lorentz-4: alpha and beta must be positive");
    }
    if (lambda == 0.0) throw std::domain_error("log-lorentz-4: lambda must be nonzero");
    const double k = 1.0 / ((2.0 * alpha + beta) * lambda * lambda);
    ExprPtr u = make_sub(make_pow(make_var(1), 2),
                         make_add(make_pow(make_var(2), 2), make_pow(make_var(3), 2)));
    ExprPtr acc = lead_log(k * beta, 4);
    acc = make_sub(std::move(acc), k * alpha == 1.0
                                       ? make_ln(u)
                                       : make_mul(make_const(k * alpha), make_ln(u)));
    e.expr = acc;
    e.arity = 4;
    e.default_box.intervals = {{1.8, 2.2}, {-0.2, 0.2}, {-0.2, 0.2}, {1.0, 2.0}};
    e.citation =
        "Calabi product of the centroaffine hypersurface (y1^2-y2^2-y3^2)^a y4^b = 1 and a "
        "point";
    e.expect_parallel = true;
    e.expect_flat = false;
    ProductStructure ps;
    ps.kind = ProductStructure::Kind::RadialCone;
    ps.lambda = lambda;
    ps.cone_vars = {1, 2, 3, 4};
    e.product = ps;
    return e;
  }

  if (name == "mixed-R6") {
    reject_unknown_params(params, {"alpha", "beta", "gamma", "lambda"});
    const double alpha = get_param(params, "alpha", 1.0);
    const double beta = get_param(params, "beta", 1.0);
    const double gamma = get_param(params, "gamma", 1.0);
    const double lambda = get_param(params, "lambda", 1.0);
    if (!(alpha > 0.0 && beta > 0.0 && gamma > 0.0)) {
      throw std::domain_error("mixed-R6: alpha, beta, gamma must be positive");
    }
    if (lambda == 0.0) throw std::domain_error("mixed-R6: lambda must be nonzero");
    const double k = 1.0 / ((alpha + beta + gamma) * lambda * lambda);
    ExprPtr acc = q_family(std::vector<double>{k * alpha, k * beta, k * gamma}, 3);
    acc = make_add(std::move(acc), make_pow(make_var(4), 2));
    acc = make_add(std::move(acc), make_pow(make_var(5), 2));
    e.expr = acc;
    e.arity = 5;
    Box b = uniform_box(5, -1.0, 1.0);
    for (int i = 0; i < 3; ++i) b.intervals[static_cast<std::size_t>(i)] = {1.0, 2.0};
    e.default_box = b;
    e.citation =
        "Calabi product of the surface y1^a y2^b y3^c = 1 and an elliptic paraboloid";
    e.expect_parallel = true;
    e.expect_flat = true;
    ProductStructure ps;
    ps.kind = ProductStructure::Kind::RadialCone;
    ps.lambda = lambda;
    ps.cone_vars = {1, 2, 3};
    ps.d3_vars = {4, 5};
    e.product = ps;
    return e;
  }

  if (name == "thm47") {
    reject_unknown_params(params, {"n", "R"});
    const int n = static_cast<int>(get_param(params, "n", 3));
    const double R = get_param(params, "R", -2.0);
    if (n < 3) throw std::domain_error("thm47: n must be >= 3");
    if (!(R < 0.0)) throw std::domain_error("thm47: scalar curvature R must be negative");
    const double coef = static_cast<double>(n - 1) * (n - 2) / (2.0 * R);
    ExprPtr u = make_pow(make_var(1), 2);
    ExprPtr rest = make_pow(make_var(2), 2);
    for (int i = 3; i <= n; ++i) {
      rest = make_add(std::move(rest), make_pow(make_var(i), 2));
    }
    u = make_sub(std::move(u), std::move(rest));
    e.expr = coef == -1.0 ? make_neg(make_ln(u)) : make_mul(make_const(coef), make_ln(u));
    e.arity = n;
    Box b = uniform_box(n, -0.2, 0.2);
    b.intervals[0] = {1.8, 2.2};
    e.default_box = b;
    e.citation =
        "Lorentz-cone logarithmic hypersurface with prescribed negative scalar curvature";
    e.expect_parallel = true;
    e.expect_flat = false;
    ProductStructure ps;
    ps.kind = ProductStructure::Kind::RadialCone;
    ps.lambda = std::sqrt(-R / (static_cast<double>(n - 1) * (n - 2)));
    for (int i = 1; i <= n; ++i) ps.cone_vars.push_back(i);
    e.product = ps;
    return e;
  }

  throw std::invalid_argument("unknown catalog entry '" + name + "'");
}

namespace {

// modified Gram-Schmidt with the metric inner product; near-dependent
// vectors are dropped
std::vector<std::vector<double>> g_orthonormalize(
    const SymTensor& g, const std::vector<std::vector<double>>& vs,
    const std::vector<std::vector<double>>& against) {
  std::vector<std::vector<double>> out;
  for (const auto& v0 : vs) {
    std::vector<double> v = v0;
    for (const auto& w : against) {
      const double c = metric_inner(g, v, w);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * w[i];
    }
    for (const auto& w : out) {
      const double c = metric_inner(g, v, w);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * w[i];
    }
    const double nrm2 = metric_inner(g, v, v);
    if (nrm2 > 1e-16) {
      const double inv = 1.0 / std::sqrt(nrm2);
      for (double& x : v) x *= inv;
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace

ProductFrame product_frame(const ProductStructure& ps, const GeometryReport& report) {
  const int n = report.dim();
  if (static_cast<int>(report.point.size()) != n) {
    throw std::invalid_argument("product_frame: report carries no base point");
  }
  ProductFrame fr;
  fr.lambda = ps.lambda;
  fr.t.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<int> cone;
  if (ps.kind == ProductStructure::Kind::JoinFirstVar) {
    cone = {1};
  } else {
    cone = ps.cone_vars;
  }
  for (int var : cone) {
    fr.t[static_cast<std::size_t>(var - 1)] =
        ps.lambda * report.point[static_cast<std::size_t>(var - 1)];
  }

  std::vector<std::vector<double>> cone_dirs;
  for (int var : cone) {
    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    d[static_cast<std::size_t>(var - 1)] = 1.0;
    cone_dirs.push_back(std::move(d));
  }
  std::vector<std::vector<double>> tspan = {fr.t};
  // normalise t against rounding before projecting
  {
    const double nrm2 = metric_inner(report.metric, tspan[0], tspan[0]);
    if (!(nrm2 > 1e-16)) {
      throw std::domain_error("product_frame: degenerate product direction at this point");
    }
    const double inv = 1.0 / std::sqrt(nrm2);
    for (double& x : tspan[0]) x *= inv;
  }
  fr.d2 = g_orthonormalize(report.metric, cone_dirs, tspan);

  std::vector<int> d3 = ps.d3_vars;
  if (ps.kind == ProductStructure::Kind::JoinFirstVar && d3.empty()) {
    for (int j = 2; j <= n; ++j) d3.push_back(j);
  }
  std::vector<std::vector<double>> d3_dirs;
  for (int var : d3) {
    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    d[static_cast<std::size_t>(var - 1)] = 1.0;
    d3_dirs.push_back(std::move(d));
  }
  fr.d3 = g_orthonormalize(report.metric, d3_dirs, tspan);
  return fr;
}

double ProductCheck::max_residual() const {
  return std::max(std::max(res_tt, res_tv), std::max(res_tw, res_vw));
}

ProductCheck product_structure_check(const GeometryReport& report,
                                     std::span<const double> t_dir, double lambda,
                                     const std::vector<std::vector<double>>& d2,
                                     const std::vector<std::vector<double>>& d3,
                                     double tol) {
  const int n = report.dim();
  if (static_cast<int>(t_dir.size()) != n) {
    throw std::invalid_argument("product_structure_check: wrong T length");
  }
  const double tnorm = metric_inner(report.metric, t_dir, t_dir);
  if (std::fabs(tnorm - 1.0) > 1e-10) {
    throw std::domain_error("product_structure_check: T is not a G-unit vector");
  }
  if (1 + static_cast<int>(d2.size()) + static_cast<int>(d3.size()) != n) {
    throw std::invalid_argument(
        "product_structure_check: split does not span the T-orthogonal complement");
  }
  auto check_orth = [&](const std::vector<double>& v) {
    if (std::fabs(metric_inner(report.metric, t_dir, v)) > 1e-8) {
      throw std::domain_error("product_structure_check: split vector not orthogonal to T");
    }
  };
  std::vector<std::vector<double>> d2n, d3n;
  for (const auto& v : d2) {
    check_orth(v);
    std::vector<double> u = v;
    const double inv = 1.0 / std::sqrt(metric_inner(report.metric, u, u));
    for (double& x : u) x *= inv;
    d2n.push_back(std::move(u));
  }
  for (const auto& v : d3) {
    check_orth(v);
    std::vector<double> u = v;
    const double inv = 1.0 / std::sqrt(metric_inner(report.metric, u, u));
    for (double& x : u) x *= inv;
    d3n.push_back(std::move(u));
  }

  ProductCheck out;
  out.lambda = lambda;
  out.tol = tol;

  auto max_diff = [&](const std::vector<double>& got, const std::vector<double>& want) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
      m = std::max(m, std::fabs(got[static_cast<std::size_t>(i)] -
                                want[static_cast<std::size_t>(i)]));
    }
    return m;
  };
  const std::vector<double> tvec(t_dir.begin(), t_dir.end());

  std::vector<double> att = cubic_action(report.metric_inv, report.fubini_pick, tvec, tvec);
  std::vector<double> want(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) want[static_cast<std::size_t>(i)] = lambda * tvec[static_cast<std::size_t>(i)];
  out.res_tt = max_diff(att, want);

  for (const auto& v : d2n) {
    std::vector<double> atv = cubic_action(report.metric_inv, report.fubini_pick, tvec, v);
    for (int i = 0; i < n; ++i) want[static_cast<std::size_t>(i)] = lambda * v[static_cast<std::size_t>(i)];
    out.res_tv = std::max(out.res_tv, max_diff(atv, want));
  }
  std::fill(want.begin(), want.end(), 0.0);
  for (const auto& w : d3n) {
    std::vector<double> atw = cubic_action(report.metric_inv, report.fubini_pick, tvec, w);
    out.res_tw = std::max(out.res_tw, max_diff(atw, want));
  }
  for (const auto& v : d2n) {
    for (const auto& w : d3n) {
      std::vector<double> avw = cubic_action(report.metric_inv, report.fubini_pick, v, w);
      out.res_vw = std::max(out.res_vw, max_diff(avw, want));
    }
  }
  out.verdict = out.max_residual() <= tol;
  return out;
}

}  // namespace calabi
