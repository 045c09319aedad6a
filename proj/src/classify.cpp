#include "calabi/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "calabi/halton.hpp"

namespace calabi {

namespace {

// cubic form with all three slots pushed through the column basis B:
// out_abc = sum A_ijk B_ia B_jb B_kc
SymTensor transform_cubic(const SymTensor& cubic, const Matrix& basis) {
  const int n = cubic.dim();
  const int m = basis.cols;
  DenseTensor t1(n, 3);  // [a][j][k] with a < m
  for (int a = 0; a < m; ++a) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += basis(i, a) * cubic(i, j, k);
        t1(a, j, k) = s;
        t1(a, k, j) = s;
      }
    }
  }
  DenseTensor t2(n, 3);  // [a][b][k]
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += basis(j, b) * t1(a, j, k);
        t2(a, b, k) = s;
      }
    }
  }
  SymTensor out(m, 3);
  out.for_each_canonical([&](std::span<const int> idx, int) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += basis(k, idx[2]) * t2(idx[0], idx[1], k);
    out.set(idx, s);
  });
  return out;
}

double cubic_value(const SymTensor& cubic, std::span<const double> u) {
  double s = 0.0;
  cubic.for_each_canonical([&](std::span<const int> idx, int mult) {
    double term = cubic.get(idx);
    for (int t = 0; t < 3; ++t) term *= u[static_cast<std::size_t>(idx[t])];
    s += mult * term;
  });
  return s;
}

// w_a = sum_bc A_abc u_b u_c
std::vector<double> cubic_gradient(const SymTensor& cubic, std::span<const double> u) {
  const int n = cubic.dim();
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  for (int a = 0; a < n; ++a) {
    double s = 0.0;
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        s += cubic(a, b, c) * u[static_cast<std::size_t>(b)] * u[static_cast<std::size_t>(c)];
      }
    }
    w[static_cast<std::size_t>(a)] = s;
  }
  return w;
}

void normalize(std::vector<double>& v) {
  double nrm = 0.0;
  for (double x : v) nrm += x * x;
  nrm = std::sqrt(nrm);
  if (nrm > 0.0) {
    for (double& x : v) x /= nrm;
  }
}

bool lex_greater(std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

}  // namespace

CubicMaxResult cubic_max(const SymTensor& metric, const SymTensor& cubic,
                         const CubicMaxOptions& opts) {
  const int n = metric.dim();
  if (cubic.dim() != n || cubic.order() != 3 || metric.order() != 2) {
    throw std::invalid_argument("cubic_max: order-2 metric and order-3 cubic required");
  }
  SpdFactor chol = SpdFactor::compute(metric);

  // change of variables u = L^T v turns the G-sphere into the unit sphere
  Matrix linv_t(n, n);
  {
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (int a = 0; a < n; ++a) {
      std::fill(e.begin(), e.end(), 0.0);
      e[static_cast<std::size_t>(a)] = 1.0;
      std::vector<double> col = chol.from_euclidean(e);
      for (int i = 0; i < n; ++i) linv_t(i, a) = col[static_cast<std::size_t>(i)];
    }
  }
  SymTensor at = transform_cubic(cubic, linv_t);
  const double shift = 1.0 + at.max_abs();

  std::vector<std::vector<double>> starts;
  for (int a = 0; a < n; ++a) {
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(a)] = 1.0;
    starts.push_back(e);
  }
  for (int r = 0; r < opts.restarts; ++r) {
    starts.push_back(halton_sphere_point(static_cast<std::uint64_t>(r + 1), n));
  }
  SplitMix64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + 1);
  for (int r = 0; r < 8; ++r) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = rng.gaussian();
    normalize(v);
    starts.push_back(std::move(v));
  }

  double best_f = -std::numeric_limits<double>::infinity();
  std::vector<double> best_v;
  for (auto& u : starts) {
    if (cubic_value(at, u) < 0.0) {
      for (double& x : u) x = -x;
    }
    double f = cubic_value(at, u);
    for (int it = 0; it < opts.max_iters; ++it) {
      std::vector<double> w = cubic_gradient(at, u);
      for (int a = 0; a < n; ++a) w[static_cast<std::size_t>(a)] += shift * u[static_cast<std::size_t>(a)];
      normalize(w);
      // stop on iterate movement: the value stagnates quadratically near a
      // maximum long before the direction has converged
      double du = 0.0;
      for (int a = 0; a < n; ++a) {
        du = std::max(du, std::fabs(w[static_cast<std::size_t>(a)] - u[static_cast<std::size_t>(a)]));
      }
      u = std::move(w);
      f = cubic_value(at, u);
      if (du <= opts.tol) break;
    }
    if (f < 0.0) {
      for (double& x : u) x = -x;
      f = -f;
    }
    std::vector<double> v = chol.from_euclidean(u);
    if (best_v.empty()) {
      best_f = f;
      best_v = std::move(v);
      continue;
    }
    const double tie = 1e-12 * std::max(1.0, std::fabs(best_f));
    if (f > best_f + tie ||
        (std::fabs(f - best_f) <= tie && lex_greater(v, best_v))) {
      best_f = f;
      best_v = std::move(v);
    }
  }

  CubicMaxResult out;
  out.direction = best_v;
  // report the value in original coordinates
  out.mu1 = std::max(0.0, cubic_value(cubic, out.direction));
  return out;
}

std::string TypicalBasis::case_label() const {
  if (case_m < 0) return "unclassified";
  return "C_" + std::to_string(case_m);
}

TypicalBasis typical_basis(const SymTensor& metric, const SymTensor& cubic,
                           std::span<const double> e1, double mu1,
                           double cluster_tol) {
  const int n = metric.dim();
  SpdFactor chol = SpdFactor::compute(metric);
  TypicalBasis out;
  out.mu1 = mu1;

  std::vector<double> u1 = chol.to_euclidean(e1);
  normalize(u1);

  // operator v -> A_{e1} v in the Euclidean frame
  Matrix linv_t(n, n);
  {
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (int a = 0; a < n; ++a) {
      std::fill(e.begin(), e.end(), 0.0);
      e[static_cast<std::size_t>(a)] = 1.0;
      std::vector<double> col = chol.from_euclidean(e);
      for (int i = 0; i < n; ++i) linv_t(i, a) = col[static_cast<std::size_t>(i)];
    }
  }
  SymTensor at = transform_cubic(cubic, linv_t);
  Matrix b(n, n);
  for (int a = 0; a < n; ++a) {
    for (int c = a; c < n; ++c) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += at(a, c, k) * u1[static_cast<std::size_t>(k)];
      b(a, c) = s;
      b(c, a) = s;
    }
  }

  out.frame.push_back(chol.from_euclidean(u1));
  out.mu.push_back(mu1);
  if (n > 1) {
    Matrix q = orthonormal_complement(u1);
    Matrix s(n - 1, n - 1);
    for (int a = 0; a < n - 1; ++a) {
      for (int c = a; c < n - 1; ++c) {
        double v = 0.0;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) v += q(i, a) * b(i, j) * q(j, c);
        }
        s(a, c) = v;
        s(c, a) = v;
      }
    }
    std::vector<double> vals;
    Matrix vecs;
    jacobi_eigen_sym(s, vals, vecs);
    for (int c = 0; c < n - 1; ++c) {
      std::vector<double> u(static_cast<std::size_t>(n), 0.0);
      for (int i = 0; i < n; ++i) {
        double x = 0.0;
        for (int a = 0; a < n - 1; ++a) x += q(i, a) * vecs(a, c);
        u[static_cast<std::size_t>(i)] = x;
      }
      out.frame.push_back(chol.from_euclidean(u));
      out.mu.push_back(vals[static_cast<std::size_t>(c)]);
    }
  }

  // cluster the spectrum as {mu1/2, 0} to produce the case index
  const double eta = cluster_tol * std::max(1.0, mu1);
  if (mu1 <= eta) {
    bool all_zero = true;
    for (int i = 1; i < n; ++i) {
      if (std::fabs(out.mu[static_cast<std::size_t>(i)]) > eta) all_zero = false;
    }
    out.case_m = all_zero ? 0 : -1;
    return out;
  }
  int halves = 0;
  bool clean = true;
  bool seen_zero_before_half = false;
  for (int i = 1; i < n; ++i) {
    const double v = out.mu[static_cast<std::size_t>(i)];
    if (std::fabs(v - 0.5 * mu1) <= eta) {
      if (seen_zero_before_half) clean = false;
      ++halves;
    } else if (std::fabs(v) <= eta) {
      seen_zero_before_half = true;
    } else {
      clean = false;
    }
  }
  out.case_m = clean ? 1 + halves : -1;
  return out;
}

namespace {

// frame vectors satisfying the product eigen-relations; the distinguished
// direction of a product need not be the cubic-form maximiser, so every
// qualifying frame vector is reported
std::vector<std::pair<int, double>> scan_product_candidates(const SymTensor& ahat,
                                                            double scale) {
  const int n = ahat.dim();
  std::vector<std::pair<int, double>> out;
  const double tol = 1e-8 * (1.0 + scale);
  for (int i = 0; i < n; ++i) {
    const double lambda = ahat(i, i, i);
    if (std::fabs(lambda) <= tol) continue;
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      // the vector A(e_i, e_j) must equal lambda e_j or vanish
      const double diag = ahat(i, j, j);
      const bool want_lambda = j == i || std::fabs(diag - lambda) <= tol;
      const bool want_zero = std::fabs(diag) <= tol;
      if (!want_lambda && !want_zero) {
        ok = false;
        break;
      }
      const double target = want_lambda ? lambda : 0.0;
      for (int k = 0; k < n && ok; ++k) {
        const double expect = k == j ? target : 0.0;
        if (std::fabs(ahat(i, j, k) - expect) > tol) ok = false;
      }
    }
    if (ok) out.emplace_back(i, lambda);
  }
  return out;
}

}  // namespace

DecompositionProfile build_profile(const SymTensor& metric, const SymTensor& cubic,
                                   const TypicalBasis& basis) {
  const int n = metric.dim();
  DecompositionProfile out;
  out.mu1 = basis.mu1;
  out.tau = basis.mu1 * basis.mu1 / 8.0;
  out.m = basis.case_m;

  if (!basis.classified()) {
    out.trivial = true;
    out.min_ambient_dim = n;
    return out;
  }

  // cubic form in the typical frame; the frame is G-orthonormal so indices
  // raise and lower trivially
  Matrix frame(n, n);
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < n; ++i) frame(i, c) = basis.frame[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
  }
  SymTensor ahat = transform_cubic(cubic, frame);
  out.product_candidates = scan_product_candidates(ahat, basis.mu1);

  const int m = basis.case_m;
  if (m <= 1 || m >= n) {
    // C_0, C_1 and C_n carry no D2 structure
    out.trivial = true;
    out.min_ambient_dim = n;
    return out;
  }
  out.trivial = false;
  for (int i = 1; i < m; ++i) out.d2_slots.push_back(i);
  for (int i = m; i < n; ++i) out.d3_slots.push_back(i);
  const int d2 = m - 1;
  const int d3 = n - m;
  const double mu1 = basis.mu1;
  const double tau = out.tau;
  const double quarter = 0.25 * mu1 * mu1;

  // L(v_a, v_b) = A_{v_a} v_b - 1/2 mu1 delta_ab e1; store D3 coords and
  // track how far the D1/D2 components deviate from that form
  out.l_table.assign(static_cast<std::size_t>(d2),
                     std::vector<std::vector<double>>(
                         static_cast<std::size_t>(d2),
                         std::vector<double>(static_cast<std::size_t>(d3), 0.0)));
  double range_res = 0.0;
  for (int a = 0; a < d2; ++a) {
    for (int b = 0; b < d2; ++b) {
      const int fa = 1 + a, fb = 1 + b;
      const double d1_part = ahat(fa, fb, 0) - (a == b ? 0.5 * mu1 : 0.0);
      range_res = std::max(range_res, std::fabs(d1_part));
      for (int c = 0; c < d2; ++c) {
        range_res = std::max(range_res, std::fabs(ahat(fa, fb, 1 + c)));
      }
      for (int c = 0; c < d3; ++c) {
        out.l_table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]
                   [static_cast<std::size_t>(c)] = ahat(fa, fb, m + c);
      }
    }
  }
  out.l_range_residual = range_res;

  auto l_dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (int c = 0; c < d3; ++c) s += x[static_cast<std::size_t>(c)] * y[static_cast<std::size_t>(c)];
    return s;
  };
  // probe directions: the D2 frame plus normalised pair mixtures, so the
  // quadratic isotropy relation is exercised off the diagonal too
  std::vector<std::vector<double>> probes;
  for (int a = 0; a < d2; ++a) {
    std::vector<double> v(static_cast<std::size_t>(d2), 0.0);
    v[static_cast<std::size_t>(a)] = 1.0;
    probes.push_back(std::move(v));
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < d2; ++a) {
    for (int b = a + 1; b < d2; ++b) {
      std::vector<double> v(static_cast<std::size_t>(d2), 0.0);
      v[static_cast<std::size_t>(a)] = inv_sqrt2;
      v[static_cast<std::size_t>(b)] = inv_sqrt2;
      probes.push_back(std::move(v));
      std::vector<double> w(static_cast<std::size_t>(d2), 0.0);
      w[static_cast<std::size_t>(a)] = inv_sqrt2;
      w[static_cast<std::size_t>(b)] = -inv_sqrt2;
      probes.push_back(std::move(w));
    }
  }

  // P_v on the D2 frame for v a D2 coordinate of the working subspace.
  // P coefficients: (P_v)_bc = <L(v, u_b), L(v, u_c)> over the D3 block.
  auto l_of = [&](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> r(static_cast<std::size_t>(d3), 0.0);
    for (int a = 0; a < d2; ++a) {
      for (int b = 0; b < d2; ++b) {
        const double w = x[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(b)];
        if (w == 0.0) continue;
        const auto& lab = out.l_table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        for (int c = 0; c < d3; ++c) r[static_cast<std::size_t>(c)] += w * lab[static_cast<std::size_t>(c)];
      }
    }
    return r;
  };
  auto pv_matrix = [&](const std::vector<double>& v) {
    Matrix p(d2, d2);
    std::vector<std::vector<double>> lv(static_cast<std::size_t>(d2));
    std::vector<double> unit(static_cast<std::size_t>(d2), 0.0);
    for (int b = 0; b < d2; ++b) {
      std::fill(unit.begin(), unit.end(), 0.0);
      unit[static_cast<std::size_t>(b)] = 1.0;
      lv[static_cast<std::size_t>(b)] = l_of(v, unit);
    }
    for (int b = 0; b < d2; ++b) {
      for (int c = b; c < d2; ++c) {
        const double s = l_dot(lv[static_cast<std::size_t>(b)], lv[static_cast<std::size_t>(c)]);
        p(b, c) = s;
        p(c, b) = s;
      }
    }
    return p;
  };

  const double spec_tol = 1e-6 * std::max(mu1 * mu1, 1e-30);
  double spec_res = 0.0;
  auto spectrum_distance = [&](const std::vector<double>& vals) {
    double worst = 0.0;
    for (double v : vals) {
      const double d = std::min({std::fabs(v - quarter), std::fabs(v - tau), std::fabs(v)});
      worst = std::max(worst, d);
    }
    return worst;
  };
  double iso_res = 0.0;
  for (const auto& v : probes) {
    const auto lvv = l_of(v, v);
    iso_res = std::max(iso_res, std::fabs(l_dot(lvv, lvv) - quarter));
    Matrix p = pv_matrix(v);
    std::vector<double> vals;
    Matrix vecs;
    jacobi_eigen_sym(p, vals, vecs);
    spec_res = std::max(spec_res, spectrum_distance(vals));
  }
  out.isotropy_residual = iso_res;
  out.pv_spectrum_residual = spec_res;
  if (spec_res > spec_tol) {
    out.inconsistent = true;
    out.min_ambient_dim = n;
    return out;
  }

  // greedy chain of eigen splits: working space W within D2, each step
  // removes {v} + V_v(0) and continues in V_v(tau)
  std::vector<std::vector<double>> w_basis;  // columns spanning W, D2 coords
  {
    std::vector<double> e(static_cast<std::size_t>(d2), 0.0);
    for (int a = 0; a < d2; ++a) {
      std::fill(e.begin(), e.end(), 0.0);
      e[static_cast<std::size_t>(a)] = 1.0;
      w_basis.push_back(e);
    }
  }
  int k0 = 0;
  int p_dim = -1;
  bool consistent = true;
  while (!w_basis.empty()) {
    // v = first working basis vector (deterministic choice)
    std::vector<double> v = w_basis[0];
    out.chain.push_back(v);
    ++k0;
    Matrix p = pv_matrix(v);
    const int wd = static_cast<int>(w_basis.size());
    // restrict P_v to W
    Matrix pr(wd, wd);
    for (int x = 0; x < wd; ++x) {
      std::vector<double> px(static_cast<std::size_t>(d2), 0.0);
      for (int i = 0; i < d2; ++i) {
        double s = 0.0;
        for (int j = 0; j < d2; ++j) s += p(i, j) * w_basis[static_cast<std::size_t>(x)][static_cast<std::size_t>(j)];
        px[static_cast<std::size_t>(i)] = s;
      }
      for (int y = 0; y < wd; ++y) {
        double s = 0.0;
        for (int i = 0; i < d2; ++i) s += w_basis[static_cast<std::size_t>(y)][static_cast<std::size_t>(i)] * px[static_cast<std::size_t>(i)];
        pr(y, x) = s;
      }
    }
    std::vector<double> vals;
    Matrix vecs;
    jacobi_eigen_sym(pr, vals, vecs);
    int zero_dim = 0;
    int quarter_count = 0;
    std::vector<std::vector<double>> tau_space;
    for (int c = 0; c < wd; ++c) {
      const double val = vals[static_cast<std::size_t>(c)];
      std::vector<double> dir(static_cast<std::size_t>(d2), 0.0);
      for (int i = 0; i < d2; ++i) {
        double s = 0.0;
        for (int x = 0; x < wd; ++x) s += w_basis[static_cast<std::size_t>(x)][static_cast<std::size_t>(i)] * vecs(x, c);
        dir[static_cast<std::size_t>(i)] = s;
      }
      if (std::fabs(val - quarter) <= spec_tol) {
        ++quarter_count;  // the direction of v itself, exactly once
        continue;
      }
      if (std::fabs(val - tau) <= spec_tol && tau > spec_tol) {
        tau_space.push_back(std::move(dir));
      } else if (std::fabs(val) <= spec_tol) {
        ++zero_dim;
      } else {
        consistent = false;
      }
    }
    if (quarter_count != 1) consistent = false;
    if (p_dim < 0) {
      p_dim = zero_dim;
    } else if (p_dim != zero_dim) {
      consistent = false;
    }
    if (!consistent) break;
    w_basis = std::move(tau_space);
  }
  out.k0 = k0;
  out.p = std::max(p_dim, 0);
  if (!consistent || k0 * (1 + out.p) != d2) {
    out.inconsistent = true;
    out.min_ambient_dim = n;
    return out;
  }

  // rank of the stacked L table by Gram-matrix eigenvalues
  {
    Matrix gram(d3, d3);
    for (int a = 0; a < d2; ++a) {
      for (int b = 0; b < d2; ++b) {
        const auto& lab = out.l_table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        for (int x = 0; x < d3; ++x) {
          for (int y = 0; y < d3; ++y) {
            gram(x, y) += lab[static_cast<std::size_t>(x)] * lab[static_cast<std::size_t>(y)];
          }
        }
      }
    }
    std::vector<double> vals;
    Matrix vecs;
    jacobi_eigen_sym(gram, vals, vecs);
    const double sv_tol = 1e-8 * std::max(mu1 * mu1, 1e-30);
    int rank = 0;
    for (double v : vals) {
      if (v > 0.0 && std::sqrt(v) > sv_tol) ++rank;
    }
    out.dim_im_l = rank;
  }

  if (out.k0 >= 2 && (out.p == 0 || out.p == 1 || out.p == 3 || out.p == 7)) {
    out.min_ambient_dim = min_dim(m, out.k0, out.p);
  } else {
    // no theorem bound applies; m <= n-1 forces at least m+1
    out.min_ambient_dim = m + 1;
  }
  return out;
}

int min_dim(int m, int k0, int p) {
  if (p != 0 && p != 1 && p != 3 && p != 7) {
    throw std::invalid_argument("min_dim: p must be one of 0, 1, 3, 7");
  }
  if (k0 < 2) throw std::invalid_argument("min_dim: k0 must be >= 2");
  if (m - 1 != k0 * (1 + p)) {
    throw std::invalid_argument("min_dim: m - 1 must equal k0 * (1 + p)");
  }
  if (p == 7 && m != 17) {
    throw std::invalid_argument("min_dim: p = 7 requires m = 17");
  }
  switch (p) {
    case 0:
      return m * (m + 1) / 2;
    case 1:
      return (m + 1) * (m + 1) / 4;
    case 3:
      return (m + 1) * (m + 3) / 8;
    default:
      return 27;
  }
}

const OctonionTable& octonion_table() {
  // signed targets; row = left factor, column = right factor, 0 = -id
  static const int raw[7][7] = {
      {0, 3, -2, 5, -4, -7, 6},
      {-3, 0, 1, 6, 7, -4, -5},
      {2, -1, 0, 7, -6, 5, -4},
      {-5, -6, -7, 0, 1, 2, 3},
      {4, -7, 6, -1, 0, -3, 2},
      {7, 4, -5, -2, 3, 0, -1},
      {-6, 5, 4, -3, -2, 1, 0},
  };
  static const OctonionTable table = [] {
    OctonionTable t{};
    for (int j = 0; j < 7; ++j) {
      for (int l = 0; l < 7; ++l) {
        const int v = raw[j][l];
        if (v == 0) {
          t[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] = {-1, 0};
        } else {
          t[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] = {v > 0 ? 1 : -1,
                                                                         std::abs(v)};
        }
      }
    }
    return t;
  }();
  return table;
}

std::string branch_label(Branch b) {
  switch (b) {
    case Branch::I:
      return "i";
    case Branch::II:
      return "ii";
    case Branch::III:
      return "iii";
    case Branch::IV:
      return "iv";
    case Branch::Unclassified:
      return "unclassified";
    case Branch::Inconsistent:
      return "inconsistent";
    case Branch::Impossible:
      return "impossible";
  }
  return "unclassified";
}

Branch classify_point(const TypicalBasis& basis, const DecompositionProfile& profile) {
  if (!basis.classified()) return Branch::Unclassified;
  if (profile.inconsistent) return Branch::Inconsistent;
  const int n = static_cast<int>(basis.frame.size());
  const int m = basis.case_m;
  if (m == 0) return Branch::I;
  if (m == 1) return Branch::III;
  if (m == n) return Branch::Impossible;  // this case cannot occur for parallel forms
  if (m == n - 1) return Branch::II;
  // 2 <= m <= n-2: full image means product with a point, otherwise a
  // genuine two-factor product
  return profile.dim_im_l == static_cast<int>(profile.d3_slots.size()) ? Branch::II
                                                                       : Branch::IV;
}

PointAnalysis analyze_point(const Jet4& jet, std::span<const double> point,
                            const CubicMaxOptions& opts) {
  PointAnalysis out{GeometryReport(jet.n), TypicalBasis{}, DecompositionProfile{},
                    Branch::Unclassified};
  out.geometry = geometry_report(jet, point);
  CubicMaxResult cm = cubic_max(out.geometry.metric, out.geometry.fubini_pick, opts);
  out.basis = typical_basis(out.geometry.metric, out.geometry.fubini_pick, cm.direction,
                            cm.mu1);
  out.profile = build_profile(out.geometry.metric, out.geometry.fubini_pick, out.basis);
  out.branch = classify_point(out.basis, out.profile);
  return out;
}

}  // namespace calabi
