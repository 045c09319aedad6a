#include "calabi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "calabi/halton.hpp"

namespace calabi {

GeometryReport geometry_report(const Jet4& jet) {
  return geometry_report(jet, std::span<const double>());
}

GeometryReport geometry_report(const Jet4& jet, std::span<const double> point) {
  const int n = jet.n;
  GeometryReport r(n);
  r.point.assign(point.begin(), point.end());

  r.metric = jet.hess;
  SpdFactor chol = SpdFactor::compute(r.metric);
  r.metric_inv = chol.inverse();
  r.metric_logdet = chol.log_det();

  const SymTensor& g = r.metric;
  const SymTensor& gi = r.metric_inv;

  // A_ijk = -1/2 f_ijk, dA_ijkl = -1/2 f_ijkl
  r.fubini_pick.for_each_canonical([&](std::span<const int> idx, int) {
    r.fubini_pick.set(idx, -0.5 * jet.third.get(idx));
  });
  r.dA_raw.for_each_canonical([&](std::span<const int> idx, int) {
    r.dA_raw.set(idx, -0.5 * jet.fourth.get(idx));
  });

  // Gamma^k_ij = 1/2 sum_l f^{kl} f_ijl;  A^k_ij = -Gamma^k_ij
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += gi(k, l) * jet.third(i, j, l);
        r.christoffel(k, i, j) = 0.5 * s;
        r.christoffel(k, j, i) = 0.5 * s;
        r.fubini_pick_mixed(k, i, j) = -0.5 * s;
        r.fubini_pick_mixed(k, j, i) = -0.5 * s;
      }
    }
  }

  // nabla_A[i][j][k][l] = dA_ijkl - sum_m Gamma^m_li A_mjk + (j,k slots alike)
  double namax = 0.0, codmax = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double s = r.dA_raw(i, j, k, l);
          for (int m = 0; m < n; ++m) {
            s -= r.christoffel(m, l, i) * r.fubini_pick(m, j, k);
            s -= r.christoffel(m, l, j) * r.fubini_pick(i, m, k);
            s -= r.christoffel(m, l, k) * r.fubini_pick(i, j, m);
          }
          r.nabla_A(i, j, k, l) = s;
          namax = std::max(namax, std::fabs(s));
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          codmax = std::max(codmax,
                            std::fabs(r.nabla_A(i, j, k, l) - r.nabla_A(i, j, l, k)));
        }
      }
    }
  }
  r.nabla_A_max = namax;
  r.codazzi_max = codmax;

  // Gauss route: R_ijkl = sum_{mh} f^{mh} (A_jkm A_hil - A_ikm A_hjl)
  const SymTensor& A = r.fubini_pick;
  double rmax = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) {
            for (int h = 0; h < n; ++h) {
              s += gi(m, h) * (A(j, k, m) * A(h, i, l) - A(i, k, m) * A(h, j, l));
            }
          }
          r.riemann_gauss(i, j, k, l) = s;
          rmax = std::max(rmax, std::fabs(s));
        }
      }
    }
  }
  r.riemann_max = rmax;

  // Levi-Civita route.  d_i f^{lm} = -sum_{ab} f^{la} f_abi f^{bm};
  // d_i Gamma^l_jk = 1/2 sum_m (d_i f^{lm} f_jkm + f^{lm} f_jkmi)
  DenseTensor dginv(n, 3);  // [i][l][m]
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      for (int m = l; m < n; ++m) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            s -= gi(l, a) * jet.third(a, b, i) * gi(b, m);
          }
        }
        dginv(i, l, m) = s;
        dginv(i, m, l) = s;
      }
    }
  }
  DenseTensor dgamma(n, 4);  // [i][l][j][k] = d_i Gamma^l_jk
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      for (int j = 0; j < n; ++j) {
        for (int k = j; k < n; ++k) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) {
            s += dginv(i, l, m) * jet.third(j, k, m) + gi(l, m) * jet.fourth(j, k, m, i);
          }
          dgamma(i, l, j, k) = 0.5 * s;
          dgamma(i, l, k, j) = 0.5 * s;
        }
      }
    }
  }
  // R^p_kij = d_i Gamma^p_jk - d_j Gamma^p_ik
  //           + sum_m (Gamma^m_jk Gamma^p_im - Gamma^m_ik Gamma^p_jm);
  // with this sign convention R_ijkl = -sum_p G_pl R^p_kij matches the
  // Gauss-route tensor.
  double gapmax = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int p = 0; p < n; ++p) {
            double rp = dgamma(i, p, j, k) - dgamma(j, p, i, k);
            for (int m = 0; m < n; ++m) {
              rp += r.christoffel(m, j, k) * r.christoffel(p, i, m) -
                    r.christoffel(m, i, k) * r.christoffel(p, j, m);
            }
            s -= g(p, l) * rp;
          }
          r.riemann_lc(i, j, k, l) = s;
          gapmax = std::max(gapmax, std::fabs(s - r.riemann_gauss(i, j, k, l)));
        }
      }
    }
  }
  r.gauss_gap_max = gapmax;

  // Ricci R_ik = sum_{jl} f^{jl} R_ijkl (Gauss route), scalar R = f^{ik} R_ik
  for (int i = 0; i < n; ++i) {
    for (int k = i; k < n; ++k) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
          s += gi(j, l) * r.riemann_gauss(i, j, k, l);
        }
      }
      const int ix[2] = {i, k};
      r.ricci.set(ix, s);
    }
  }
  double scalar = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) scalar += gi(i, k) * r.ricci(i, k);
  }
  r.scalar_curvature = scalar;

  // Tchebychev T^l = -(1/2n) sum f^{kl} f^{ij} f_ijk and |T|^2 = G(T,T)
  for (int l = 0; l < n; ++l) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      double tk = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) tk += gi(i, j) * A(i, j, k);
      }
      s += gi(k, l) * tk;
    }
    r.tchebychev[static_cast<std::size_t>(l)] = s / n;
  }
  r.tcheb_norm2 = metric_inner(g, r.tchebychev, r.tchebychev);

  // |A|^2 = sum f^{il} f^{jp} f^{kq} A_ijk A_lpq;  J = |A|^2 / (n(n-1))
  double a2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double raised = 0.0;
        // A^{ijk} entry accumulated as sum over l,p,q
        for (int l = 0; l < n; ++l) {
          for (int p = 0; p < n; ++p) {
            for (int q = 0; q < n; ++q) {
              raised += gi(i, l) * gi(j, p) * gi(k, q) * A(l, p, q);
            }
          }
        }
        a2 += raised * A(i, j, k);
      }
    }
  }
  r.cubic_norm2 = a2;
  r.pick_invariant = n > 1 ? a2 / (static_cast<double>(n) * (n - 1)) : 0.0;

  // scalar identity R = |A|^2 - n^2 |T|^2, i.e. R = n(n-1)J - n^2|T|^2
  r.scalar_identity_residual =
      std::fabs(r.scalar_curvature - (a2 - static_cast<double>(n) * n * r.tcheb_norm2));

  r.weingarten_max = 0.0;
  return r;
}

std::vector<double> cubic_action(const SymTensor& metric_inv, const SymTensor& cubic,
                                 std::span<const double> v, std::span<const double> w) {
  const int n = metric_inv.dim();
  std::vector<double> low(static_cast<std::size_t>(n), 0.0);
  for (int l = 0; l < n; ++l) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        s += cubic(l, i, j) * v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
      }
    }
    low[static_cast<std::size_t>(l)] = s;
  }
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += metric_inv(k, l) * low[static_cast<std::size_t>(l)];
    out[static_cast<std::size_t>(k)] = s;
  }
  return out;
}

double metric_inner(const SymTensor& metric, std::span<const double> v,
                    std::span<const double> w) {
  const int n = metric.dim();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s += metric(i, j) * v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
    }
  }
  return s;
}

VerificationReport verify_function(const ExprPtr& f, int arity, const Box& box,
                                   const VerifyOptions& opts) {
  return verify_function(DerivativeTable(f, arity), box, opts);
}

VerificationReport verify_function(const DerivativeTable& table, const Box& box,
                                   const VerifyOptions& opts) {
  const int n = table.arity();
  if (box.dim() != n) throw std::invalid_argument("verify_function: box/arity mismatch");
  if (opts.samples < 1) throw std::invalid_argument("verify_function: samples must be >= 1");

  VerificationReport rep;
  rep.requested_samples = opts.samples;
  rep.tol = opts.tol;
  rep.min_pivot = std::numeric_limits<double>::infinity();

  double scalar_scale = 1.0;
  const std::uint64_t start = 1 + opts.seed;
  const int max_attempts = 10 * opts.samples;
  int attempts = 0;
  for (std::uint64_t idx = start;
       attempts < max_attempts && static_cast<int>(rep.points.size()) < opts.samples;
       ++idx, ++attempts) {
    std::vector<double> u = halton_point(idx, n);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
      const auto& iv = box.intervals[static_cast<std::size_t>(d)];
      x[static_cast<std::size_t>(d)] = iv[0] + u[static_cast<std::size_t>(d)] * (iv[1] - iv[0]);
    }
    Jet4 jet = table.jet(x);
    int bad = 0;
    double badval = 0.0;
    auto chol = SpdFactor::try_compute(jet.hess, &bad, &badval);
    if (!chol) {
      ++rep.convexity_failures;
      continue;
    }
    rep.min_pivot = std::min(rep.min_pivot, chol->min_pivot());
    GeometryReport g = geometry_report(jet, x);
    rep.nabla_A_max = std::max(rep.nabla_A_max, g.nabla_A_max);
    rep.riemann_max = std::max(rep.riemann_max, g.riemann_max);
    rep.codazzi_max = std::max(rep.codazzi_max, g.codazzi_max);
    rep.gauss_gap_max = std::max(rep.gauss_gap_max, g.gauss_gap_max);
    rep.scalar_identity_max = std::max(rep.scalar_identity_max, g.scalar_identity_residual);
    rep.nabla_A_scale = std::max(rep.nabla_A_scale, 1.0 + g.nabla_A_max);
    rep.riemann_scale = std::max(rep.riemann_scale, 1.0 + g.riemann_max);
    scalar_scale = std::max(scalar_scale, 1.0 + std::fabs(g.scalar_curvature));
    rep.per_point.push_back({g.nabla_A_max, g.riemann_max, g.codazzi_max, g.gauss_gap_max,
                             g.scalar_identity_residual});
    rep.points.push_back(std::move(x));
  }
  rep.accepted_samples = static_cast<int>(rep.points.size());
  rep.not_strictly_convex = rep.accepted_samples == 0;
  if (rep.accepted_samples == 0) rep.min_pivot = 0.0;

  const double tol = opts.tol;
  rep.verdicts.convex = rep.convexity_failures == 0 && rep.accepted_samples > 0;
  rep.verdicts.parallel = rep.accepted_samples > 0 && rep.nabla_A_max <= tol;
  rep.verdicts.flat = rep.accepted_samples > 0 && rep.riemann_max <= tol;
  rep.verdicts.codazzi = rep.accepted_samples > 0 && rep.codazzi_max <= tol * rep.nabla_A_scale;
  rep.verdicts.gauss_consistent =
      rep.accepted_samples > 0 && rep.gauss_gap_max <= tol * rep.riemann_scale;
  rep.verdicts.scalar_identity =
      rep.accepted_samples > 0 && rep.scalar_identity_max <= tol * scalar_scale;
  return rep;
}

ExprPtr apply_affine(const ExprPtr& f, const Matrix& m, std::span<const double> a,
                     double b) {
  if (m.rows != m.cols) throw std::invalid_argument("apply_affine: square matrix required");
  const int n = m.rows;
  if (!a.empty() && static_cast<int>(a.size()) != n) {
    throw std::invalid_argument("apply_affine: wrong length of linear term");
  }
  auto minv = mat_inverse(m);
  if (!minv) throw std::invalid_argument("apply_affine: matrix is singular");

  // x_i = sum_j (M^{-1})_ij y_j
  std::vector<ExprPtr> repl(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ExprPtr s = make_const(0.0);
    for (int j = 0; j < n; ++j) {
      const double c = (*minv)(i, j);
      if (c == 0.0) continue;
      s = make_add(std::move(s), make_mul(make_const(c), make_var(j + 1)));
    }
    repl[static_cast<std::size_t>(i)] = s;
  }
  ExprPtr out = substitute(f, repl);
  for (int j = 0; j < n; ++j) {
    const double c = a.empty() ? 0.0 : a[static_cast<std::size_t>(j)];
    if (c == 0.0) continue;
    out = make_add(std::move(out), make_mul(make_const(c), repl[static_cast<std::size_t>(j)]));
  }
  if (b != 0.0) out = make_add(std::move(out), make_const(b));
  return out;
}

}  // namespace calabi
