#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "calabi/expr.hpp"
#include "calabi/tensors.hpp"

namespace calabi {

// All pointwise invariants of the graph hypersurface of a convex potential:
// Calabi metric G = Hess f, its Levi-Civita data, the cubic form
// A_ijk = -1/2 f_ijk, curvature by two routes, and the scalar invariants.
struct GeometryReport {
  std::vector<double> point;

  SymTensor metric;             // G_ij = f_ij
  SymTensor metric_inv;         // f^{ij}
  double metric_logdet = 0.0;

  DenseTensor christoffel;      // Gamma^k_ij, slots [k][i][j]
  SymTensor fubini_pick;        // A_ijk
  DenseTensor fubini_pick_mixed;  // A^k_ij, slots [k][i][j]
  SymTensor dA_raw;             // -1/2 f_ijkl
  DenseTensor nabla_A;          // covariant derivative, slots [i][j][k][l]
  DenseTensor riemann_lc;       // R_ijkl from Gamma and its derivatives
  DenseTensor riemann_gauss;    // R_ijkl from the cubic form
  SymTensor ricci;              // R_ik
  double scalar_curvature = 0.0;

  std::vector<double> tchebychev;  // T^l
  double tcheb_norm2 = 0.0;
  double pick_invariant = 0.0;     // J (defined as 0 when n = 1)
  double cubic_norm2 = 0.0;        // |A|^2 = n(n-1) J for n >= 2
  double weingarten_max = 0.0;     // identically zero for graph immersions

  // max-norm diagnostics
  double nabla_A_max = 0.0;
  double riemann_max = 0.0;
  double codazzi_max = 0.0;
  double gauss_gap_max = 0.0;
  double scalar_identity_residual = 0.0;

  explicit GeometryReport(int n)
      : metric(n, 2), metric_inv(n, 2), christoffel(n, 3), fubini_pick(n, 3),
        fubini_pick_mixed(n, 3), dA_raw(n, 4), nabla_A(n, 4), riemann_lc(n, 4),
        riemann_gauss(n, 4), ricci(n, 2), tchebychev(static_cast<std::size_t>(n), 0.0) {}

  int dim() const { return metric.dim(); }
};

GeometryReport geometry_report(const Jet4& jet);
GeometryReport geometry_report(const Jet4& jet, std::span<const double> point);

// A(v,w) with the index raised: result^k = sum G^{kl} A_lij v^i w^j.
std::vector<double> cubic_action(const SymTensor& metric_inv, const SymTensor& cubic,
                                 std::span<const double> v, std::span<const double> w);

double metric_inner(const SymTensor& metric, std::span<const double> v,
                    std::span<const double> w);

struct Box {
  std::vector<std::array<double, 2>> intervals;
  int dim() const { return static_cast<int>(intervals.size()); }
};

struct VerifyOptions {
  int samples = 32;
  std::uint64_t seed = 0;
  double tol = 1e-8;
};

// Residuals are max-norms over tensor components and over sampled points.
struct VerificationReport {
  int requested_samples = 0;
  int accepted_samples = 0;
  int convexity_failures = 0;
  bool not_strictly_convex = false;  // no sampled point had a PD Hessian
  double tol = 0.0;

  double min_pivot = 0.0;
  double nabla_A_max = 0.0;
  double riemann_max = 0.0;
  double codazzi_max = 0.0;
  double gauss_gap_max = 0.0;
  double scalar_identity_max = 0.0;
  // scale factors actually used by the relative verdicts
  double nabla_A_scale = 1.0;
  double riemann_scale = 1.0;

  struct Verdicts {
    bool convex = false;
    bool parallel = false;
    bool flat = false;
    bool codazzi = false;
    bool gauss_consistent = false;
    bool scalar_identity = false;
  } verdicts;

  struct PointResiduals {
    double nabla_A = 0.0;
    double riemann = 0.0;
    double codazzi = 0.0;
    double gauss_gap = 0.0;
    double scalar_identity = 0.0;
  };

  std::vector<std::vector<double>> points;
  std::vector<PointResiduals> per_point;
};

// Samples Halton points in the box (seed offsets the sequence), skipping
// points whose Hessian is not positive definite, up to 10x oversampling.
VerificationReport verify_function(const DerivativeTable& table, const Box& box,
                                   const VerifyOptions& opts = {});
VerificationReport verify_function(const ExprPtr& f, int arity, const Box& box,
                                   const VerifyOptions& opts = {});

// Affine change of the graph: returns ft with ft(M x) = f(x) + <a, x> + b,
// realised by substituting x -> M^{-1} y symbolically. Throws
// std::invalid_argument when M is numerically singular.
ExprPtr apply_affine(const ExprPtr& f, const Matrix& m, std::span<const double> a,
                     double b);

}  // namespace calabi
