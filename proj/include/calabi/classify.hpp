#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "calabi/geometry.hpp"
#include "calabi/tensors.hpp"

namespace calabi {

struct CubicMaxOptions {
  int restarts = 64;
  std::uint64_t seed = 0;
  int max_iters = 500;
  double tol = 1e-12;
};

struct CubicMaxResult {
  std::vector<double> direction;  // G-unit maximiser e1
  double mu1 = 0.0;               // F(e1) >= 0
};

// Maximises F(v) = A(v,v,v) over the G-unit sphere by shifted symmetric
// power iteration after a Cholesky change of variables; the best of all
// restarts is returned, deterministically for a fixed seed.
CubicMaxResult cubic_max(const SymTensor& metric, const SymTensor& cubic,
                         const CubicMaxOptions& opts = {});

// G-orthonormal frame e1..en where e1 maximises F and A(e1, .) is diagonal
// on the complement. case_m = 0 for vanishing mu1, m when the spectrum is
// {mu1} + {mu1/2 x (m-1)} + {0 x (n-m)}, and -1 when it clusters as neither.
struct TypicalBasis {
  std::vector<std::vector<double>> frame;
  std::vector<double> mu;  // mu[0] = mu1; mu[1..] sorted descending
  int case_m = -1;
  double mu1 = 0.0;
  bool classified() const { return case_m >= 0; }
  std::string case_label() const;
};

TypicalBasis typical_basis(const SymTensor& metric, const SymTensor& cubic,
                           std::span<const double> e1, double mu1,
                           double cluster_tol = 1e-6);

struct DecompositionProfile {
  int m = 0;
  double mu1 = 0.0;
  double tau = 0.0;  // mu1^2 / 8
  bool trivial = true;
  bool inconsistent = false;

  // D2/D3 frame slots are positions in the typical basis (0-based)
  std::vector<int> d2_slots;
  std::vector<int> d3_slots;

  // L(v_a, v_b) in D3 coordinates; row-major over the D2 frame
  std::vector<std::vector<std::vector<double>>> l_table;

  // chain vectors v_1..v_k0 of the eigen-split decomposition, in D2 frame
  // coordinates
  std::vector<std::vector<double>> chain;

  // frame vectors e_i that satisfy the product relations A(e_i,e_i) = l e_i
  // and A(e_i, e_j) in {l e_j, 0} for all j, with their constants; several
  // may qualify and all are reported
  std::vector<std::pair<int, double>> product_candidates;

  int k0 = 0;
  int p = 0;          // dim V_v(0)
  int dim_im_l = 0;
  int min_ambient_dim = 0;

  double l_range_residual = 0.0;    // D1/D2 components of A(v,w) - 1/2 mu1 G e1
  double isotropy_residual = 0.0;   // |G(L(v,v),L(v,v)) - mu1^2/4|
  double pv_spectrum_residual = 0.0;  // distance of P_v spectra from {mu1^2/4, tau, 0}
};

DecompositionProfile build_profile(const SymTensor& metric, const SymTensor& cubic,
                                   const TypicalBasis& basis);

// Minimal hypersurface dimension for case m with chain length k0 and null
// dimension p; exact integer formulas, no tolerance.
int min_dim(int m, int k0, int p);

// e_row * e_col: sign and target index (1..7); target 0 with sign -1 encodes
// the diagonal -id entries.
struct OctonionEntry {
  int sign;
  int target;
};
using OctonionTable = std::array<std::array<OctonionEntry, 7>, 7>;
const OctonionTable& octonion_table();

enum class Branch { I, II, III, IV, Unclassified, Inconsistent, Impossible };
std::string branch_label(Branch b);

Branch classify_point(const TypicalBasis& basis, const DecompositionProfile& profile);

// Everything the pipeline produces for one point.
struct PointAnalysis {
  GeometryReport geometry;
  TypicalBasis basis;
  DecompositionProfile profile;
  Branch branch;
};

PointAnalysis analyze_point(const Jet4& jet, std::span<const double> point,
                            const CubicMaxOptions& opts = {});

}  // namespace calabi
