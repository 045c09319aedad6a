#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "calabi/expr.hpp"
#include "calabi/geometry.hpp"

namespace calabi {

// How a catalog potential decomposes as a Calabi product, enough to
// reconstruct the distinguished direction and the split at any point.
struct ProductStructure {
  enum class Kind {
    JoinFirstVar,  // T = lambda * x1 d1, D3 = remaining coordinates
    RadialCone,    // T = lambda * sum_{i in cone_vars} x_i d_i
  };
  Kind kind = Kind::JoinFirstVar;
  double lambda = 1.0;
  std::vector<int> cone_vars;  // 1-based variable indices of the cone factor
  std::vector<int> d3_vars;    // 1-based variable indices of the Calabi factor
};

struct CatalogEntry {
  std::string name;
  std::map<std::string, std::vector<double>> params;
  ExprPtr expr;
  int arity = 0;
  Box default_box;
  std::string citation;
  bool expect_parallel = false;
  bool expect_flat = false;
  std::optional<ProductStructure> product;
};

// Q(c_1..c_r; n): -sum c_i ln x_i + 1/2 sum_{j>r} x_j^2 on x_1..x_r > 0.
ExprPtr q_family(std::span<const double> c, int n);

// -(1/lambda^2) ln x1 + f2 with the factor's variables shifted up by one.
ExprPtr join_calabi_factor(const ExprPtr& f2, int factor_arity, double lambda);

std::vector<std::string> catalog_names();

// Throws std::invalid_argument for unknown names, std::domain_error for
// parameter constraint violations.
CatalogEntry catalog(const std::string& name,
                     const std::map<std::string, std::vector<double>>& params);

// The product tangent direction and D2/D3 frames at a point, built from the
// entry's ProductStructure; vectors are G-orthonormal.
struct ProductFrame {
  std::vector<double> t;  // G-unit
  std::vector<std::vector<double>> d2;
  std::vector<std::vector<double>> d3;
  double lambda = 0.0;
};

ProductFrame product_frame(const ProductStructure& ps, const GeometryReport& report);

// Residuals of A(T,T)=lambda T, A(T,V)=lambda V, A(T,W)=0, A(V,W)=0 in
// max-norm over coordinate components.
struct ProductCheck {
  double lambda = 0.0;
  double res_tt = 0.0;
  double res_tv = 0.0;
  double res_tw = 0.0;
  double res_vw = 0.0;
  double tol = 0.0;
  bool verdict = false;
  double max_residual() const;
};

ProductCheck product_structure_check(const GeometryReport& report,
                                     std::span<const double> t_dir, double lambda,
                                     const std::vector<std::vector<double>>& d2,
                                     const std::vector<std::vector<double>>& d3,
                                     double tol);

}  // namespace calabi
