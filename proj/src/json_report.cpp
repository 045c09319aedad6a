#include "calabi/json_report.hpp"

#include <cmath>

#include "calabi/expr.hpp"

namespace calabi {

namespace {

Json sym_json(const SymTensor& t) {
  Json arr = Json::array();
  for (double v : t.raw()) arr.push_back(v);
  return arr;
}

}  // namespace

Json box_json(const Box& box) {
  Json arr = Json::array();
  for (const auto& iv : box.intervals) arr.push_back(Json::array({iv[0], iv[1]}));
  return arr;
}

Json geometry_json(const GeometryReport& r, double tol) {
  Json j;
  j["point"] = r.point;
  j["metric"] = sym_json(r.metric);
  j["fubini_pick"] = sym_json(r.fubini_pick);
  j["nabla_A_max"] = r.nabla_A_max;
  j["riemann_max"] = r.riemann_max;
  j["codazzi_max"] = r.codazzi_max;
  j["gauss_gap_max"] = r.gauss_gap_max;
  j["scalar_R"] = r.scalar_curvature;
  j["pick_J"] = r.pick_invariant;
  j["tcheb_norm2"] = r.tcheb_norm2;
  Json v;
  v["convex"] = true;  // a report exists only for PD Hessians
  v["parallel"] = r.nabla_A_max <= tol;
  v["flat"] = r.riemann_max <= tol;
  v["codazzi"] = r.codazzi_max <= tol * (1.0 + r.nabla_A_max);
  v["gauss_consistent"] = r.gauss_gap_max <= tol * (1.0 + r.riemann_max);
  v["scalar_identity"] =
      r.scalar_identity_residual <= tol * (1.0 + std::fabs(r.scalar_curvature));
  j["verdicts"] = v;
  return j;
}

Json profile_json(const TypicalBasis& basis, const DecompositionProfile& profile,
                  Branch branch) {
  Json j;
  j["mu1"] = basis.mu1;
  j["case"] = basis.case_label();
  j["mu_spectrum"] = basis.mu;
  j["k0"] = profile.k0;
  j["p"] = profile.p;
  j["dim_imL"] = profile.dim_im_l;
  j["tau"] = profile.tau;
  j["min_ambient_dim"] = profile.min_ambient_dim;
  j["branch"] = branch_label(branch);
  Json cands = Json::array();
  for (const auto& [index, lambda] : profile.product_candidates) {
    cands.push_back(Json{{"frame_index", index + 1}, {"lambda", lambda}});
  }
  j["product_candidates"] = cands;
  if (profile.inconsistent) j["inconsistent"] = true;
  return j;
}

Json point_analysis_json(const PointAnalysis& a, double tol) {
  Json j = geometry_json(a.geometry, tol);
  j["profile"] = profile_json(a.basis, a.profile, a.branch);
  return j;
}

Json verification_json(const VerificationReport& r) {
  Json j;
  j["samples_requested"] = r.requested_samples;
  j["samples_used"] = r.accepted_samples;
  j["convexity_failures"] = r.convexity_failures;
  j["not_strictly_convex"] = r.not_strictly_convex;
  j["tol"] = r.tol;
  Json res;
  res["min_pivot"] = r.min_pivot;
  res["nabla_A_max"] = r.nabla_A_max;
  res["riemann_max"] = r.riemann_max;
  res["codazzi_max"] = r.codazzi_max;
  res["gauss_gap_max"] = r.gauss_gap_max;
  res["scalar_identity_max"] = r.scalar_identity_max;
  j["residuals"] = res;
  Json pts = Json::array();
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    Json p;
    p["point"] = r.points[i];
    p["nabla_A_max"] = r.per_point[i].nabla_A;
    p["riemann_max"] = r.per_point[i].riemann;
    p["codazzi_max"] = r.per_point[i].codazzi;
    p["gauss_gap_max"] = r.per_point[i].gauss_gap;
    p["scalar_identity"] = r.per_point[i].scalar_identity;
    pts.push_back(p);
  }
  j["per_point"] = pts;
  Json v;
  v["convex"] = r.verdicts.convex;
  v["parallel"] = r.verdicts.parallel;
  v["flat"] = r.verdicts.flat;
  v["codazzi"] = r.verdicts.codazzi;
  v["gauss_consistent"] = r.verdicts.gauss_consistent;
  v["scalar_identity"] = r.verdicts.scalar_identity;
  j["verdicts"] = v;
  return j;
}

Json catalog_entry_json(const CatalogEntry& e) {
  Json j;
  j["name"] = e.name;
  Json p = Json::object();
  for (const auto& [key, vals] : e.params) {
    if (vals.size() == 1) {
      p[key] = vals[0];
    } else {
      p[key] = vals;
    }
  }
  j["params"] = p;
  j["expr"] = to_string(e.expr);
  j["arity"] = e.arity;
  j["box"] = box_json(e.default_box);
  j["citation"] = e.citation;
  j["parallel"] = e.expect_parallel;
  j["flat"] = e.expect_flat;
  return j;
}

}  // namespace calabi
