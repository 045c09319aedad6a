#pragma once

#include <json.hpp>

#include "calabi/classify.hpp"
#include "calabi/geometry.hpp"
#include "calabi/products.hpp"

namespace calabi {

using Json = nlohmann::ordered_json;

// Per-point geometry block with the stable field names used by the CLI.
Json geometry_json(const GeometryReport& report, double tol);

Json profile_json(const TypicalBasis& basis, const DecompositionProfile& profile,
                  Branch branch);

Json point_analysis_json(const PointAnalysis& analysis, double tol);

Json verification_json(const VerificationReport& report);

Json catalog_entry_json(const CatalogEntry& entry);

Json box_json(const Box& box);

}  // namespace calabi
