#pragma once

// JSON / CSV persistence. JSON for structured data, CSV for per-triangle
// bulk data.

#include "stretchlab/earthquake.h"
#include "stretchlab/pharmonic.h"

#include <json.hpp>

#include <string>

namespace stretchlab::io {

using json = nlohmann::json;

json mat_to_json(const Mat3& m);  // row-major 3x3 array
Mat3 mat_from_json(const json& j);

/// {generators: [4 x 3x3], label}
json rep_to_json(const SurfaceGroupRep& rep);
/// Re-verifies the representation invariants.
SurfaceGroupRep rep_from_json(const json& j);

/// {values: [4 x 3x3], rep: <file reference or inline rep>}
json cocycle_to_json(const Cocycle& c, const std::string& rep_ref = "");
Cocycle cocycle_from_json(const json& j, const SurfaceGroupRep& base);

/// [{word: "a1", weight: 1.0}, ...]
json multicurve_to_json(const WeightedMulticurve& mc);
WeightedMulticurve multicurve_from_json(const json& j);

json measure_to_json(const LieValuedMeasure& m);

json mesh_to_json(const FundamentalMesh& mesh);

/// J_p, kappa_p, residuals, iteration data (no per-triangle arrays).
json stage_summary(const SolveResult& r);
/// id,area,s1,s2,density
void write_density_csv(const std::string& path, const FundamentalMesh& mesh,
                       const SolveResult& r);

/// Class values of a stage, for warm restarts.
json checkpoint_to_json(const SolveResult& r, int level);
EquivariantMap checkpoint_from_json(const json& j, const FundamentalMesh& mesh,
                                    const SurfaceGroupRep& rho, int* p = nullptr);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const json& j);

}  // namespace stretchlab::io
