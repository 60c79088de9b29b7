#pragma once

#include "ocokit/engine.hpp"
#include "ocokit/functions.hpp"
#include "ocokit/jeo.hpp"
#include "ocokit/prox.hpp"
#include "ocokit/robust.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ocokit::io {

using nlohmann::json;

/// Reads and parses a JSON file; ParseError names the file on failure.
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

// Domain descriptors:
//   {"type": "simplex", "dim": n, "dgf": "entropy" | "euclidean"}
//   {"type": "ball", "radius": r, "center": [...]}   or  {"type": "ball", "radius": r, "dim": n}
//   {"type": "box", "lower": [...], "upper": [...]}
ProximalSetup parse_domain(const json& j, const std::string& path = "domain");
json to_json(const ProximalSetup& setup);

Vector parse_vector(const json& j, const std::string& path);
Matrix parse_matrix(const json& j, const std::string& path);
json to_json(const Vector& v);
json to_json(const Matrix& m);

/// {"kind": "robust", "m", "n", "x_domain", "u_domains": [...],
///  "curvature": {"x", "u"}, "constraints": [{"A", "c", "b", "slopes", "offsets"}],
///  "constants": {"G_X", "G_U", "alpha_X", "alpha_U", "L_X", "L_U"}}
RobustInstance parse_robust_instance(const json& j);
json to_json(const RobustInstance& inst);

/// {"kind": "oco", "domain": {...}, "terms": [{"rho", "anchor", "slopes", "offsets"}, ...]}
struct StreamInstance {
  ProximalSetup setup;
  PiecewiseQuadraticStream stream;
};
StreamInstance parse_stream_instance(const json& j);
json to_json(const ProximalSetup& setup, const PiecewiseQuadraticStream& stream);

/// {"kind": "jeo", "x_domain", "objective": {"rho", "P", "q", "slopes", "data", "offsets"},
///  "constants": {"G_X", "alpha_X", "L_X", "G_U", "L_U"}, "u_star" (optional),
///  "estimator": {"H": [[...]], "target": [...], "u0": [...]}}
struct JeoSpec {
  JeoInstance instance;
  std::optional<EstimationObjective> estimator;
  std::optional<Vector> u0;
};
JeoSpec parse_jeo_instance(const json& j);

/// Estimates, one per line, comma separated.
std::vector<Vector> read_stream_file(const std::filesystem::path& path);

/// t, gamma, theta, xi_dual_norm, step_residual
void write_trace_csv(std::ostream& out, const RunTrace& trace);
/// t, z_0, z_1, ... (and v_* for mirror prox)
void write_iterates_csv(std::ostream& out, const RunTrace& trace);
/// t, u_dist, gap_partial, regret_partial
void write_jeo_trace_csv(std::ostream& out, const std::vector<JeoStep>& steps);

/// Stable hex digest of a JSON document (keys are sorted by nlohmann::json).
std::string config_hash(const json& config);

/// Output directory: OCOKIT_OUT when set, otherwise the fallback.
std::filesystem::path output_directory(const std::filesystem::path& fallback);

}  // namespace ocokit::io
