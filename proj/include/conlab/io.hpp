#pragma once

// JSON specs in, JSON/CSV out. Node indices in JSON and CSV headers are
// 0-based; human-facing text elsewhere is 1-based.

#include "conlab/dynamics.hpp"
#include "conlab/equilibria.hpp"
#include "conlab/stability.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace conlab {

using Json = nlohmann::json;

inline constexpr const char* schema_tag = "consensus-lab/1";

/// `source` is inline JSON when it starts with '{' or '[', otherwise a file path.
[[nodiscard]] Json load_json(const std::string& source);

/// {"n": int, "edges": [[i, j], ...]}. Throws Schema on shape errors.
[[nodiscard]] Graph graph_from_json(const Json& j);
[[nodiscard]] Json graph_to_json(const Graph& g);

/// {"kind":"odd_polynomial","coeffs":[a1,a3,...]}, {"kind":"sine","amplitude":a},
/// {"kind":"linear","slope":s}.
[[nodiscard]] CouplingFunction coupling_from_json(const Json& j);
[[nodiscard]] Json coupling_to_json(const CouplingFunction& f);

/// One coupling object for every edge, or an array with one per edge.
[[nodiscard]] CouplingAssignment assignment_from_json(const Json& j, int edge_count);

/// {"graph": ..., "coupling": ...}.
[[nodiscard]] System system_from_json(const Json& j);

[[nodiscard]] Json verdict_to_json(const StabilityVerdict& v);

/// Header provenance,residual,x0..x{n-1},y0..y{m-1}.
[[nodiscard]] std::string equilibria_csv(const std::vector<Equilibrium>& list, int n, int m);
/// The x columns of every row of an equilibria CSV.
[[nodiscard]] std::vector<Eigen::VectorXd> states_from_csv(const std::string& text);

/// Header t,x0..x{n-1}.
[[nodiscard]] std::string trajectory_csv(const Trajectory& tr);

/// Shortest round-trip text for a double.
[[nodiscard]] std::string format_number(double v);

}  // namespace conlab
