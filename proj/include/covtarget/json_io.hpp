#pragma once

#include "covtarget/clustering.hpp"
#include "covtarget/netgraph.hpp"
#include "covtarget/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace covtarget {

using Json = nlohmann::ordered_json;

Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json to_json(const FitReport& r);

/// {model, variant, n, labels, ..., target: {delta, pd_adjusted} | null, mu, fit}
Json to_json(const FittedModel& m);
/// Throws ParseError on a malformed document.
FittedModel fitted_model_from_json(const Json& j);

/// {labels, delta, edges: [[i, j, rho], ...]}, 0-based indices.
Json to_json(const ThresholdGraph& g);
ThresholdGraph graph_from_json(const Json& j);

/// List of ticker lists.
Json cliques_to_json(const CliqueSet& cliques, const std::vector<std::string>& labels);

Json to_json(const Dendrogram& d);

Json to_json(const GraphComparison& c, const std::vector<std::string>& labels);

Json to_json(const EvalReport& r);

/// Paper-style text table: one column per model, rows F, KL and cliques.
std::string format_table(const EvalReport& r);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace covtarget
