#pragma once
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "core/grid.hpp"
#include "core/jam.hpp"

namespace airylab {

// Shortest decimal form that round-trips a double (up to 17 significant digits).
std::string format_double(double v);

// CSV schema: header "line_index,time,value", one row per (line, grid time),
// line_index 1-based.
void write_ensemble_csv(const LineEnsemble& ensemble, std::ostream& out);
LineEnsemble read_ensemble_csv(std::istream& in, double variance = 1.0);

// {"format_version":1, "k":..., "ell":..., "delta":..., "edges":[[i,j],...]}
nlohmann::json jam_graph_to_json(const JamGraph& graph);
JamGraph jam_graph_from_json(const nlohmann::json& j);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace airylab
