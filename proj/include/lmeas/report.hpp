#pragma once

#include "lmeas/harness.hpp"

namespace lmeas {

/// Deterministic JSON serialization (fixed key order, rationals as "p/q").
std::string report_json(const TheoremReport& rep);

std::string index_json(const std::vector<TheoremReport>& reps);
std::string index_csv(const std::vector<TheoremReport>& reps);
std::string index_md(const std::vector<TheoremReport>& reps);

} // namespace lmeas
