#pragma once

#include <string>

#include <json.hpp>

#include "fragsim/analytics.hpp"
#include "fragsim/fragmentation.hpp"
#include "fragsim/limits.hpp"
#include "fragsim/path.hpp"

namespace fragsim {

using Json = nlohmann::ordered_json;

// Paths are stored as CSV "x,value" (17 significant digits) next to a JSON
// sidecar <file>.json holding {beta, kind, t0, dt, n, seed}.
void write_path(const SampledPath& path, const std::string& csv_file);
SampledPath read_path(const std::string& csv_file);

Json to_json(const OpenSet& set);
Json to_json(const RankedMasses& masses);
// {level, intervals, ranked}
Json snapshot_json(double level, const OpenSet& set);

// Path files plus <file>.eta.json with the passage curves and truncation.
void write_h_infinity(const HInfinitySample& sample, const std::string& csv_file);

// CSV "lambda,phi" and a sidecar {alpha, residual, iterations}.
void write_phi_table(const PhiTable& table, const std::string& csv_file);

void write_text(const std::string& file, const std::string& text);
std::string read_text(const std::string& file);

}  // namespace fragsim
