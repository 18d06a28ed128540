#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "centroflow/curve.hpp"
#include "centroflow/flow.hpp"
#include "centroflow/obstruction.hpp"
#include "centroflow/solver.hpp"

namespace centroflow {

using Json = nlohmann::ordered_json;

/// {"a0": r, "cos": [...], "sin": [...]}; index n of the arrays is harmonic 2(n+1).
Json to_json(const FourierSpec& spec);
/// Throws ConfigError on malformed input.
FourierSpec fourier_spec_from_json(const Json& j);

/// Reads `p`, `n_samples`, `psi` and the tolerances; unknown keys are ignored.
FlowConfig flow_config_from_json(const Json& j, FlowConfig defaults = {});

Json to_json(const ObstructionReport& report);
/// SolveReport without the trace; `curve_refs[i]` names the file of snapshot i.
Json to_json(const SolveReport& report, const std::vector<std::string>& curve_refs);
Json to_json(const FlowRecord& record);

/// Parses a JSON file; ConfigError carries the parser's line/column message.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Two-column `theta,<name>` CSV at 17 significant digits.
std::string field_csv(std::span<const double> f, const char* name);

}  // namespace centroflow
