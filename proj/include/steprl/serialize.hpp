#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "steprl/core.hpp"

namespace steprl {

// JSON conversions for the core value types, picked up by nlohmann::json via
// argument-dependent lookup. TaskId and Action serialize as bare integers;
// the structured types serialize as objects with stable field names.
void to_json(nlohmann::json& j, const TaskId& task);
void from_json(const nlohmann::json& j, TaskId& task);

void to_json(nlohmann::json& j, const Action& action);
void from_json(const nlohmann::json& j, Action& action);

void to_json(nlohmann::json& j, const State& state);
void from_json(const nlohmann::json& j, State& state);

void to_json(nlohmann::json& j, const Step& step);
void from_json(const nlohmann::json& j, Step& step);

void to_json(nlohmann::json& j, const Trajectory& trajectory);
void from_json(const nlohmann::json& j, Trajectory& trajectory);

void to_json(nlohmann::json& j, const StepSample& sample);
void from_json(const nlohmann::json& j, StepSample& sample);

// Writes one compact JSON document per line.
void append_jsonl(std::ostream& out, const nlohmann::json& record);

// Reads every non-empty line as a JSON document. Throws on malformed lines.
std::vector<nlohmann::json> read_jsonl(std::istream& in);

}  // namespace steprl
