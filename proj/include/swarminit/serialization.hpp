// Copyright 2026 The swarminit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarminit/pipeline.hpp"

namespace swarminit {

using Json = nlohmann::json;

/// Sections {world, planner, pipeline, benchmark}; keys mirror the struct
/// fields, missing keys keep their defaults, unknown keys are rejected.
/// Throws ErrorCode::kParseError and ErrorCode::kInvalidConfig.
Config ConfigFromJson(const Json& j);
Config LoadConfig(const std::string& path);
Json ToJson(const Config& config);

Json ToJson(const EpochRecord& record);
EpochRecord EpochRecordFromJson(const Json& j);

/// One EpochRecord per line.
void WriteTrace(std::ostream& out, const std::vector<EpochRecord>& records);
std::vector<EpochRecord> ReadTrace(std::istream& in);

Json ToJson(const QMatrix& q);
Json ToJson(const SdpSolution& solution);
Json ToJson(const CorrespondenceGraph& graph);
Json ToJson(const RunReport& report);

/// Header plus one line per row.
std::string ToCsv(const std::vector<BenchmarkRow>& rows);

}  // namespace swarminit
