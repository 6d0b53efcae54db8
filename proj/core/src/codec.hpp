// Copyright 2026 The LeafForge Authors.
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

// JSON mapping of configs and records. Internal: the public API exposes
// strings only, so consumers never need the JSON library.

#pragma once

#include <json.hpp>

#include "leafforge/pipeline.hpp"

namespace leafforge::detail {

using Json = nlohmann::ordered_json;

Json config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const Json& doc);

Json record_to_json(const AugRecord& record);
AugRecord record_from_json(const Json& doc);

Json seed_to_json(const SeedSpec& seed);
SeedSpec seed_from_json(const Json& doc);

}  // namespace leafforge::detail
