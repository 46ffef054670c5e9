// Copyright 2026 The Scatterfield Authors. All Rights Reserved.
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

// JSON encodings of configuration blocks and metadata. from_json accepts partial
// objects: absent keys keep their defaults, unknown keys are rejected.

#include "json.hpp"
#include "scatterfield/baseline_bgr.hpp"
#include "scatterfield/metrics.hpp"
#include "scatterfield/optics.hpp"
#include "scatterfield/scatter_sim.hpp"
#include "scatterfield/volume_synth.hpp"

namespace scatterfield {

void to_json(nlohmann::json& j, const GridSpec& v);
void from_json(const nlohmann::json& j, GridSpec& v);
void to_json(nlohmann::json& j, const VolumeRecipe& v);
void from_json(const nlohmann::json& j, VolumeRecipe& v);
void to_json(nlohmann::json& j, const Emitter& v);
void from_json(const nlohmann::json& j, Emitter& v);
void to_json(nlohmann::json& j, const SyntheticPsfParams& v);
void from_json(const nlohmann::json& j, SyntheticPsfParams& v);
void to_json(nlohmann::json& j, const ViewGeometry& v);
void from_json(const nlohmann::json& j, ViewGeometry& v);
void to_json(nlohmann::json& j, const BackgroundParams& v);
void from_json(const nlohmann::json& j, BackgroundParams& v);
void to_json(nlohmann::json& j, const NoiseParams& v);
void from_json(const nlohmann::json& j, NoiseParams& v);
void to_json(nlohmann::json& j, const AttenuationModel& v);
void from_json(const nlohmann::json& j, AttenuationModel& v);
void to_json(nlohmann::json& j, const SimMeta& v);
void from_json(const nlohmann::json& j, SimMeta& v);
void to_json(nlohmann::json& j, const MatchConfig& v);
void from_json(const nlohmann::json& j, MatchConfig& v);
void to_json(nlohmann::json& j, const BgrParams& v);
void from_json(const nlohmann::json& j, BgrParams& v);
void to_json(nlohmann::json& j, const DepthCounts& v);
void to_json(nlohmann::json& j, const DetectionReport& v);

/// Throws Error(invalid_argument) naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const char* block);

}  // namespace scatterfield
