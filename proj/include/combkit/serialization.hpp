// Copyright 2026 The combkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <json.hpp>
#include <string>

#include "combkit/channels.hpp"
#include "combkit/combs.hpp"
#include "combkit/consistency.hpp"
#include "combkit/scenarios.hpp"

namespace combkit {

using Json = nlohmann::json;

// Every *FromJson function throws SchemaError carrying the JSON pointer of the
// first violation, rooted at `path`. Domain validation failures (a Choi
// matrix that is not CP, a distribution that does not sum to one) are
// reported the same way, at the path of the offending object.

// {rows, cols, data: [[re, im], ...]} row-major.
Json toJson(const ComplexMatrix& m);
ComplexMatrix matrixFromJson(const Json& j, const std::string& path = "");

// {dim_in, dim_out, label, choi}
Json toJson(const ChoiChannel& c);
ChoiChannel channelFromJson(const Json& j, const std::string& path = "");

// {outcomes: [{label, channel}]}
Json toJson(const Instrument& instrument);
Instrument instrumentFromJson(const Json& j, const std::string& path = "");

// {leg_order, times, slots: [{time, dim_in, dim_out}], choi,
//  generalized_identities?: [{time, channel}]}
Json toJson(const Comb& comb);
Comb combFromJson(const Json& j, const std::string& path = "");

// {system_dim, env_dim, initial_state, unitaries: [...]}
Json toJson(const Dilation& d);
Dilation dilationFromJson(const Json& j, const std::string& path = "");

// {times, alphabets, probs: [{outcome: [labels], p}]}
Json toJson(const JointDistribution& d);
JointDistribution distributionFromJson(const Json& j,
                                       const std::string& path = "");

// {kind, ground_times, members: [{times, payload}]}
Json toJson(const DistributionFamily& f);
Json toJson(const CombFamily& f);
DistributionFamily distributionFamilyFromJson(const Json& j,
                                              const std::string& path = "");
CombFamily combFamilyFromJson(const Json& j, const std::string& path = "");

// {labels, vectors: [[[re, im], ...], ...]}
Json toJson(const ReferenceBasis& b);
ReferenceBasis basisFromJson(const Json& j, const std::string& path = "");
// Either one basis for every time, or {time: basis}.
BasisMap basisMapFromJson(const Json& j, const TimeSet& times,
                          const std::string& path = "");

// Per-time maps: {maps: [{time, channel}]}
Json toJson(const MapSequence& maps);
MapSequence mapSequenceFromJson(const Json& j, const std::string& path = "");

// {pairs: [{sub, super, deviation}], pass, tol, witness?}
Json toJson(const ConsistencyReport& r);
Json toJson(const CausalOrderReport& r);
Json toJson(const std::vector<ExpectationResult>& results);

Json toJson(const TimeSet& t);
TimeSet timeSetFromJson(const Json& j, const std::string& path = "");

Json readJsonFile(const std::string& file);
void writeJsonFile(const std::string& file, const Json& j);

}  // namespace combkit
