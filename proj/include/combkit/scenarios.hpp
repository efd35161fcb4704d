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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "combkit/consistency.hpp"

namespace combkit {

enum class Provenance { kPaper, kTrivial, kDerived };

std::string toString(Provenance p);

// A named quantity a scenario promises, with where the expected value comes
// from. Derived values name the oracle that produced them.
struct Expectation {
  std::string query;
  double expected = 0.0;
  Provenance provenance = Provenance::kTrivial;
  double tolerance = 0.0;
  std::string oracle;
  std::function<double()> compute;
};

struct ExpectationResult {
  std::string query;
  double expected = 0.0;
  double actual = 0.0;
  Provenance provenance = Provenance::kTrivial;
  double tolerance = 0.0;
  std::string oracle;
  bool pass = false;
};

struct Scenario {
  std::string name;
  std::string description;
  std::map<std::string, CombFamily> combFamilies;
  std::map<std::string, DistributionFamily> distributionFamilies;
  // Reference bases for classicality queries, keyed like combFamilies.
  std::map<std::string, BasisMap> bases;
  std::vector<Expectation> expectations;

  std::vector<ExpectationResult> evaluate() const;
};

// --- Stern-Gerlach ---------------------------------------------------------

// z, x, z measurements at t1, t2, t3 on |+>, no dynamics in between.
Comb sternGerlachComb();
BasisMap sternGerlachBases();
Scenario sternGerlach();

// --- Urn -------------------------------------------------------------------

struct UrnConfig {
  std::vector<std::string> colors;
  // Ball counts before t1, one per color.
  std::map<std::string, int> initial;
  // A ball of `dropColor` enters the urn just before the draw at `dropTime`.
  std::string dropTime;
  std::string dropColor;
  // Intervention at each time: drawn color -> color put back. Colors without
  // an entry are put back unchanged.
  std::map<std::string, std::map<std::string, std::string>, TimeLess>
      replacements;
  TimeSet times;

  // Yellow and blue ball, red drop at t2, rules yellow->green at t1,
  // blue->white at t2, red->blue at t3.
  static UrnConfig defaults();
};

void validateUrn(const UrnConfig& cfg);

// Distribution of drawn colors at `drawTimes`; at those times the
// replacement rules apply when `intervene` is set, otherwise balls are put
// back. Alphabets list every color; exact propagation over urn contents.
JointDistribution urnDistribution(const UrnConfig& cfg, const TimeSet& drawTimes,
                                  bool intervene);

// Family over every nonempty subset of cfg.times. Alphabets are trimmed per
// time to the colors drawn with positive probability in some member.
DistributionFamily urnFamily(const UrnConfig& cfg, bool intervene);

// Independent reference: enumerates individual ball choices, one branch per
// ball, instead of tracking color counts.
std::map<std::vector<std::string>, double> urnTrajectoryOracle(
    const UrnConfig& cfg, const TimeSet& drawTimes, bool intervene);

Scenario urn(const UrnConfig& cfg = UrnConfig::defaults());

// --- Randomized ------------------------------------------------------------

Scenario randomDilationFamily(std::uint64_t seed, std::size_t systemDim,
                              std::size_t envDim, std::size_t steps);

struct DephasingModel {
  ReferenceBasis basis;
  std::vector<double> initialWeights;
  // Per link: classical transition T[to][from] and mixing weight p of
  //   rho -> (1-p) rho + p * sum_{from,to} T[to][from] <from|rho|from> |to><to|
  std::vector<std::vector<std::vector<double>>> transitions;
  std::vector<double> mixing;
};

DephasingModel randomDephasingModel(std::uint64_t seed, std::size_t steps,
                                    const ReferenceBasis& basis);
// Markov comb of the model; with `coherent` each link is preceded by the
// Fourier unitary of the basis (Hadamard for a qubit).
Comb dephasingComb(const DephasingModel& model, bool coherent);
// Classical chain probabilities of the incoherent model, by enumeration.
std::vector<double> dephasingChainOracle(const DephasingModel& model);

// Needs steps >= 3 for the coherent control to be detectably non-classical.
Scenario dephasingMarkov(std::uint64_t seed, std::size_t steps,
                         const ReferenceBasis& basis);

// --- Registry --------------------------------------------------------------

struct ScenarioParams {
  std::uint64_t seed = 1;
  std::size_t steps = 3;
  std::size_t systemDim = 2;
  std::size_t envDim = 2;
  ReferenceBasis basis = ReferenceBasis::z();
};

std::vector<std::string> scenarioNames();
// Throws LookupError for an unknown name.
Scenario buildScenario(const std::string& name, const ScenarioParams& params);

}  // namespace combkit
