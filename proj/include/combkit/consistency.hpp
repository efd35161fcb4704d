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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "combkit/channels.hpp"
#include "combkit/combs.hpp"

namespace combkit {

// Default tolerance for comparing members of a family.
inline constexpr double kFamilyTol = 1e-9;

// Joint distribution over outcomes at a set of times. Probabilities are
// stored densely; the outcome index at the earliest time is the most
// significant digit.
class JointDistribution {
 public:
  // Validates nonnegativity (>= -1e-12) and normalization (within 1e-10).
  JointDistribution(TimeSet times, std::vector<std::vector<std::string>> alphabets,
                    std::vector<double> probs);

  const TimeSet& times() const noexcept { return times_; }
  const std::vector<std::vector<std::string>>& alphabets() const noexcept {
    return alphabets_;
  }
  const std::vector<std::string>& alphabet(const std::string& time) const;
  const std::vector<double>& probs() const noexcept { return probs_; }

  // Outcome indices listed in ascending time order.
  double prob(const std::vector<std::size_t>& outcome) const;
  std::size_t flatIndex(const std::vector<std::size_t>& outcome) const;
  std::vector<std::size_t> outcomeAt(std::size_t flat) const;

  friend bool operator==(const JointDistribution&,
                         const JointDistribution&) = default;

 private:
  TimeSet times_;
  std::vector<std::vector<std::string>> alphabets_;
  std::vector<double> probs_;
};

JointDistribution marginalize(const JointDistribution& d, const TimeSet& subset);

// Family of members indexed by the time set they cover, all drawn from a
// common ground set.
template <typename Member>
struct Family {
  TimeSet ground;
  std::map<TimeSet, Member> members;
};

// Alphabets must agree at shared times.
class DistributionFamily : public Family<JointDistribution> {
 public:
  DistributionFamily(TimeSet ground, std::map<TimeSet, JointDistribution> members);
};

// Slot dimensions must agree at shared times.
class CombFamily : public Family<Comb> {
 public:
  CombFamily(TimeSet ground, std::map<TimeSet, Comb> members);
};

// Every restriction of `comb` to a nonempty subset of its times.
CombFamily restrictionFamily(const Comb& comb);
// Every marginal of `d` to a nonempty subset of its times.
DistributionFamily marginalFamily(const JointDistribution& d);

struct PairDeviation {
  TimeSet sub;
  TimeSet super;
  double deviation = 0.0;

  friend bool operator==(const PairDeviation&, const PairDeviation&) = default;
};

// Largest disagreement between a family's sub-member and the corresponding
// marginal of a super-member.
struct Witness {
  TimeSet sub;
  TimeSet super;
  // Outcome labels at the times of `sub`, ascending.
  std::vector<std::string> outcome;
  // Probability from the sub-member and the marginal of the super-member.
  double direct = 0.0;
  double marginal = 0.0;
};

struct ConsistencyReport {
  // Sorted by (sub, super).
  std::vector<PairDeviation> pairs;
  bool pass = true;
  double tol = kFamilyTol;
  std::optional<Witness> witness;

  double maxDeviation() const;
};

// All (sub, super) pairs present in a family with sub a proper subset.
std::vector<std::pair<TimeSet, TimeSet>> nestedPairs(
    const std::vector<TimeSet>& keys);

ConsistencyReport checkKET(const DistributionFamily& f, double tol = kFamilyTol);

// Entrywise max-norm distance between each member and the restriction of
// every larger member.
ConsistencyReport checkGET(const CombFamily& f, double tol = kFamilyTol);

// Compares restrict(candidate, times) against every member. The pair list
// uses the ground set as `super`.
ConsistencyReport verifyExtension(const Comb& candidate, const CombFamily& f,
                                  double tol = kFamilyTol);

// Diagonal comb  sum_i P(i_k..i_1) 1_out (x) |i_k><i_k| (x) ... (x) 1_out (x)
// |i_1><i_1|  in the computational basis.
Comb classicalEmbed(const JointDistribution& d);

using BasisMap = std::map<std::string, ReferenceBasis, TimeLess>;

// Probabilities of measuring each member in the given per-time bases.
DistributionFamily idleReduction(const CombFamily& f, const BasisMap& bases);

// Per-outcome check that fixed-basis statistics of each member equal the
// summed statistics of every larger member.
ConsistencyReport isClassical(const CombFamily& f, const BasisMap& bases,
                              double tol = kFamilyTol);

// Same basis at every time of the ground set.
BasisMap uniformBasis(const TimeSet& times, const ReferenceBasis& basis);

}  // namespace combkit
