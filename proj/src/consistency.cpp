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

#include "combkit/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <set>

namespace combkit {

namespace {

std::size_t productOfSizes(const std::vector<std::vector<std::string>>& a) {
  std::size_t n = 1;
  for (const auto& v : a) n *= v.size();
  return n;
}

std::size_t positionIn(const TimeSet& times, const std::string& t) {
  const auto& l = times.labels();
  const auto it = std::find(l.begin(), l.end(), t);
  if (it == l.end()) throw LookupError(fmt::format("no time '{}'", t));
  return static_cast<std::size_t>(it - l.begin());
}

// Outcome probabilities of `comb` measured in `bases`, indexed like a
// JointDistribution over comb.times().
struct ProbabilityTable {
  std::vector<std::vector<std::string>> alphabets;
  std::vector<double> probs;
};

ProbabilityTable measure(const Comb& comb, const BasisMap& bases) {
  std::vector<Instrument> instruments;
  ProbabilityTable table;
  for (const auto& s : comb.slots()) {
    const auto it = bases.find(s.time);
    if (it == bases.end()) {
      throw LookupError(fmt::format("no reference basis for time '{}'", s.time));
    }
    if (it->second.dim() != s.dimIn || s.dimIn != s.dimOut) {
      throw DimensionError(fmt::format(
          "basis at '{}' has dimension {} but the slot is {}->{}", s.time,
          it->second.dim(), s.dimIn, s.dimOut));
    }
    instruments.push_back(projectiveInstrument(it->second));
    table.alphabets.push_back(it->second.labels);
  }
  const std::size_t total = productOfSizes(table.alphabets);
  table.probs.resize(total);
  const std::size_t k = instruments.size();
  std::vector<std::size_t> digits(k, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t j = k; j-- > 0;) {
      digits[j] = rest % instruments[j].size();
      rest /= instruments[j].size();
    }
    MapSequence maps;
    for (std::size_t j = 0; j < k; ++j) {
      maps.emplace(comb.slots()[j].time, instruments[j].channel(digits[j]));
    }
    table.probs[flat] = contract(comb, maps);
  }
  return table;
}

// Sums `table` (over `times`) down to the times of `subset`.
std::vector<double> marginalTable(const TimeSet& times,
                                  const std::vector<std::vector<std::string>>& alphabets,
                                  const std::vector<double>& probs,
                                  const TimeSet& subset) {
  std::vector<std::size_t> keep;
  for (const auto& t : subset) keep.push_back(positionIn(times, t));
  std::vector<std::size_t> subSizes;
  for (std::size_t p : keep) subSizes.push_back(alphabets[p].size());
  const std::size_t subTotal = std::accumulate(
      subSizes.begin(), subSizes.end(), std::size_t{1}, std::multiplies<>());

  std::vector<double> out(subTotal, 0.0);
  std::vector<std::size_t> digits(alphabets.size());
  for (std::size_t flat = 0; flat < probs.size(); ++flat) {
    std::size_t rest = flat;
    for (std::size_t j = alphabets.size(); j-- > 0;) {
      digits[j] = rest % alphabets[j].size();
      rest /= alphabets[j].size();
    }
    std::size_t idx = 0;
    for (std::size_t q = 0; q < keep.size(); ++q) {
      idx = idx * subSizes[q] + digits[keep[q]];
    }
    out[idx] += probs[flat];
  }
  return out;
}

std::vector<std::string> outcomeLabels(
    const std::vector<std::vector<std::string>>& alphabets, std::size_t flat) {
  std::vector<std::string> labels(alphabets.size());
  for (std::size_t j = alphabets.size(); j-- > 0;) {
    labels[j] = alphabets[j][flat % alphabets[j].size()];
    flat /= alphabets[j].size();
  }
  return labels;
}

struct TableView {
  const TimeSet* times;
  const std::vector<std::vector<std::string>>* alphabets;
  const std::vector<double>* probs;
};

// Shared by checkKET and isClassical.
ConsistencyReport compareTables(const std::map<TimeSet, TableView>& tables,
                                double tol) {
  ConsistencyReport report;
  report.tol = tol;
  std::vector<TimeSet> keys;
  for (const auto& [k, v] : tables) keys.push_back(k);
  double worst = -1.0;
  for (const auto& [sub, super] : nestedPairs(keys)) {
    const TableView& s = tables.at(sub);
    const TableView& l = tables.at(super);
    const auto marg = marginalTable(*l.times, *l.alphabets, *l.probs, sub);
    double dev = 0.0;
    for (std::size_t k = 0; k < marg.size(); ++k) {
      const double d = std::abs((*s.probs)[k] - marg[k]);
      dev = std::max(dev, d);
      if (d > worst) {
        worst = d;
        report.witness = Witness{sub, super, outcomeLabels(*s.alphabets, k),
                                 (*s.probs)[k], marg[k]};
      }
    }
    report.pairs.push_back({sub, super, dev});
    if (dev > tol) report.pass = false;
  }
  return report;
}

}  // namespace

// ---------------------------------------------------------------------------
// JointDistribution

JointDistribution::JointDistribution(
    TimeSet times, std::vector<std::vector<std::string>> alphabets,
    std::vector<double> probs)
    : times_(std::move(times)),
      alphabets_(std::move(alphabets)),
      probs_(std::move(probs)) {
  if (alphabets_.size() != times_.size()) {
    throw ValidationError(fmt::format(
        "distribution over {} times has {} alphabets", times_.size(),
        alphabets_.size()));
  }
  for (const auto& a : alphabets_) {
    if (a.empty()) throw ValidationError("outcome alphabets must be nonempty");
    if (std::set<std::string>(a.begin(), a.end()).size() != a.size()) {
      throw ValidationError("outcome labels must be unique per time");
    }
  }
  if (probs_.size() != productOfSizes(alphabets_)) {
    throw ValidationError(fmt::format(
        "distribution needs {} probabilities, got {}",
        productOfSizes(alphabets_), probs_.size()));
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < -1e-12) {
      throw ValidationError(fmt::format("invalid probability {}", p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw ValidationError(
        fmt::format("probabilities sum to {:.17g}, not 1", sum));
  }
}

const std::vector<std::string>& JointDistribution::alphabet(
    const std::string& time) const {
  return alphabets_[positionIn(times_, time)];
}

std::size_t JointDistribution::flatIndex(
    const std::vector<std::size_t>& outcome) const {
  if (outcome.size() != alphabets_.size()) {
    throw DimensionError("outcome tuple length does not match the times");
  }
  std::size_t idx = 0;
  for (std::size_t j = 0; j < outcome.size(); ++j) {
    if (outcome[j] >= alphabets_[j].size()) {
      throw LookupError("outcome index out of range");
    }
    idx = idx * alphabets_[j].size() + outcome[j];
  }
  return idx;
}

double JointDistribution::prob(const std::vector<std::size_t>& outcome) const {
  return probs_[flatIndex(outcome)];
}

std::vector<std::size_t> JointDistribution::outcomeAt(std::size_t flat) const {
  std::vector<std::size_t> out(alphabets_.size());
  for (std::size_t j = alphabets_.size(); j-- > 0;) {
    out[j] = flat % alphabets_[j].size();
    flat /= alphabets_[j].size();
  }
  return out;
}

JointDistribution marginalize(const JointDistribution& d, const TimeSet& subset) {
  if (!subset.isSubsetOf(d.times())) {
    throw LookupError(fmt::format("marginalize: {} is not contained in {}",
                                  subset.str(), d.times().str()));
  }
  std::vector<std::vector<std::string>> alphabets;
  for (const auto& t : subset) alphabets.push_back(d.alphabet(t));
  return JointDistribution(
      subset, std::move(alphabets),
      marginalTable(d.times(), d.alphabets(), d.probs(), subset));
}

// ---------------------------------------------------------------------------
// Families

DistributionFamily::DistributionFamily(
    TimeSet ground, std::map<TimeSet, JointDistribution> members)
    : Family<JointDistribution>{std::move(ground), std::move(members)} {
  std::map<std::string, std::vector<std::string>, TimeLess> seen;
  for (const auto& [key, d] : this->members) {
    if (!(key == d.times())) {
      throw ValidationError(fmt::format(
          "family member keyed {} covers {}", key.str(), d.times().str()));
    }
    if (!key.isSubsetOf(this->ground)) {
      throw LookupError(fmt::format("member {} is not within the ground set {}",
                                    key.str(), this->ground.str()));
    }
    for (const auto& t : key) {
      const auto [it, fresh] = seen.emplace(t, d.alphabet(t));
      if (!fresh && it->second != d.alphabet(t)) {
        throw ValidationError(
            fmt::format("members disagree on the alphabet at '{}'", t));
      }
    }
  }
}

CombFamily::CombFamily(TimeSet ground, std::map<TimeSet, Comb> members)
    : Family<Comb>{std::move(ground), std::move(members)} {
  std::map<std::string, Slot, TimeLess> seen;
  for (const auto& [key, c] : this->members) {
    if (!(key == c.times())) {
      throw ValidationError(fmt::format(
          "family member keyed {} covers {}", key.str(), c.times().str()));
    }
    if (!key.isSubsetOf(this->ground)) {
      throw LookupError(fmt::format("member {} is not within the ground set {}",
                                    key.str(), this->ground.str()));
    }
    for (const auto& s : c.slots()) {
      const auto [it, fresh] = seen.emplace(s.time, s);
      if (!fresh && !(it->second == s)) {
        throw DimensionError(fmt::format(
            "members disagree on the slot dimensions at '{}'", s.time));
      }
    }
  }
}

CombFamily restrictionFamily(const Comb& comb) {
  std::map<TimeSet, Comb> members;
  for (const auto& subset : nonemptySubsets(comb.times())) {
    members.emplace(subset, restrict(comb, subset));
  }
  return CombFamily(comb.times(), std::move(members));
}

DistributionFamily marginalFamily(const JointDistribution& d) {
  std::map<TimeSet, JointDistribution> members;
  for (const auto& subset : nonemptySubsets(d.times())) {
    members.emplace(subset, marginalize(d, subset));
  }
  return DistributionFamily(d.times(), std::move(members));
}

// ---------------------------------------------------------------------------
// Checks

double ConsistencyReport::maxDeviation() const {
  double worst = 0.0;
  for (const auto& p : pairs) worst = std::max(worst, p.deviation);
  return worst;
}

std::vector<std::pair<TimeSet, TimeSet>> nestedPairs(
    const std::vector<TimeSet>& keys) {
  std::vector<TimeSet> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<TimeSet, TimeSet>> out;
  for (const auto& sub : sorted) {
    for (const auto& super : sorted) {
      if (sub.size() < super.size() && sub.isSubsetOf(super)) {
        out.emplace_back(sub, super);
      }
    }
  }
  return out;
}

ConsistencyReport checkKET(const DistributionFamily& f, double tol) {
  std::map<TimeSet, TableView> tables;
  for (const auto& [key, d] : f.members) {
    tables.emplace(key, TableView{&d.times(), &d.alphabets(), &d.probs()});
  }
  return compareTables(tables, tol);
}

ConsistencyReport checkGET(const CombFamily& f, double tol) {
  ConsistencyReport report;
  report.tol = tol;
  std::vector<TimeSet> keys;
  for (const auto& [k, c] : f.members) keys.push_back(k);
  for (const auto& [sub, super] : nestedPairs(keys)) {
    const double dev = maxAbsDiff(f.members.at(sub).choi(),
                                  restrict(f.members.at(super), sub).choi());
    report.pairs.push_back({sub, super, dev});
    if (dev > tol) report.pass = false;
  }
  return report;
}

ConsistencyReport verifyExtension(const Comb& candidate, const CombFamily& f,
                                  double tol) {
  if (!(candidate.times() == f.ground)) {
    throw LookupError(fmt::format(
        "verifyExtension: candidate covers {} but the ground set is {}",
        candidate.times().str(), f.ground.str()));
  }
  ConsistencyReport report;
  report.tol = tol;
  for (const auto& [key, member] : f.members) {
    const Comb restricted = restrict(candidate, key);
    if (!(restricted.slots() == member.slots())) {
      throw DimensionError(fmt::format(
          "verifyExtension: slot dimensions differ on {}", key.str()));
    }
    const double dev = maxAbsDiff(member.choi(), restricted.choi());
    report.pairs.push_back({key, f.ground, dev});
    if (dev > tol) report.pass = false;
  }
  return report;
}

Comb classicalEmbed(const JointDistribution& d) {
  std::vector<Slot> slots;
  for (std::size_t j = 0; j < d.times().size(); ++j) {
    const std::size_t n = d.alphabets()[j].size();
    slots.push_back({d.times().labels()[j], n, n});
  }
  const LegStructure legs = combLegs(slots);
  const std::size_t dim = legs.totalDim();
  ComplexMatrix choi(dim, dim);
  const std::size_t k = slots.size();
  std::vector<std::size_t> outcome(k);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    // Legs run (out_k, in_k, ..., out_1, in_1); only the in-digits matter.
    std::size_t rest = idx;
    for (std::size_t j = 0; j < k; ++j) {
      const Slot& s = slots[j];
      outcome[j] = rest % s.dimIn;
      rest /= s.dimIn;
      rest /= s.dimOut;
    }
    choi(idx, idx) = d.prob(outcome);
  }
  return Comb(std::move(slots), std::move(choi));
}

DistributionFamily idleReduction(const CombFamily& f, const BasisMap& bases) {
  std::map<TimeSet, JointDistribution> members;
  for (const auto& [key, comb] : f.members) {
    ProbabilityTable t = measure(comb, bases);
    members.emplace(key, JointDistribution(key, std::move(t.alphabets),
                                           std::move(t.probs)));
  }
  return DistributionFamily(f.ground, std::move(members));
}

ConsistencyReport isClassical(const CombFamily& f, const BasisMap& bases,
                              double tol) {
  std::map<TimeSet, ProbabilityTable> measured;
  for (const auto& [key, comb] : f.members) {
    measured.emplace(key, measure(comb, bases));
  }
  std::map<TimeSet, TableView> views;
  for (const auto& [key, t] : measured) {
    views.emplace(key, TableView{&key, &t.alphabets, &t.probs});
  }
  return compareTables(views, tol);
}

BasisMap uniformBasis(const TimeSet& times, const ReferenceBasis& basis) {
  BasisMap out;
  for (const auto& t : times) out.emplace(t, basis);
  return out;
}

}  // namespace combkit
