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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "combkit/consistency.hpp"
#include "combkit/random.hpp"
#include "combkit/scenarios.hpp"
#include "oracles.hpp"

using namespace combkit;

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("threw: {}", e.what())};
  }
  if (!o.pass) ++failures;
  fmt::print("[{}] criterion {}: {} | {}\n", o.pass ? "PASS" : "FAIL", id, title, o.detail);
  std::fflush(stdout);
}

constexpr int kCorpus = 50;

Dilation corpusDilation(int seed) {
  Rng rng(static_cast<std::uint64_t>(seed));
  return randomDilation(2, 2, 3 + static_cast<std::size_t>(seed % 2), rng);
}

Outcome sternGerlachCriterion() {
  const auto start = Clock::now();
  const Comb c = sternGerlachComb();
  const Instrument jz = projectiveInstrument(ReferenceBasis::z());
  const Instrument jx = projectiveInstrument(ReferenceBasis::x());
  double worstEighth = 0.0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t e = 0; e < 2; ++e) {
        const MapSequence maps{{"t1", jz.channel(a)}, {"t2", jx.channel(b)}, {"t3", jz.channel(e)}};
        worstEighth = std::max(worstEighth, std::abs(contract(c, maps) - 0.125));
      }
  double marginal = 0.0;
  for (std::size_t b = 0; b < 2; ++b) {
    marginal += contract(c, {{"t1", jz.channel(0)}, {"t2", jx.channel(b)}, {"t3", jz.channel(0)}});
  }
  const Comb outer = restrict(c, TimeSet({"t1", "t3"}));
  const double half = contract(outer, {{"t1", jz.channel(0)}, {"t3", jz.channel(0)}});
  const double elapsed = secondsSince(start);
  const bool ok = worstEighth < 1e-10 && std::abs(marginal - 0.25) < 1e-10 &&
                  std::abs(half - 0.5) < 1e-10 && elapsed < 1.0;
  return {ok, fmt::format("max |P - 1/8| = {:.3g}; marginal sum = {:.17g}; restricted = "
                          "{:.17g}; {:.3f} s (limit 1 s)",
                          worstEighth, marginal, half, elapsed)};
}

Outcome getCriterion() {
  const auto start = Clock::now();
  double worst = 0.0;
  bool allPass = true;
  for (int seed = 1; seed <= kCorpus; ++seed) {
    const Dilation d = corpusDilation(seed);
    const Comb c = fromDilation(d, defaultTimes(d.unitaries.size()));
    const auto r = checkGET(restrictionFamily(c), 1e-10);
    allPass = allPass && r.pass;
    worst = std::max(worst, r.maxDeviation());
  }
  const double elapsed = secondsSince(start);
  const bool ok = allPass && worst < 1e-10 && elapsed < 30.0;
  return {ok, fmt::format("{} dilations; max deviation {:.3g} (limit 1e-10); {:.2f} s (limit 30 s)",
                          kCorpus, worst, elapsed)};
}

Outcome commutingSquareCriterion() {
  Rng rng(2024);
  double getDev = 0.0, roundTrip = 0.0, born = 0.0;
  bool getPass = true;
  const Instrument p = projectiveInstrument(ReferenceBasis::computational(2));
  for (int trial = 0; trial < kCorpus; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
    const JointDistribution top(defaultTimes(n),
                                std::vector<std::vector<std::string>>(n, {"0", "1"}),
                                randomSimplexPoint(std::size_t{1} << n, rng));
    const DistributionFamily df = marginalFamily(top);
    std::map<TimeSet, Comb> members;
    for (const auto& [t, m] : df.members) members.emplace(t, classicalEmbed(m));
    const CombFamily cf(df.ground, members);
    const auto get = checkGET(cf, 1e-11);
    getPass = getPass && get.pass;
    getDev = std::max(getDev, get.maxDeviation());

    const DistributionFamily back =
        idleReduction(cf, uniformBasis(df.ground, ReferenceBasis::computational(2)));
    for (const auto& [t, m] : df.members) {
      const auto& r = back.members.at(t);
      for (std::size_t k = 0; k < m.probs().size(); ++k) {
        roundTrip = std::max(roundTrip, std::abs(r.probs()[k] - m.probs()[k]));
        // Contraction with the projector sequence of outcome k.
        const auto idx = m.outcomeAt(k);
        MapSequence maps;
        for (std::size_t j = 0; j < idx.size(); ++j) maps.emplace(t.labels()[j], p.channel(idx[j]));
        born = std::max(born, std::abs(contract(members.at(t), maps) - m.probs()[k]));
      }
    }
  }
  const bool ok = getPass && roundTrip < 1e-11 && born < 1e-12;
  return {ok, fmt::format("{} families; GET deviation {:.3g}; round trip {:.3g} (limit 1e-11); "
                          "contraction {:.3g} (limit 1e-12)",
                          kCorpus, getDev, roundTrip, born)};
}

Outcome classicalityCriterion() {
  const double tol = 1e-9;
  bool dephasingOk = true, controlFails = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario s = dephasingMarkov(seed, 3, ReferenceBasis::z());
    dephasingOk = dephasingOk &&
                  isClassical(s.combFamilies.at("dephasing"), s.bases.at("dephasing"), tol).pass;
    controlFails = controlFails &&
                   !isClassical(s.combFamilies.at("control"), s.bases.at("control"), tol).pass;
  }
  const Scenario sg = sternGerlach();
  const auto r = isClassical(sg.combFamilies.at("combs"), sternGerlachBases(), tol);
  const bool witnessOk = !r.pass && r.witness &&
                         std::abs(r.witness->direct - 0.5) < 1e-10 &&
                         std::abs(r.witness->marginal - 0.25) < 1e-10;
  std::string witness = "none";
  if (r.witness) {
    witness = fmt::format("{} in {}: {:.17g} vs {:.17g}", r.witness->sub.str(),
                          r.witness->super.str(), r.witness->direct, r.witness->marginal);
  }
  return {dephasingOk && controlFails && witnessOk,
          fmt::format("dephasing classical: {}; Hadamard control non-classical: {}; "
                      "Stern-Gerlach witness {}",
                      dephasingOk, controlFails, witness)};
}

Outcome oracleCriterion() {
  double worst = 0.0;
  int sequences = 0;
  for (int seed = 1; seed <= kCorpus; ++seed) {
    const Dilation d = corpusDilation(seed);
    const Comb c = fromDilation(d, defaultTimes(d.unitaries.size()));
    Rng rng(static_cast<std::uint64_t>(1000 + seed));
    for (int k = 0; k < 20; ++k) {
      std::vector<ChoiChannel> maps;
      for (std::size_t j = 0; j < d.unitaries.size(); ++j) {
        const Instrument inst = randomInstrument(2, 2 + rng.index(2), 2, rng);
        maps.push_back(inst.channel(rng.index(inst.size())));
      }
      worst = std::max(worst, std::abs(contract(c, oracle::sequence(c.times(), maps)) -
                                       oracle::simulateDilation(d, maps)));
      ++sequences;
    }
  }
  return {worst < 1e-10, fmt::format("{} sequences over {} dilations; max difference {:.3g} "
                                     "(limit 1e-10)",
                                     sequences, kCorpus, worst)};
}

Outcome invariantsCriterion() {
  double bornDev = 0.0, linDev = 0.0;
  for (int seed = 1; seed <= kCorpus; ++seed) {
    const Dilation d = corpusDilation(seed);
    const Comb c = fromDilation(d, defaultTimes(d.unitaries.size()));
    if (!checkCausalOrder(c).ok) return {false, fmt::format("seed {} not causally ordered", seed)};
    Rng rng(static_cast<std::uint64_t>(5000 + seed));
    const auto& times = c.times().labels();

    std::vector<Instrument> inst;
    for (std::size_t j = 0; j < times.size(); ++j) inst.push_back(randomInstrument(2, 2, 2, rng));
    double total = 0.0;
    std::function<void(std::size_t, MapSequence&)> walk = [&](std::size_t j, MapSequence& m) {
      if (j == times.size()) {
        total += contract(c, m);
        return;
      }
      for (const auto& o : inst[j].outcomes()) {
        m.insert_or_assign(times[j], o.channel);
        walk(j + 1, m);
      }
    };
    MapSequence scratch;
    walk(0, scratch);
    bornDev = std::max(bornDev, std::abs(total - 1.0));

    MapSequence base;
    for (std::size_t j = 0; j < times.size(); ++j) base.emplace(times[j], inst[j].channel(0));
    const ChoiChannel a = inst[0].channel(0);
    const ChoiChannel b = inst[0].channel(1);
    const double alpha = rng.uniform(0.0, 0.5), beta = rng.uniform(0.0, 0.5);
    for (const auto& t : times) {
      MapSequence mix = base, withA = base, withB = base;
      mix.insert_or_assign(t, combine(alpha, a, beta, b));
      withA.insert_or_assign(t, a);
      withB.insert_or_assign(t, b);
      linDev = std::max(linDev, std::abs(contract(c, mix) - alpha * contract(c, withA) -
                                         beta * contract(c, withB)));
    }
  }
  return {bornDev < 1e-9 && linDev < 1e-11,
          fmt::format("Born normalization deviation {:.3g} (limit 1e-9); multilinearity "
                      "deviation {:.3g} (limit 1e-11)",
                      bornDev, linDev)};
}

Outcome urnCriterion() {
  const UrnConfig cfg = UrnConfig::defaults();
  const DistributionFamily idle = urnFamily(cfg, false);
  const DistributionFamily active = urnFamily(cfg, true);
  double worst = 0.0;
  for (const auto* f : {&idle, &active}) {
    const bool intervene = f == &active;
    for (const auto& [times, d] : f->members) {
      for (const auto& [labels, p] : urnTrajectoryOracle(cfg, times, intervene)) {
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < labels.size(); ++k) {
          const auto& a = d.alphabets()[k];
          idx.push_back(static_cast<std::size_t>(std::find(a.begin(), a.end(), labels[k]) -
                                                 a.begin()));
        }
        worst = std::max(worst, std::abs(d.prob(idx) - p));
      }
    }
  }
  const auto ri = checkKET(idle);
  const auto ra = checkKET(active);
  return {ri.pass && !ra.pass && worst < 1e-12,
          fmt::format("idle KET pass: {} (deviation {:.3g}); intervention KET pass: {} "
                      "(deviation {:.17g}); oracle difference {:.3g} (limit 1e-12)",
                      ri.pass, ri.maxDeviation(), ra.pass, ra.maxDeviation(), worst)};
}

}  // namespace

int main() {
  report(1, "Stern-Gerlach reproduction", sternGerlachCriterion);
  report(2, "GET consistency of dilation families", getCriterion);
  report(3, "classical embedding commuting square", commutingSquareCriterion);
  report(4, "classicality discrimination", classicalityCriterion);
  report(5, "contraction vs sequential simulation", oracleCriterion);
  report(6, "Born normalization and multilinearity", invariantsCriterion);
  report(7, "urn families vs trajectory enumeration", urnCriterion);
  fmt::print("{} of 7 criteria passed\n", 7 - failures);
  return failures;
}
