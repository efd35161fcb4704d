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

#include "combkit/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <set>

#include "combkit/random.hpp"

namespace combkit {

std::string toString(Provenance p) {
  switch (p) {
    case Provenance::kPaper:
      return "PAPER";
    case Provenance::kTrivial:
      return "TRIVIAL";
    case Provenance::kDerived:
      return "DERIVED";
  }
  return "?";
}

std::vector<ExpectationResult> Scenario::evaluate() const {
  std::vector<ExpectationResult> out;
  for (const auto& e : expectations) {
    ExpectationResult r{e.query,     e.expected, 0.0,   e.provenance,
                        e.tolerance, e.oracle,   false};
    r.actual = e.compute();
    r.pass = std::abs(r.actual - r.expected) <= e.tolerance;
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

double flag(bool b) { return b ? 1.0 : 0.0; }

const PairDeviation& findPair(const ConsistencyReport& r, const TimeSet& sub,
                              const TimeSet& super) {
  for (const auto& p : r.pairs) {
    if (p.sub == sub && p.super == super) return p;
  }
  throw LookupError(fmt::format("report has no pair ({}, {})", sub.str(),
                                super.str()));
}

TimeSet ts(std::initializer_list<const char*> labels) {
  return TimeSet(std::vector<std::string>(labels.begin(), labels.end()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Stern-Gerlach

Comb sternGerlachComb() {
  const double h = 1.0 / std::sqrt(2.0);
  const std::vector<Complex> plus{h, h};
  const ComplexMatrix id = ComplexMatrix::identity(2);
  const Dilation d{2, 1, ComplexMatrix::outer(plus, plus), {id, id, id}};
  return fromDilation(d, ts({"t1", "t2", "t3"}));
}

BasisMap sternGerlachBases() {
  return {{"t1", ReferenceBasis::z()},
          {"t2", ReferenceBasis::x()},
          {"t3", ReferenceBasis::z()}};
}

Scenario sternGerlach() {
  Scenario s;
  s.name = "stern-gerlach";
  s.description =
      "Spin-1/2 prepared in |+>, measured along z, x, z at t1, t2, t3 with no "
      "dynamics in between.";
  const Comb full = sternGerlachComb();
  const TimeSet all = full.times();
  const TimeSet outer = ts({"t1", "t3"});
  const CombFamily combs(all, {{all, full}, {outer, restrict(full, outer)}});
  const BasisMap bases = sternGerlachBases();
  const DistributionFamily measured = idleReduction(combs, bases);
  s.combFamilies.emplace("combs", combs);
  s.distributionFamilies.emplace("measured", measured);
  s.bases.emplace("combs", bases);

  const Instrument jz = projectiveInstrument(ReferenceBasis::z());
  const Instrument jx = projectiveInstrument(ReferenceBasis::x());
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t c = 0; c < 2; ++c) {
        MapSequence maps{{"t1", jz.channel(a)},
                         {"t2", jx.channel(b)},
                         {"t3", jz.channel(c)}};
        s.expectations.push_back(
            {fmt::format("P({},{},{}|Jz,Jx,Jz)", jz.outcomes()[a].label,
                         jx.outcomes()[b].label, jz.outcomes()[c].label),
             0.125, Provenance::kPaper, 1e-10, "",
             [full, maps] { return contract(full, maps); }});
      }
    }
  }
  s.expectations.push_back(
      {"sum_t2 P(up,*,up|Jz,Jx,Jz)", 0.25, Provenance::kPaper, 1e-10, "",
       [full, jz, jx] {
         double sum = 0.0;
         for (std::size_t b = 0; b < 2; ++b) {
           sum += contract(full, {{"t1", jz.channel(0)},
                                  {"t2", jx.channel(b)},
                                  {"t3", jz.channel(0)}});
         }
         return sum;
       }});
  s.expectations.push_back(
      {"P_{t1,t3}(up,up|Jz,Jz) via restrict", 0.5, Provenance::kPaper, 1e-10,
       "", [full, jz, outer] {
         return contract(restrict(full, outer),
                         {{"t1", jz.channel(0)}, {"t3", jz.channel(0)}});
       }});
  s.expectations.push_back(
      {"KET deviation ({t1,t3},{t1,t2,t3})", 0.25, Provenance::kPaper, 1e-10,
       "", [measured, outer, all] {
         return findPair(checkKET(measured), outer, all).deviation;
       }});
  s.expectations.push_back({"isClassical(z,x,z) pass", 0.0,
                            Provenance::kPaper, 0.0, "",
                            [combs, bases] {
                              return flag(isClassical(combs, bases).pass);
                            }});
  s.expectations.push_back({"isClassical(z,x,z) witness direct", 0.5,
                            Provenance::kPaper, 1e-10, "",
                            [combs, bases] {
                              return isClassical(combs, bases).witness->direct;
                            }});
  s.expectations.push_back(
      {"isClassical(z,x,z) witness marginal", 0.25, Provenance::kPaper, 1e-10,
       "", [combs, bases] {
         return isClassical(combs, bases).witness->marginal;
       }});
  s.expectations.push_back({"GET max deviation", 0.0, Provenance::kTrivial,
                            1e-10, "", [combs] {
                              return checkGET(combs).maxDeviation();
                            }});
  s.expectations.push_back({"causal order of the 3-step comb", 1.0,
                            Provenance::kTrivial, 0.0, "",
                            [full] { return flag(checkCausalOrder(full).ok); }});
  return s;
}

// ---------------------------------------------------------------------------
// Urn

UrnConfig UrnConfig::defaults() {
  UrnConfig cfg;
  cfg.colors = {"yellow", "blue", "red", "green", "white"};
  cfg.initial = {{"yellow", 1}, {"blue", 1}};
  cfg.dropTime = "t2";
  cfg.dropColor = "red";
  cfg.replacements = {{"t1", {{"yellow", "green"}}},
                      {"t2", {{"blue", "white"}}},
                      {"t3", {{"red", "blue"}}}};
  cfg.times = ts({"t1", "t2", "t3"});
  return cfg;
}

void validateUrn(const UrnConfig& cfg) {
  const std::set<std::string> colors(cfg.colors.begin(), cfg.colors.end());
  if (colors.empty() || colors.size() != cfg.colors.size()) {
    throw ValidationError("urn colors must be nonempty and unique");
  }
  auto known = [&](const std::string& c, const char* what) {
    if (!colors.contains(c)) {
      throw ValidationError(fmt::format("urn {} uses unknown color '{}'", what, c));
    }
  };
  for (const auto& [c, n] : cfg.initial) {
    known(c, "initial content");
    if (n < 0) throw ValidationError("urn ball counts must be nonnegative");
  }
  if (!cfg.dropColor.empty()) {
    known(cfg.dropColor, "drop rule");
    if (!cfg.times.contains(cfg.dropTime)) {
      throw ValidationError(fmt::format("urn drop time '{}' is not a draw time",
                                        cfg.dropTime));
    }
  }
  for (const auto& [t, rule] : cfg.replacements) {
    if (!cfg.times.contains(t)) {
      throw ValidationError(fmt::format("urn rule at unknown time '{}'", t));
    }
    for (const auto& [from, to] : rule) {
      known(from, "replacement rule");
      known(to, "replacement rule");
    }
  }
}

namespace {

std::size_t colorIndex(const UrnConfig& cfg, const std::string& c) {
  return static_cast<std::size_t>(
      std::find(cfg.colors.begin(), cfg.colors.end(), c) - cfg.colors.begin());
}

std::string replaced(const UrnConfig& cfg, const std::string& time,
                     const std::string& color) {
  const auto rule = cfg.replacements.find(time);
  if (rule == cfg.replacements.end()) return color;
  const auto it = rule->second.find(color);
  return it == rule->second.end() ? color : it->second;
}

}  // namespace

JointDistribution urnDistribution(const UrnConfig& cfg, const TimeSet& drawTimes,
                                  bool intervene) {
  validateUrn(cfg);
  if (!drawTimes.isSubsetOf(cfg.times)) {
    throw LookupError("urn draw times must be within the urn's times");
  }
  const std::size_t nc = cfg.colors.size();
  using Counts = std::vector<int>;
  using Outcomes = std::vector<std::size_t>;
  std::map<std::pair<Counts, Outcomes>, double> states;
  Counts init(nc, 0);
  for (const auto& [c, n] : cfg.initial) init[colorIndex(cfg, c)] = n;
  states[{init, {}}] = 1.0;

  for (const auto& t : cfg.times) {
    std::map<std::pair<Counts, Outcomes>, double> next;
    for (const auto& [key, p] : states) {
      Counts counts = key.first;
      if (t == cfg.dropTime && !cfg.dropColor.empty()) {
        ++counts[colorIndex(cfg, cfg.dropColor)];
      }
      if (!drawTimes.contains(t)) {
        next[{counts, key.second}] += p;
        continue;
      }
      int total = 0;
      for (int n : counts) total += n;
      if (total == 0) {
        throw ValidationError(fmt::format("urn is empty at draw time '{}'", t));
      }
      for (std::size_t c = 0; c < nc; ++c) {
        if (counts[c] == 0) continue;
        Counts after = counts;
        if (intervene) {
          --after[c];
          ++after[colorIndex(cfg, replaced(cfg, t, cfg.colors[c]))];
        }
        Outcomes o = key.second;
        o.push_back(c);
        next[{after, o}] += p * counts[c] / total;
      }
    }
    states = std::move(next);
  }

  std::vector<std::vector<std::string>> alphabets(drawTimes.size(), cfg.colors);
  std::size_t total = 1;
  for (std::size_t j = 0; j < drawTimes.size(); ++j) total *= nc;
  std::vector<double> probs(total, 0.0);
  for (const auto& [key, p] : states) {
    std::size_t idx = 0;
    for (std::size_t c : key.second) idx = idx * nc + c;
    probs[idx] += p;
  }
  return JointDistribution(drawTimes, std::move(alphabets), std::move(probs));
}

DistributionFamily urnFamily(const UrnConfig& cfg, bool intervene) {
  std::map<TimeSet, JointDistribution> full;
  for (const auto& subset : nonemptySubsets(cfg.times)) {
    full.emplace(subset, urnDistribution(cfg, subset, intervene));
  }
  // Colors seen at each time in any member.
  std::map<std::string, std::set<std::size_t>, TimeLess> support;
  for (const auto& [key, d] : full) {
    for (std::size_t flat = 0; flat < d.probs().size(); ++flat) {
      if (d.probs()[flat] <= 0.0) continue;
      const auto outcome = d.outcomeAt(flat);
      for (std::size_t j = 0; j < key.size(); ++j) {
        support[key.labels()[j]].insert(outcome[j]);
      }
    }
  }
  std::map<TimeSet, JointDistribution> trimmed;
  for (const auto& [key, d] : full) {
    std::vector<std::vector<std::string>> alphabets;
    std::vector<std::vector<std::size_t>> keep;
    for (const auto& t : key) {
      std::vector<std::size_t> idx(support[t].begin(), support[t].end());
      std::vector<std::string> labels;
      for (std::size_t c : idx) labels.push_back(cfg.colors[c]);
      alphabets.push_back(std::move(labels));
      keep.push_back(std::move(idx));
    }
    std::size_t total = 1;
    for (const auto& k : keep) total *= k.size();
    std::vector<double> probs(total);
    std::vector<std::size_t> outcome(key.size());
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rest = flat;
      for (std::size_t j = key.size(); j-- > 0;) {
        outcome[j] = keep[j][rest % keep[j].size()];
        rest /= keep[j].size();
      }
      probs[flat] = d.prob(outcome);
    }
    trimmed.emplace(key, JointDistribution(key, std::move(alphabets),
                                           std::move(probs)));
  }
  return DistributionFamily(cfg.times, std::move(trimmed));
}

std::map<std::vector<std::string>, double> urnTrajectoryOracle(
    const UrnConfig& cfg, const TimeSet& drawTimes, bool intervene) {
  validateUrn(cfg);
  std::vector<std::string> balls;
  for (const auto& c : cfg.colors) {
    const auto it = cfg.initial.find(c);
    for (int n = 0; it != cfg.initial.end() && n < it->second; ++n) {
      balls.push_back(c);
    }
  }
  std::map<std::vector<std::string>, double> out;
  std::vector<std::string> drawn;
  const auto& times = cfg.times.labels();
  std::function<void(std::size_t, std::vector<std::string>, double)> walk =
      [&](std::size_t step, std::vector<std::string> urnBalls, double weight) {
        if (step == times.size()) {
          out[drawn] += weight;
          return;
        }
        const std::string& t = times[step];
        if (t == cfg.dropTime && !cfg.dropColor.empty()) {
          urnBalls.push_back(cfg.dropColor);
        }
        if (!drawTimes.contains(t)) {
          walk(step + 1, urnBalls, weight);
          return;
        }
        for (std::size_t b = 0; b < urnBalls.size(); ++b) {
          std::vector<std::string> after = urnBalls;
          if (intervene) after[b] = replaced(cfg, t, urnBalls[b]);
          drawn.push_back(urnBalls[b]);
          walk(step + 1, after, weight / static_cast<double>(urnBalls.size()));
          drawn.pop_back();
        }
      };
  walk(0, balls, 1.0);
  return out;
}

namespace {

// Largest |P(outcome) - oracle(outcome)| over both supports.
double oracleDistance(const JointDistribution& d,
                      const std::map<std::vector<std::string>, double>& oracle) {
  double worst = 0.0;
  double covered = 0.0;
  for (std::size_t flat = 0; flat < d.probs().size(); ++flat) {
    const auto idx = d.outcomeAt(flat);
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      labels.push_back(d.alphabets()[j][idx[j]]);
    }
    const auto it = oracle.find(labels);
    const double expected = it == oracle.end() ? 0.0 : it->second;
    if (it != oracle.end()) covered += it->second;
    worst = std::max(worst, std::abs(d.probs()[flat] - expected));
  }
  // Oracle mass on outcomes missing from the alphabets.
  return std::max(worst, std::abs(1.0 - covered));
}

// checkKET of the family rebuilt from the trajectory oracle.
double oracleKetDeviation(const UrnConfig& cfg, const DistributionFamily& f,
                          bool intervene) {
  std::map<TimeSet, JointDistribution> members;
  for (const auto& [key, d] : f.members) {
    const auto oracle = urnTrajectoryOracle(cfg, key, intervene);
    std::vector<double> probs(d.probs().size(), 0.0);
    for (std::size_t flat = 0; flat < probs.size(); ++flat) {
      const auto idx = d.outcomeAt(flat);
      std::vector<std::string> labels;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        labels.push_back(d.alphabets()[j][idx[j]]);
      }
      const auto it = oracle.find(labels);
      probs[flat] = it == oracle.end() ? 0.0 : it->second;
    }
    members.emplace(key, JointDistribution(key, d.alphabets(), std::move(probs)));
  }
  return checkKET(DistributionFamily(f.ground, std::move(members))).maxDeviation();
}

}  // namespace

Scenario urn(const UrnConfig& cfg) {
  Scenario s;
  s.name = "urn";
  s.description =
      "Drawing colored balls from an urn at t1..t3 with a ball dropping in "
      "before one draw; idle draws put the ball back, interventions replace "
      "it by rule.";
  const DistributionFamily idle = urnFamily(cfg, false);
  const DistributionFamily intervened = urnFamily(cfg, true);
  s.distributionFamilies.emplace("idle", idle);
  s.distributionFamilies.emplace("intervention", intervened);

  std::map<TimeSet, Comb> embedded;
  BasisMap bases;
  for (const auto& [key, d] : idle.members) {
    embedded.emplace(key, classicalEmbed(d));
    for (const auto& t : key) {
      bases.emplace(t, ReferenceBasis::computational(d.alphabet(t).size()));
    }
  }
  const CombFamily embeddedFamily(idle.ground, std::move(embedded));
  s.combFamilies.emplace("idle-embedded", embeddedFamily);
  s.bases.emplace("idle-embedded", bases);

  const std::string oracleName = "ball-by-ball trajectory enumeration";
  s.expectations.push_back({"idle: checkKET pass", 1.0, Provenance::kTrivial,
                            0.0, "",
                            [idle] { return flag(checkKET(idle).pass); }});
  s.expectations.push_back({"idle: checkKET max deviation", 0.0,
                            Provenance::kTrivial, 1e-12, "",
                            [idle] { return checkKET(idle).maxDeviation(); }});
  s.expectations.push_back(
      {"intervention: checkKET pass", 0.0, Provenance::kDerived, 0.0,
       oracleName, [intervened] { return flag(checkKET(intervened).pass); }});
  s.expectations.push_back(
      {"intervention: checkKET max deviation",
       oracleKetDeviation(cfg, intervened, true), Provenance::kDerived, 1e-12,
       oracleName,
       [intervened] { return checkKET(intervened).maxDeviation(); }});
  s.expectations.push_back(
      {"idle: max distance to oracle", 0.0, Provenance::kDerived, 1e-12,
       oracleName, [cfg, idle] {
         double worst = 0.0;
         for (const auto& [key, d] : idle.members) {
           worst = std::max(worst,
                            oracleDistance(d, urnTrajectoryOracle(cfg, key, false)));
         }
         return worst;
       }});
  s.expectations.push_back(
      {"intervention: max distance to oracle", 0.0, Provenance::kDerived, 1e-12,
       oracleName, [cfg, intervened] {
         double worst = 0.0;
         for (const auto& [key, d] : intervened.members) {
           worst = std::max(worst,
                            oracleDistance(d, urnTrajectoryOracle(cfg, key, true)));
         }
         return worst;
       }});
  s.expectations.push_back(
      {"idle embedded: isClassical pass", 1.0, Provenance::kDerived, 0.0,
       "classicalEmbed + per-outcome marginal check",
       [embeddedFamily, bases] {
         return flag(isClassical(embeddedFamily, bases).pass);
       }});
  return s;
}

// ---------------------------------------------------------------------------
// Random dilations

Scenario randomDilationFamily(std::uint64_t seed, std::size_t systemDim,
                              std::size_t envDim, std::size_t steps) {
  Rng rng(seed);
  const Dilation dil = randomDilation(systemDim, envDim, steps, rng);
  const Comb comb = fromDilation(dil, defaultTimes(steps));
  Scenario s;
  s.name = "random-dilation";
  s.description = fmt::format(
      "Random system (d={}) + environment (d={}) unitary dynamics over {} "
      "steps, seed {}; full restriction family.",
      systemDim, envDim, steps, seed);
  const CombFamily family = restrictionFamily(comb);
  s.combFamilies.emplace("restrictions", family);

  std::vector<Instrument> instruments;
  for (std::size_t j = 0; j < steps; ++j) {
    instruments.push_back(randomInstrument(systemDim, 2, 1, rng));
  }
  s.expectations.push_back({"GET max deviation", 0.0, Provenance::kDerived,
                            1e-10, "restriction of a single comb",
                            [family] { return checkGET(family).maxDeviation(); }});
  s.expectations.push_back({"causal order", 1.0, Provenance::kTrivial, 0.0, "",
                            [comb] { return flag(checkCausalOrder(comb).ok); }});
  s.expectations.push_back(
      {"Born normalization over random instruments", 1.0, Provenance::kTrivial,
       1e-9, "", [comb, instruments] {
         double sum = 0.0;
         const std::size_t k = instruments.size();
         std::size_t total = std::size_t{1} << k;
         for (std::size_t mask = 0; mask < total; ++mask) {
           MapSequence maps;
           for (std::size_t j = 0; j < k; ++j) {
             maps.emplace(comb.times().labels()[j],
                          instruments[j].channel((mask >> j) & 1U));
           }
           sum += contract(comb, maps);
         }
         return sum;
       }});
  return s;
}

// ---------------------------------------------------------------------------
// Dephasing Markov chains

DephasingModel randomDephasingModel(std::uint64_t seed, std::size_t steps,
                                    const ReferenceBasis& basis) {
  validateBasis(basis);
  if (steps == 0) throw ValidationError("dephasing chain needs at least one step");
  Rng rng(seed);
  const std::size_t d = basis.dim();
  DephasingModel m;
  m.basis = basis;
  // Weight >= 0.7 on the first basis state keeps the state away from the
  // maximally mixed point.
  m.initialWeights = randomSimplexPoint(d, rng);
  for (std::size_t i = 0; i < d; ++i) {
    m.initialWeights[i] = 0.3 * m.initialWeights[i] + (i == 0 ? 0.7 : 0.0);
  }
  for (std::size_t j = 0; j + 1 < steps; ++j) {
    std::vector<std::vector<double>> t(d, std::vector<double>(d));
    for (std::size_t from = 0; from < d; ++from) {
      const auto col = randomSimplexPoint(d, rng);
      for (std::size_t to = 0; to < d; ++to) {
        t[to][from] = 0.5 * col[to] + (to == from ? 0.5 : 0.0);
      }
    }
    m.transitions.push_back(std::move(t));
    m.mixing.push_back(rng.uniform(0.1, 0.5));
  }
  return m;
}

Comb dephasingComb(const DephasingModel& model, bool coherent) {
  const ReferenceBasis& b = model.basis;
  const std::size_t d = b.dim();
  std::vector<ComplexMatrix> projectors;
  for (const auto& v : b.vectors) projectors.push_back(ComplexMatrix::outer(v, v));

  ComplexMatrix initial(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    initial += projectors[i] * Complex(model.initialWeights[i]);
  }

  // Fourier unitary in the reference basis: sum_jk w^{jk}/sqrt(d) |j><k|.
  ComplexMatrix fourier(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(j * k) /
                           static_cast<double>(d);
      fourier += ComplexMatrix::outer(b.vectors[j], b.vectors[k]) *
                 (std::polar(1.0, phase) / std::sqrt(static_cast<double>(d)));
    }
  }

  std::vector<ChoiChannel> links;
  for (std::size_t j = 0; j < model.transitions.size(); ++j) {
    const auto& t = model.transitions[j];
    const double p = model.mixing[j];
    auto action = [&](const ComplexMatrix& in) {
      const ComplexMatrix rho =
          coherent ? matmul(matmul(fourier, in), fourier.adjoint()) : in;
      ComplexMatrix out = rho * Complex(1.0 - p);
      for (std::size_t from = 0; from < d; ++from) {
        // <from|rho|from>
        Complex w = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
          for (std::size_t c = 0; c < d; ++c) {
            w += std::conj(b.vectors[from][r]) * rho(r, c) * b.vectors[from][c];
          }
        }
        for (std::size_t to = 0; to < d; ++to) {
          out += projectors[to] * (p * t[to][from] * w);
        }
      }
      return out;
    };
    links.push_back(choiFromMapAction(d, d, action,
                                      coherent ? "fourier-dephasing" : "dephasing"));
  }
  return fromMarkovChain(initial, links, defaultTimes(model.transitions.size() + 1));
}

std::vector<double> dephasingChainOracle(const DephasingModel& model) {
  const std::size_t d = model.basis.dim();
  const std::size_t k = model.transitions.size() + 1;
  std::size_t total = 1;
  for (std::size_t j = 0; j < k; ++j) total *= d;
  std::vector<double> probs(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::vector<std::size_t> path(k);
    std::size_t rest = flat;
    for (std::size_t j = k; j-- > 0;) {
      path[j] = rest % d;
      rest /= d;
    }
    double p = model.initialWeights[path[0]];
    for (std::size_t j = 0; j + 1 < k; ++j) {
      const double stay = path[j + 1] == path[j] ? 1.0 - model.mixing[j] : 0.0;
      p *= stay + model.mixing[j] * model.transitions[j][path[j + 1]][path[j]];
    }
    probs[flat] = p;
  }
  return probs;
}

Scenario dephasingMarkov(std::uint64_t seed, std::size_t steps,
                         const ReferenceBasis& basis) {
  const DephasingModel model = randomDephasingModel(seed, steps, basis);
  const Comb classical = dephasingComb(model, false);
  const Comb control = dephasingComb(model, true);
  const BasisMap bases = uniformBasis(classical.times(), basis);
  const CombFamily classicalFamily = restrictionFamily(classical);
  const CombFamily controlFamily = restrictionFamily(control);

  Scenario s;
  s.name = "dephasing-markov";
  s.description = fmt::format(
      "Markov chain of partially dephasing classical links over {} steps "
      "(seed {}), diagonal initial state; control inserts the basis Fourier "
      "unitary before every link.",
      steps, seed);
  s.combFamilies.emplace("dephasing", classicalFamily);
  s.combFamilies.emplace("control", controlFamily);
  s.bases.emplace("dephasing", bases);
  s.bases.emplace("control", bases);

  const std::string chainOracle = "classical chain enumeration";
  s.expectations.push_back(
      {"dephasing: isClassical pass", 1.0, Provenance::kDerived, 0.0,
       chainOracle, [classicalFamily, bases] {
         return flag(isClassical(classicalFamily, bases).pass);
       }});
  s.expectations.push_back(
      {"dephasing: max |P - chain oracle|", 0.0, Provenance::kDerived, 1e-12,
       chainOracle, [classicalFamily, bases, model] {
         const auto reduced = idleReduction(classicalFamily, bases);
         const auto& full = reduced.members.at(reduced.ground);
         const auto oracle = dephasingChainOracle(model);
         double worst = 0.0;
         for (std::size_t k = 0; k < oracle.size(); ++k) {
           worst = std::max(worst, std::abs(full.probs()[k] - oracle[k]));
         }
         return worst;
       }});
  // Coherence created after t_j only shows up when some later time is left
  // unmeasured and a time after that is measured, so fewer than three steps
  // cannot tell the control apart from a classical chain.
  const bool separable = steps >= 3;
  s.expectations.push_back(
      {"control: isClassical pass", separable ? 0.0 : 1.0, Provenance::kDerived,
       0.0,
       separable ? "direct evaluation of both sides of the marginal condition"
                 : "diagonal state at every unmeasured time for fewer than "
                   "three steps",
       [controlFamily, bases] {
         return flag(isClassical(controlFamily, bases).pass);
       }});
  s.expectations.push_back({"dephasing: checkGET pass", 1.0,
                            Provenance::kTrivial, 0.0, "",
                            [classicalFamily] {
                              return flag(checkGET(classicalFamily).pass);
                            }});
  s.expectations.push_back({"control: checkGET pass", 1.0, Provenance::kTrivial,
                            0.0, "", [controlFamily] {
                              return flag(checkGET(controlFamily).pass);
                            }});
  return s;
}

// ---------------------------------------------------------------------------
// Registry

std::vector<std::string> scenarioNames() {
  return {"stern-gerlach", "urn", "random-dilation", "dephasing-markov"};
}

Scenario buildScenario(const std::string& name, const ScenarioParams& params) {
  if (name == "stern-gerlach") return sternGerlach();
  if (name == "urn") return urn();
  if (name == "random-dilation") {
    return randomDilationFamily(params.seed, params.systemDim, params.envDim,
                                params.steps);
  }
  if (name == "dephasing-markov") {
    return dephasingMarkov(params.seed, params.steps, params.basis);
  }
  throw LookupError(fmt::format("unknown scenario '{}'; known: {}", name,
                                fmt::join(scenarioNames(), ", ")));
}

}  // namespace combkit
