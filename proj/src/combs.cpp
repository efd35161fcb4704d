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

#include "combkit/combs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <set>
#include <stdexcept>

namespace combkit {

// ---------------------------------------------------------------------------
// Time labels

bool TimeLess::operator()(const std::string& a, const std::string& b) const {
  std::size_t i = 0;
  std::size_t j = 0;
  auto isDigit = [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  };
  while (i < a.size() && j < b.size()) {
    if (isDigit(a[i]) && isDigit(b[j])) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && isDigit(a[ie])) ++ie;
      while (je < b.size() && isDigit(b[je])) ++je;
      // Strip leading zeros, then compare by length and digits.
      std::size_t is = i;
      std::size_t js = j;
      while (is + 1 < ie && a[is] == '0') ++is;
      while (js + 1 < je && b[js] == '0') ++js;
      const std::string_view da(a.data() + is, ie - is);
      const std::string_view db(b.data() + js, je - js);
      if (da.size() != db.size()) return da.size() < db.size();
      if (da != db) return da < db;
      if (ie - i != je - j) return ie - i < je - j;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

TimeSet::TimeSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (std::size_t k = 1; k < labels_.size(); ++k) {
    if (!TimeLess{}(labels_[k - 1], labels_[k])) {
      throw ValidationError(fmt::format(
          "time labels must be strictly increasing: '{}' then '{}'",
          labels_[k - 1], labels_[k]));
    }
  }
}

TimeSet TimeSet::fromUnordered(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end(), TimeLess{});
  return TimeSet(std::move(labels));
}

bool TimeSet::contains(const std::string& label) const {
  return std::binary_search(labels_.begin(), labels_.end(), label, TimeLess{});
}

bool TimeSet::isSubsetOf(const TimeSet& other) const {
  return std::all_of(labels_.begin(), labels_.end(),
                     [&](const std::string& t) { return other.contains(t); });
}

TimeSet TimeSet::minus(const TimeSet& other) const {
  std::vector<std::string> rest;
  for (const auto& t : labels_) {
    if (!other.contains(t)) rest.push_back(t);
  }
  return TimeSet(std::move(rest));
}

std::string TimeSet::str() const {
  return fmt::format("{{{}}}", fmt::join(labels_, ","));
}

bool operator<(const TimeSet& a, const TimeSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.labels_.begin(), a.labels_.end(),
                                      b.labels_.begin(), b.labels_.end(),
                                      TimeLess{});
}

std::vector<TimeSet> nonemptySubsets(const TimeSet& ground) {
  const std::size_t n = ground.size();
  if (n >= 63) throw SizeError("too many times to enumerate subsets");
  std::vector<TimeSet> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (std::uint64_t{1} << k)) labels.push_back(ground.labels()[k]);
    }
    out.emplace_back(std::move(labels));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Comb

std::string outLeg(const std::string& time) { return time + ".out"; }
std::string inLeg(const std::string& time) { return time + ".in"; }

LegStructure combLegs(const std::vector<Slot>& slots) {
  std::vector<Leg> legs;
  for (auto it = slots.rbegin(); it != slots.rend(); ++it) {
    legs.push_back({outLeg(it->time), it->dimOut});
    legs.push_back({inLeg(it->time), it->dimIn});
  }
  return LegStructure(std::move(legs));
}

namespace {

TimeSet timesOf(const std::vector<Slot>& slots) {
  std::vector<std::string> labels;
  for (const auto& s : slots) {
    if (s.dimIn == 0 || s.dimOut == 0) {
      throw ShapeError(fmt::format("slot '{}' has zero dimension", s.time));
    }
    labels.push_back(s.time);
  }
  return TimeSet(std::move(labels));
}

}  // namespace

Comb::Comb(std::vector<Slot> slots, ComplexMatrix choi,
           std::map<std::string, ChoiChannel, TimeLess> generalizedIdentities)
    : slots_(std::move(slots)),
      times_(timesOf(slots_)),
      choi_(std::move(choi)),
      legs_(combLegs(slots_)),
      generalizedIdentities_(std::move(generalizedIdentities)) {
  if (!choi_.isSquare() || choi_.rows() != legs_.totalDim()) {
    throw DimensionError(fmt::format(
        "comb Choi matrix is {}x{} but its slots span dimension {}",
        choi_.rows(), choi_.cols(), legs_.totalDim()));
  }
  if (!isHermitian(choi_, kDefaultTol)) {
    throw ValidationError("comb Choi matrix is not Hermitian");
  }
  for (const auto& [time, channel] : generalizedIdentities_) {
    const Slot& s = slot(time);
    if (channel.dimIn() != s.dimIn || channel.dimOut() != s.dimOut) {
      throw DimensionError(fmt::format(
          "generalized identity at '{}' does not match the slot dimensions",
          time));
    }
    if (!channel.isTracePreserving()) {
      throw ValidationError(fmt::format(
          "generalized identity at '{}' is not trace preserving", time));
    }
  }
}

const Slot& Comb::slot(const std::string& time) const {
  for (const auto& s : slots_) {
    if (s.time == time) return s;
  }
  throw LookupError(fmt::format("comb has no slot at time '{}'", time));
}

ChoiChannel Comb::marginalizingMap(const std::string& time) const {
  if (auto it = generalizedIdentities_.find(time);
      it != generalizedIdentities_.end()) {
    return it->second;
  }
  const Slot& s = slot(time);
  if (s.dimIn != s.dimOut) {
    throw LookupError(fmt::format(
        "slot '{}' maps dimension {} to {}; removing it needs a registered "
        "generalized identity",
        time, s.dimIn, s.dimOut));
  }
  return identityChannel(s.dimIn);
}

double contract(const Comb& comb, const MapSequence& maps, double imagTol) {
  if (maps.size() != comb.times().size()) {
    throw DimensionError(fmt::format(
        "contract: comb has {} slots but {} maps were given",
        comb.times().size(), maps.size()));
  }
  std::vector<ComplexMatrix> factors;
  for (auto it = comb.slots().rbegin(); it != comb.slots().rend(); ++it) {
    const auto found = maps.find(it->time);
    if (found == maps.end()) {
      throw LookupError(fmt::format("contract: no map for time '{}'", it->time));
    }
    const ChoiChannel& m = found->second;
    if (m.dimIn() != it->dimIn || m.dimOut() != it->dimOut) {
      throw DimensionError(fmt::format(
          "contract: map at '{}' is {}->{} but the slot is {}->{}", it->time,
          m.dimIn(), m.dimOut(), it->dimIn, it->dimOut));
    }
    factors.push_back(m.choi());
  }
  const ComplexMatrix joint = kronAll(factors);
  // tr[X^T Y] = sum_{a,b} X[a,b] Y[a,b]
  Complex acc = 0.0;
  const auto x = joint.data();
  const auto y = comb.choi().data();
  for (std::size_t k = 0; k < x.size(); ++k) acc += x[k] * y[k];
  if (std::abs(acc.imag()) > imagTol) {
    throw NumericalIntegrityError(fmt::format(
        "contraction has imaginary residue {:.3e}", acc.imag()));
  }
  return acc.real();
}

Comb restrict(const Comb& comb, const TimeSet& subset) {
  if (!subset.isSubsetOf(comb.times())) {
    throw LookupError(fmt::format("restrict: {} is not contained in {}",
                                  subset.str(), comb.times().str()));
  }
  std::vector<std::string> labels;
  std::vector<ComplexMatrix> factors;
  std::vector<Slot> kept;
  std::map<std::string, ChoiChannel, TimeLess> keptGeneralized;
  for (auto it = comb.slots().rbegin(); it != comb.slots().rend(); ++it) {
    if (subset.contains(it->time)) continue;
    labels.push_back(outLeg(it->time));
    labels.push_back(inLeg(it->time));
    factors.push_back(comb.marginalizingMap(it->time).choi());
  }
  for (const auto& s : comb.slots()) {
    if (!subset.contains(s.time)) continue;
    kept.push_back(s);
    if (auto g = comb.generalizedIdentities().find(s.time);
        g != comb.generalizedIdentities().end()) {
      keptGeneralized.emplace(g->first, g->second);
    }
  }
  if (labels.empty()) return comb;
  return Comb(std::move(kept),
              contractLegs(comb.choi(), comb.legs(), labels, kronAll(factors)),
              std::move(keptGeneralized));
}

MapSequence padWithIdentity(const MapSequence& maps, const Comb& comb) {
  return padWithIdentity(maps, comb.times(), comb.slots(),
                         comb.generalizedIdentities());
}

MapSequence padWithIdentity(
    const MapSequence& maps, const TimeSet& fullSet,
    const std::vector<Slot>& slots,
    const std::map<std::string, ChoiChannel, TimeLess>& generalized) {
  for (const auto& [time, map] : maps) {
    if (!fullSet.contains(time)) {
      throw LookupError(fmt::format(
          "padWithIdentity: time '{}' is not in {}", time, fullSet.str()));
    }
  }
  MapSequence padded = maps;
  for (const auto& time : fullSet) {
    if (padded.contains(time)) continue;
    if (auto g = generalized.find(time); g != generalized.end()) {
      padded.emplace(time, g->second);
      continue;
    }
    const auto s = std::find_if(slots.begin(), slots.end(),
                                [&](const Slot& x) { return x.time == time; });
    if (s == slots.end()) {
      throw LookupError(fmt::format(
          "padWithIdentity: no slot dimensions for time '{}'", time));
    }
    if (s->dimIn != s->dimOut) {
      throw LookupError(fmt::format(
          "padWithIdentity: identity at '{}' is undefined for {}->{} without "
          "a generalized identity",
          time, s->dimIn, s->dimOut));
    }
    padded.emplace(time, identityChannel(s->dimIn));
  }
  return padded;
}

// ---------------------------------------------------------------------------
// Constructions

void validateDilation(const Dilation& d, double tol) {
  if (d.systemDim == 0 || d.envDim == 0) {
    throw ShapeError("dilation dimensions must be positive");
  }
  const std::size_t joint = d.systemDim * d.envDim;
  if (d.initialState.rows() != joint || !d.initialState.isSquare()) {
    throw DimensionError(fmt::format(
        "dilation initial state must be {}x{}", joint, joint));
  }
  validateDensityMatrix(d.initialState, tol);
  for (std::size_t j = 0; j < d.unitaries.size(); ++j) {
    const auto& u = d.unitaries[j];
    if (u.rows() != joint || u.cols() != joint) {
      throw DimensionError(fmt::format(
          "dilation unitary {} must be {}x{}", j, joint, joint));
    }
    if (maxAbsDiff(matmul(u.adjoint(), u), ComplexMatrix::identity(joint)) >
        tol) {
      throw ValidationError(fmt::format("dilation propagator {} is not unitary", j));
    }
  }
}

Comb fromDilation(const Dilation& d, const TimeSet& times) {
  validateDilation(d);
  if (d.unitaries.size() != times.size() || times.empty()) {
    throw DimensionError(fmt::format(
        "fromDilation: {} propagators for {} times", d.unitaries.size(),
        times.size()));
  }
  const std::size_t ds = d.systemDim;
  const std::size_t de = d.envDim;
  const std::size_t dse = ds * de;

  // omega lives on (open legs, system, environment); open legs are the slots
  // processed so far, latest first.
  ComplexMatrix omega = d.initialState;
  std::size_t open = 1;
  std::vector<Slot> slots;

  for (std::size_t j = 0; j < times.size(); ++j) {
    // Propagate each (open, open') block: B -> U B U^dagger.
    const ComplexMatrix& u = d.unitaries[j];
    const ComplexMatrix ud = u.adjoint();
    ComplexMatrix block(dse, dse);
    for (std::size_t a = 0; a < open; ++a) {
      for (std::size_t ap = 0; ap < open; ++ap) {
        for (std::size_t r = 0; r < dse; ++r) {
          for (std::size_t c = 0; c < dse; ++c) {
            block(r, c) = omega(a * dse + r, ap * dse + c);
          }
        }
        const ComplexMatrix moved = matmul(matmul(u, block), ud);
        for (std::size_t r = 0; r < dse; ++r) {
          for (std::size_t c = 0; c < dse; ++c) {
            omega(a * dse + r, ap * dse + c) = moved(r, c);
          }
        }
      }
    }
    slots.push_back({times.labels()[j], ds, ds});

    const bool last = j + 1 == times.size();
    if (last) {
      // choi[(o,i,A),(o',i',A')] = delta(o,o') sum_e omega[(A,i,e),(A',i',e)]
      const std::size_t inner = ds * open;
      ComplexMatrix choi(ds * inner, ds * inner);
      for (std::size_t a = 0; a < open; ++a) {
        for (std::size_t ap = 0; ap < open; ++ap) {
          for (std::size_t i = 0; i < ds; ++i) {
            for (std::size_t ip = 0; ip < ds; ++ip) {
              Complex acc = 0.0;
              for (std::size_t e = 0; e < de; ++e) {
                acc += omega(a * dse + i * de + e, ap * dse + ip * de + e);
              }
              for (std::size_t o = 0; o < ds; ++o) {
                choi(o * inner + i * open + a, o * inner + ip * open + ap) = acc;
              }
            }
          }
        }
      }
      return Comb(std::move(slots), std::move(choi));
    }

    // Open the slot: the current system becomes leg in(t_j); a fresh system
    // equal to leg out(t_j) continues.
    // next[(o,i,A,s,e),(o',i',A',s',e')] =
    //     delta(s,o) delta(s',o') omega[(A,i,e),(A',i',e')]
    const std::size_t nextOpen = ds * ds * open;
    ComplexMatrix next(nextOpen * dse, nextOpen * dse);
    auto row = [&](std::size_t o, std::size_t i, std::size_t a, std::size_t s,
                   std::size_t e) {
      return (((o * ds + i) * open + a) * ds + s) * de + e;
    };
    for (std::size_t o = 0; o < ds; ++o) {
      for (std::size_t op = 0; op < ds; ++op) {
        for (std::size_t i = 0; i < ds; ++i) {
          for (std::size_t ip = 0; ip < ds; ++ip) {
            for (std::size_t a = 0; a < open; ++a) {
              for (std::size_t ap = 0; ap < open; ++ap) {
                for (std::size_t e = 0; e < de; ++e) {
                  for (std::size_t ep = 0; ep < de; ++ep) {
                    next(row(o, i, a, o, e), row(op, ip, ap, op, ep)) =
                        omega(a * dse + i * de + e, ap * dse + ip * de + ep);
                  }
                }
              }
            }
          }
        }
      }
    }
    omega = std::move(next);
    open = nextOpen;
  }
  throw std::logic_error("fromDilation: unreachable");
}

Comb fromMarkovChain(const ComplexMatrix& initial,
                     const std::vector<ChoiChannel>& links,
                     std::optional<TimeSet> times) {
  validateDensityMatrix(initial);
  const std::size_t k = links.size() + 1;
  if (!times) {
    std::vector<std::string> labels;
    for (std::size_t j = 1; j <= k; ++j) labels.push_back(fmt::format("t{}", j));
    times = TimeSet(std::move(labels));
  }
  if (times->size() != k) {
    throw DimensionError(fmt::format(
        "fromMarkovChain: {} links need {} times, got {}", links.size(), k,
        times->size()));
  }
  std::vector<Slot> slots;
  std::size_t dim = initial.rows();
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t dimIn = dim;
    std::size_t dimOut = dimIn;
    if (j + 1 < k) {
      const ChoiChannel& link = links[j];
      if (!link.isTracePreserving()) {
        throw ValidationError(fmt::format(
            "fromMarkovChain: link {} is not trace preserving", j));
      }
      dimOut = link.dimIn();
      dim = link.dimOut();
    }
    slots.push_back({times->labels()[j], dimIn, dimOut});
  }
  // Stored order (o_k, i_k, o_{k-1}, ..., i_2, o_1, i_1) splits into
  // 1_{o_k} (x) L_{k-1} (x) ... (x) L_1 (x) rho_0 with each link's Choi
  // on (in(t_{j+1}), out(t_j)).
  std::vector<ComplexMatrix> factors{
      ComplexMatrix::identity(slots.back().dimOut)};
  for (auto it = links.rbegin(); it != links.rend(); ++it) {
    factors.push_back(it->choi());
  }
  factors.push_back(initial);
  return Comb(std::move(slots), kronAll(factors));
}

CausalOrderReport checkCausalOrder(const Comb& comb, double tol) {
  CausalOrderReport report;
  std::vector<Slot> remaining = comb.slots();
  ComplexMatrix current = comb.choi();
  while (!remaining.empty()) {
    const Slot s = remaining.back();
    const LegStructure legs = combLegs(remaining);
    const std::string out = outLeg(s.time);
    const ComplexMatrix reduced = partialTrace(current, legs, {&out, 1}) *
                                  Complex(1.0 / static_cast<double>(s.dimOut));
    const double dev = maxAbsDiff(
        current, kron(ComplexMatrix::identity(s.dimOut), reduced));
    report.deviation = std::max(report.deviation, dev);
    if (dev > tol) {
      report.ok = false;
      report.failedTime = s.time;
      return report;
    }
    std::vector<Leg> reducedLegs(legs.legs().begin() + 1, legs.legs().end());
    const std::string in = inLeg(s.time);
    current = partialTrace(reduced, LegStructure(std::move(reducedLegs)),
                           {&in, 1});
    remaining.pop_back();
  }
  const double dev = std::abs(current(0, 0) - 1.0);
  report.deviation = std::max(report.deviation, dev);
  if (dev > tol) {
    report.ok = false;
    report.failedTime = "normalization";
  }
  return report;
}

}  // namespace combkit
