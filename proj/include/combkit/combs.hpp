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
#include "combkit/tensor.hpp"

namespace combkit {

// Natural order on time labels: digit runs compare numerically, so "t2"
// precedes "t10".
struct TimeLess {
  bool operator()(const std::string& a, const std::string& b) const;
};

// Strictly increasing list of distinct time labels.
class TimeSet {
 public:
  TimeSet() = default;
  // Labels must already be strictly increasing under TimeLess.
  explicit TimeSet(std::vector<std::string> labels);
  // Sorts; rejects duplicates.
  static TimeSet fromUnordered(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  bool contains(const std::string& label) const;
  bool isSubsetOf(const TimeSet& other) const;
  TimeSet minus(const TimeSet& other) const;

  auto begin() const { return labels_.begin(); }
  auto end() const { return labels_.end(); }

  // "{t1,t3}"
  std::string str() const;

  friend bool operator==(const TimeSet&, const TimeSet&) = default;
  // Shorter sets first, then lexicographic under TimeLess.
  friend bool operator<(const TimeSet& a, const TimeSet& b);

 private:
  std::vector<std::string> labels_;
};

// Nonempty subsets of `ground`, ordered by TimeSet's operator<.
std::vector<TimeSet> nonemptySubsets(const TimeSet& ground);

// Dimensions of one intervention slot. dimIn is the space handed to the
// intervention (H^(1)), dimOut the space it returns (H^(2)).
struct Slot {
  std::string time;
  std::size_t dimIn;
  std::size_t dimOut;

  friend bool operator==(const Slot&, const Slot&) = default;
};

// One CP map per time label.
using MapSequence = std::map<std::string, ChoiChannel, TimeLess>;

// Leg labels used inside a comb's Choi matrix.
std::string outLeg(const std::string& time);
std::string inLeg(const std::string& time);

inline constexpr const char* kLegOrder =
    "descending time; within a slot (out, in)";

// Multi-time process in Choi form. Slots are listed in ascending time; the
// Choi matrix is stored over
//
//   H_out(t_k) (x) H_in(t_k) (x) ... (x) H_out(t_1) (x) H_in(t_1)
//
// (latest time most significant) so that a sequence of maps contracts as
// tr[(M_k^T (x) ... (x) M_1^T) choi].
//
// Slots whose dimIn != dimOut may carry a generalized identity used when the
// slot is marginalized away.
class Comb {
 public:
  // Checks dimensions and Hermiticity only; causal ordering is reported by
  // checkCausalOrder.
  Comb(std::vector<Slot> slots, ComplexMatrix choi,
       std::map<std::string, ChoiChannel, TimeLess> generalizedIdentities = {});

  const TimeSet& times() const noexcept { return times_; }
  const std::vector<Slot>& slots() const noexcept { return slots_; }
  const Slot& slot(const std::string& time) const;
  const ComplexMatrix& choi() const noexcept { return choi_; }
  const LegStructure& legs() const noexcept { return legs_; }
  const std::map<std::string, ChoiChannel, TimeLess>& generalizedIdentities()
      const noexcept {
    return generalizedIdentities_;
  }

  // Map inserted at `time` when the slot is marginalized: the registered
  // generalized identity, else the identity channel. Throws LookupError for
  // an unequal-dimension slot with nothing registered.
  ChoiChannel marginalizingMap(const std::string& time) const;

  friend bool operator==(const Comb&, const Comb&) = default;

 private:
  std::vector<Slot> slots_;
  TimeSet times_;
  ComplexMatrix choi_;
  LegStructure legs_;
  std::map<std::string, ChoiChannel, TimeLess> generalizedIdentities_;
};

// Leg structure of a comb over the given slots (ascending time order in).
LegStructure combLegs(const std::vector<Slot>& slots);

// Probability tr[(M_k^T (x) ... (x) M_1^T) choi]. Throws
// NumericalIntegrityError if the raw trace has imaginary part above
// imagTol.
double contract(const Comb& comb, const MapSequence& maps,
                double imagTol = kDefaultTol);

// Comb on `subset` obtained by inserting the marginalizing map at every
// removed time.
Comb restrict(const Comb& comb, const TimeSet& subset);

// Extends `maps` to every slot of `comb` by inserting marginalizing maps.
MapSequence padWithIdentity(const MapSequence& maps, const Comb& comb);

// Same, for a bare time set with slot dimensions; generalized identities are
// looked up in `generalized` for unequal-dimension slots.
MapSequence padWithIdentity(
    const MapSequence& maps, const TimeSet& fullSet,
    const std::vector<Slot>& slots,
    const std::map<std::string, ChoiChannel, TimeLess>& generalized = {});

// System-environment model: the propagator unitaries[j] acts on
// system (x) environment right before the intervention at the j-th time;
// the environment is discarded after the last time.
struct Dilation {
  std::size_t systemDim;
  std::size_t envDim;
  ComplexMatrix initialState;
  std::vector<ComplexMatrix> unitaries;

  friend bool operator==(const Dilation&, const Dilation&) = default;
};

void validateDilation(const Dilation& d, double tol = kDefaultTol);

Comb fromDilation(const Dilation& d, const TimeSet& times);

// Memoryless comb: initial state at the first time, links[j] carries the
// output of time j to the input of time j+1. Time labels default to
// t1..tk.
Comb fromMarkovChain(const ComplexMatrix& initial,
                     const std::vector<ChoiChannel>& links,
                     std::optional<TimeSet> times = std::nullopt);

struct CausalOrderReport {
  bool ok = true;
  // Time whose slot first violates the recursive trace condition, or empty.
  std::string failedTime;
  // Largest residual encountered.
  double deviation = 0.0;
};

// Recursive condition: choi_k == 1_out(t_k) (x) tr_out(t_k)[choi_k]/d, then
// choi_{k-1} = tr_{out,in}(t_k)[choi_k]/d, down to a unit scalar. This is
// equivalent to "no CPTP choice at a later time affects earlier statistics".
CausalOrderReport checkCausalOrder(const Comb& comb, double tol = kDefaultTol);

}  // namespace combkit
