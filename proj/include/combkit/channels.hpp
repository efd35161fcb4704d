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
#include <functional>
#include <string>
#include <vector>

#include "combkit/tensor.hpp"

namespace combkit {

// A completely positive, trace non-increasing map stored as its
// (unnormalized) Choi matrix
//
//   choi = (M (x) id)[Phi+],   choi[(o,i),(o',i')] = M(|i><i'|)[o,o'],
//
// with the output leg as the most significant index. A trace preserving map
// has trace(choi) == dimIn.
class ChoiChannel {
 public:
  // Validates shape, complete positivity and trace non-increase within tol.
  ChoiChannel(std::size_t dimIn, std::size_t dimOut, ComplexMatrix choi,
              std::string label = {}, double tol = kDefaultTol);

  std::size_t dimIn() const noexcept { return dimIn_; }
  std::size_t dimOut() const noexcept { return dimOut_; }
  const ComplexMatrix& choi() const noexcept { return choi_; }
  const std::string& label() const noexcept { return label_; }

  // Output-leg partial trace, an operator on the input space.
  ComplexMatrix outputTrace() const;
  bool isTracePreserving(double tol = kDefaultTol) const;

  ChoiChannel withLabel(std::string label) const;

  friend bool operator==(const ChoiChannel&, const ChoiChannel&) = default;

 private:
  std::size_t dimIn_;
  std::size_t dimOut_;
  ComplexMatrix choi_;
  std::string label_;
};

using MapAction = std::function<ComplexMatrix(const ComplexMatrix&)>;

// Choi matrix of a linear map given by its action on operators.
ChoiChannel choiFromMapAction(std::size_t dimIn, std::size_t dimOut,
                              const MapAction& action, std::string label = {});

// rho -> tr_in[(1 (x) rho^T) choi]
ComplexMatrix applyChannel(const ChoiChannel& channel, const ComplexMatrix& rho);

// Channel composition: `second` after `first`.
ChoiChannel compose(const ChoiChannel& second, const ChoiChannel& first);

// Weighted sum of two maps with equal dimensions; the result must still be
// CP and trace non-increasing.
ChoiChannel combine(double alpha, const ChoiChannel& a, double beta,
                    const ChoiChannel& b, std::string label = {});

ChoiChannel identityChannel(std::size_t d);
ChoiChannel unitaryChannel(const ComplexMatrix& u, std::string label = {});
// Kraus operators all of shape dimOut x dimIn.
ChoiChannel krausChannel(const std::vector<ComplexMatrix>& kraus,
                         std::string label = {});
// rho -> sigma * tr(rho)
ChoiChannel replacementChannel(std::size_t dimIn, const ComplexMatrix& sigma,
                               std::string label = {});

struct InstrumentOutcome {
  std::string label;
  ChoiChannel channel;

  friend bool operator==(const InstrumentOutcome&,
                         const InstrumentOutcome&) = default;
};

// Finite family of CP maps, one per outcome, summing to a CPTP map.
class Instrument {
 public:
  explicit Instrument(std::vector<InstrumentOutcome> outcomes,
                      double tol = kDefaultTol);

  const std::vector<InstrumentOutcome>& outcomes() const noexcept {
    return outcomes_;
  }
  std::size_t size() const noexcept { return outcomes_.size(); }
  std::size_t dimIn() const { return outcomes_.front().channel.dimIn(); }
  std::size_t dimOut() const { return outcomes_.front().channel.dimOut(); }
  const ChoiChannel& channel(std::size_t k) const {
    return outcomes_.at(k).channel;
  }

  // Sum over outcomes: the CPTP map realized when outcomes are discarded.
  ChoiChannel average() const;

  friend bool operator==(const Instrument&, const Instrument&) = default;

 private:
  std::vector<InstrumentOutcome> outcomes_;
};

// Orthonormal basis with one label per vector.
struct ReferenceBasis {
  std::vector<std::string> labels;
  std::vector<std::vector<Complex>> vectors;

  std::size_t dim() const noexcept { return vectors.size(); }

  // |0>,|1>,... labelled "0","1",...
  static ReferenceBasis computational(std::size_t d);
  // Qubit z basis, labels "up","down".
  static ReferenceBasis z();
  // Qubit x basis, |right> = (|up>+|down>)/sqrt2, labels "right","left".
  static ReferenceBasis x();

  friend bool operator==(const ReferenceBasis&,
                         const ReferenceBasis&) = default;
};

// Throws ValidationError unless the basis is orthonormal within tol and
// complete.
void validateBasis(const ReferenceBasis& basis, double tol = kDefaultTol);

// Outcome k: rho -> <k|rho|k> |k><k|.
Instrument projectiveInstrument(const ReferenceBasis& basis);

// Outcome k: rho -> <k|rho|k> replacements[k]. Replacement states must be
// density matrices of a common dimension.
Instrument replacementInstrument(const ReferenceBasis& basis,
                                 const std::vector<ComplexMatrix>& replacements);

// Throws ValidationError unless rho is PSD with unit trace.
void validateDensityMatrix(const ComplexMatrix& rho, double tol = kDefaultTol);

// Which factor of (input (x) ancilla) is discarded by a generalized identity.
struct TracedSubsystem {
  enum class Position { kFirst, kLast };

  std::size_t dim = 1;
  Position position = Position::kLast;
};

// rho -> tr_B(rho (x) ancilla), with the joint space dimIn*dim(ancilla)
// factored as (B (x) out) for kFirst or (out (x) B) for kLast.
ChoiChannel generalizedIdentity(std::size_t dimIn, std::size_t dimOut,
                                const ComplexMatrix& ancilla,
                                TracedSubsystem traced);

}  // namespace combkit
