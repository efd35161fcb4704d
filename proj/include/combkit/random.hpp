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
#include <cstdint>
#include <random>
#include <vector>

#include "combkit/channels.hpp"
#include "combkit/combs.hpp"
#include "combkit/tensor.hpp"

namespace combkit {

// Seeded source for the randomized constructions. Every draw is a
// deterministic function of the seed and the call sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  Complex complexNormal();
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
// of R's diagonal absorbed into Q.
ComplexMatrix randomUnitary(std::size_t d, Rng& rng);

// Ginibre density matrix G G^dagger / tr(G G^dagger).
ComplexMatrix randomDensityMatrix(std::size_t d, Rng& rng);

// Random pure state |v><v|.
ComplexMatrix randomPureState(std::size_t d, Rng& rng);

// CPTP map from `rank` random Kraus operators (Stinespring isometry).
ChoiChannel randomChannel(std::size_t dimIn, std::size_t dimOut,
                          std::size_t rank, Rng& rng);

// Random Kraus set whose operators sum to a trace non-increasing map with
// total weight `scale` <= 1.
std::vector<ComplexMatrix> randomKraus(std::size_t dimIn, std::size_t dimOut,
                                       std::size_t rank, Rng& rng,
                                       double scale = 1.0);

// Instrument with `outcomes` outcomes on a d-dimensional system, built from
// a random isometry d -> d * outcomes * rank.
Instrument randomInstrument(std::size_t d, std::size_t outcomes,
                            std::size_t rank, Rng& rng);

// Random system-environment model with one propagator per step.
Dilation randomDilation(std::size_t systemDim, std::size_t envDim,
                        std::size_t steps, Rng& rng);

// Random probability vector of length n.
std::vector<double> randomSimplexPoint(std::size_t n, Rng& rng);

// t1..tn
TimeSet defaultTimes(std::size_t n);

}  // namespace combkit
