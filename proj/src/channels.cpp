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

#include "combkit/channels.hpp"

#include <cmath>
#include <fmt/format.h>
#include <set>

namespace combkit {

namespace {

LegStructure choiLegs(std::size_t dimIn, std::size_t dimOut) {
  return LegStructure({{"out", dimOut}, {"in", dimIn}});
}

}  // namespace

ChoiChannel::ChoiChannel(std::size_t dimIn, std::size_t dimOut,
                         ComplexMatrix choi, std::string label, double tol)
    : dimIn_(dimIn),
      dimOut_(dimOut),
      choi_(std::move(choi)),
      label_(std::move(label)) {
  if (dimIn_ == 0 || dimOut_ == 0) {
    throw ShapeError("channel dimensions must be positive");
  }
  if (!choi_.isSquare() || choi_.rows() != dimIn_ * dimOut_) {
    throw DimensionError(fmt::format(
        "channel '{}': Choi matrix must be {}x{} for dimIn={} dimOut={}, got "
        "{}x{}",
        label_, dimIn_ * dimOut_, dimIn_ * dimOut_, dimIn_, dimOut_,
        choi_.rows(), choi_.cols()));
  }
  if (!isHermitian(choi_, tol)) {
    throw ValidationError(
        fmt::format("channel '{}': Choi matrix is not Hermitian", label_));
  }
  if (minEigenvalue(choi_) < -tol) {
    throw ValidationError(fmt::format(
        "channel '{}': map is not completely positive", label_));
  }
  const ComplexMatrix slack = ComplexMatrix::identity(dimIn_) - outputTrace();
  if (minEigenvalue(slack) < -tol) {
    throw ValidationError(
        fmt::format("channel '{}': map increases trace", label_));
  }
}

ComplexMatrix ChoiChannel::outputTrace() const {
  const std::string out = "out";
  return partialTrace(choi_, choiLegs(dimIn_, dimOut_), {&out, 1});
}

bool ChoiChannel::isTracePreserving(double tol) const {
  return maxAbsDiff(outputTrace(), ComplexMatrix::identity(dimIn_)) <= tol;
}

ChoiChannel ChoiChannel::withLabel(std::string label) const {
  ChoiChannel copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

ChoiChannel choiFromMapAction(std::size_t dimIn, std::size_t dimOut,
                              const MapAction& action, std::string label) {
  ComplexMatrix choi(dimOut * dimIn, dimOut * dimIn);
  for (std::size_t i = 0; i < dimIn; ++i) {
    for (std::size_t ip = 0; ip < dimIn; ++ip) {
      ComplexMatrix unit(dimIn, dimIn);
      unit(i, ip) = 1.0;
      const ComplexMatrix image = action(unit);
      if (image.rows() != dimOut || image.cols() != dimOut) {
        throw DimensionError(fmt::format(
            "map action returned {}x{}, expected {}x{}", image.rows(),
            image.cols(), dimOut, dimOut));
      }
      for (std::size_t o = 0; o < dimOut; ++o) {
        for (std::size_t op = 0; op < dimOut; ++op) {
          choi(o * dimIn + i, op * dimIn + ip) = image(o, op);
        }
      }
    }
  }
  return ChoiChannel(dimIn, dimOut, std::move(choi), std::move(label));
}

ComplexMatrix applyChannel(const ChoiChannel& channel,
                           const ComplexMatrix& rho) {
  const std::size_t din = channel.dimIn();
  const std::size_t dout = channel.dimOut();
  if (rho.rows() != din || rho.cols() != din) {
    throw DimensionError(fmt::format(
        "applyChannel '{}': state is {}x{}, channel expects {}x{}",
        channel.label(), rho.rows(), rho.cols(), din, din));
  }
  const ComplexMatrix& c = channel.choi();
  ComplexMatrix out(dout, dout);
  for (std::size_t o = 0; o < dout; ++o) {
    for (std::size_t op = 0; op < dout; ++op) {
      Complex acc = 0.0;
      for (std::size_t i = 0; i < din; ++i) {
        for (std::size_t ip = 0; ip < din; ++ip) {
          acc += c(o * din + i, op * din + ip) * rho(i, ip);
        }
      }
      out(o, op) = acc;
    }
  }
  return out;
}

ChoiChannel compose(const ChoiChannel& second, const ChoiChannel& first) {
  if (first.dimOut() != second.dimIn()) {
    throw DimensionError(fmt::format(
        "compose: '{}' outputs dimension {} but '{}' expects {}", first.label(),
        first.dimOut(), second.label(), second.dimIn()));
  }
  return choiFromMapAction(
      first.dimIn(), second.dimOut(),
      [&](const ComplexMatrix& rho) {
        return applyChannel(second, applyChannel(first, rho));
      },
      second.label() + "*" + first.label());
}

ChoiChannel combine(double alpha, const ChoiChannel& a, double beta,
                    const ChoiChannel& b, std::string label) {
  if (a.dimIn() != b.dimIn() || a.dimOut() != b.dimOut()) {
    throw DimensionError("combine: channels differ in dimensions");
  }
  return ChoiChannel(a.dimIn(), a.dimOut(),
                     alpha * a.choi() + beta * b.choi(), std::move(label));
}

ChoiChannel identityChannel(std::size_t d) {
  return ChoiChannel(d, d, maxEntangled(d), "id");
}

ChoiChannel unitaryChannel(const ComplexMatrix& u, std::string label) {
  if (!u.isSquare()) throw ShapeError("unitaryChannel: matrix must be square");
  if (maxAbsDiff(matmul(u.adjoint(), u),
                 ComplexMatrix::identity(u.rows())) > kDefaultTol) {
    throw ValidationError("unitaryChannel: matrix is not unitary");
  }
  return krausChannel({u}, std::move(label));
}

ChoiChannel krausChannel(const std::vector<ComplexMatrix>& kraus,
                         std::string label) {
  if (kraus.empty()) throw ValidationError("krausChannel: no Kraus operators");
  const std::size_t dout = kraus.front().rows();
  const std::size_t din = kraus.front().cols();
  // choi = sum_k vec(K_k) vec(K_k)^dagger with vec(K)[(o,i)] = K[o,i].
  ComplexMatrix choi(dout * din, dout * din);
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != din) {
      throw DimensionError("krausChannel: Kraus operators differ in shape");
    }
    choi += ComplexMatrix::outer(k.data(), k.data());
  }
  return ChoiChannel(din, dout, std::move(choi), std::move(label));
}

ChoiChannel replacementChannel(std::size_t dimIn, const ComplexMatrix& sigma,
                               std::string label) {
  validateDensityMatrix(sigma);
  return ChoiChannel(dimIn, sigma.rows(),
                     kron(sigma, ComplexMatrix::identity(dimIn)),
                     std::move(label));
}

// ---------------------------------------------------------------------------
// Instruments

Instrument::Instrument(std::vector<InstrumentOutcome> outcomes, double tol)
    : outcomes_(std::move(outcomes)) {
  if (outcomes_.empty()) throw ValidationError("instrument has no outcomes");
  std::set<std::string> labels;
  for (const auto& o : outcomes_) {
    if (o.channel.dimIn() != dimIn() || o.channel.dimOut() != dimOut()) {
      throw DimensionError("instrument outcomes differ in dimensions");
    }
    if (!labels.insert(o.label).second) {
      throw ValidationError(
          fmt::format("duplicate instrument outcome label '{}'", o.label));
    }
  }
  if (!average().isTracePreserving(tol)) {
    throw ValidationError("instrument outcomes do not sum to a CPTP map");
  }
}

ChoiChannel Instrument::average() const {
  ComplexMatrix sum(dimIn() * dimOut(), dimIn() * dimOut());
  for (const auto& o : outcomes_) sum += o.channel.choi();
  // Summed Choi may exceed the trace bound by rounding only.
  return ChoiChannel(dimIn(), dimOut(), std::move(sum), "average", 1e-8);
}

ReferenceBasis ReferenceBasis::computational(std::size_t d) {
  ReferenceBasis b;
  for (std::size_t k = 0; k < d; ++k) {
    b.labels.push_back(std::to_string(k));
    std::vector<Complex> v(d);
    v[k] = 1.0;
    b.vectors.push_back(std::move(v));
  }
  return b;
}

ReferenceBasis ReferenceBasis::z() {
  return {{"up", "down"}, {{1.0, 0.0}, {0.0, 1.0}}};
}

ReferenceBasis ReferenceBasis::x() {
  const double h = 1.0 / std::sqrt(2.0);
  return {{"right", "left"}, {{h, h}, {h, -h}}};
}

void validateBasis(const ReferenceBasis& basis, double tol) {
  const std::size_t d = basis.vectors.size();
  if (d == 0) throw ValidationError("basis is empty");
  if (basis.labels.size() != d) {
    throw ValidationError("basis needs exactly one label per vector");
  }
  std::set<std::string> labels(basis.labels.begin(), basis.labels.end());
  if (labels.size() != d) throw ValidationError("basis labels must be unique");
  for (const auto& v : basis.vectors) {
    if (v.size() != d) {
      throw ValidationError(fmt::format(
          "basis of {} vectors must live in dimension {}", d, d));
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      Complex ip = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        ip += std::conj(basis.vectors[a][k]) * basis.vectors[b][k];
      }
      const double expected = a == b ? 1.0 : 0.0;
      if (std::abs(ip - expected) > tol) {
        throw ValidationError("basis vectors are not orthonormal");
      }
    }
  }
}

Instrument projectiveInstrument(const ReferenceBasis& basis) {
  validateBasis(basis);
  std::vector<ComplexMatrix> states;
  for (const auto& v : basis.vectors) states.push_back(ComplexMatrix::outer(v, v));
  return replacementInstrument(basis, states);
}

Instrument replacementInstrument(const ReferenceBasis& basis,
                                 const std::vector<ComplexMatrix>& replacements) {
  validateBasis(basis);
  if (replacements.size() != basis.dim()) {
    throw ValidationError(fmt::format(
        "replacementInstrument: {} outcomes but {} replacement states",
        basis.dim(), replacements.size()));
  }
  const std::size_t dout = replacements.front().rows();
  std::vector<InstrumentOutcome> outcomes;
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    validateDensityMatrix(replacements[k]);
    if (replacements[k].rows() != dout) {
      throw DimensionError("replacement states differ in dimension");
    }
    // rho -> <k|rho|k> sigma_k has Choi sigma_k (x) |conj k><conj k|.
    std::vector<Complex> conjVec(basis.vectors[k].size());
    for (std::size_t i = 0; i < conjVec.size(); ++i) {
      conjVec[i] = std::conj(basis.vectors[k][i]);
    }
    outcomes.push_back(
        {basis.labels[k],
         ChoiChannel(basis.dim(), dout,
                     kron(replacements[k], ComplexMatrix::outer(conjVec, conjVec)),
                     basis.labels[k])});
  }
  return Instrument(std::move(outcomes));
}

void validateDensityMatrix(const ComplexMatrix& rho, double tol) {
  if (!rho.isSquare()) throw ValidationError("density matrix must be square");
  if (!isHermitian(rho, tol)) {
    throw ValidationError("density matrix is not Hermitian");
  }
  if (minEigenvalue(rho) < -tol) {
    throw ValidationError("density matrix is not positive semidefinite");
  }
  if (std::abs(rho.trace() - 1.0) > tol) {
    throw ValidationError("density matrix must have unit trace");
  }
}

ChoiChannel generalizedIdentity(std::size_t dimIn, std::size_t dimOut,
                                const ComplexMatrix& ancilla,
                                TracedSubsystem traced) {
  validateDensityMatrix(ancilla);
  const std::size_t joint = dimIn * ancilla.rows();
  if (traced.dim == 0 || joint != dimOut * traced.dim) {
    throw DimensionError(fmt::format(
        "generalizedIdentity: input {} x ancilla {} does not factor as output "
        "{} x traced {}",
        dimIn, ancilla.rows(), dimOut, traced.dim));
  }
  const bool first = traced.position == TracedSubsystem::Position::kFirst;
  const LegStructure legs =
      first ? LegStructure({{"B", traced.dim}, {"out", dimOut}})
            : LegStructure({{"out", dimOut}, {"B", traced.dim}});
  const std::string b = "B";
  return choiFromMapAction(
      dimIn, dimOut,
      [&](const ComplexMatrix& rho) {
        return partialTrace(kron(rho, ancilla), legs, {&b, 1});
      },
      "generalized-id");
}

}  // namespace combkit
