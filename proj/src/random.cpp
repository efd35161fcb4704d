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

#include "combkit/random.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fmt/format.h>

namespace combkit {

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

Complex Rng::complexNormal() {
  const double re = normal();
  const double im = normal();
  return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
}

std::size_t Rng::index(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

ComplexMatrix randomUnitary(std::size_t d, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) g(r, c) = rng.complexNormal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (Eigen::Index c = 0; c < n; ++c) {
    const Complex diag = r(c, c);
    const double mag = std::abs(diag);
    q.col(c) *= mag > 0.0 ? diag / mag : Complex(1.0);
  }
  ComplexMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out(i, j) = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

ComplexMatrix randomDensityMatrix(std::size_t d, Rng& rng) {
  ComplexMatrix g(d, d);
  for (auto& z : g.data()) z = rng.complexNormal();
  ComplexMatrix rho = matmul(g, g.adjoint());
  const double tr = rho.trace().real();
  rho *= Complex(1.0 / tr);
  // Exact Hermiticity.
  for (std::size_t i = 0; i < d; ++i) {
    rho(i, i) = rho(i, i).real();
    for (std::size_t j = i + 1; j < d; ++j) rho(j, i) = std::conj(rho(i, j));
  }
  return rho;
}

ComplexMatrix randomPureState(std::size_t d, Rng& rng) {
  std::vector<Complex> v(d);
  double norm = 0.0;
  for (auto& z : v) {
    z = rng.complexNormal();
    norm += std::norm(z);
  }
  for (auto& z : v) z /= std::sqrt(norm);
  return ComplexMatrix::outer(v, v);
}

std::vector<ComplexMatrix> randomKraus(std::size_t dimIn, std::size_t dimOut,
                                       std::size_t rank, Rng& rng,
                                       double scale) {
  if (rank == 0 || dimOut * rank < dimIn) {
    throw DimensionError(fmt::format(
        "randomKraus: {} Kraus operators of shape {}x{} cannot form an "
        "isometry",
        rank, dimOut, dimIn));
  }
  const ComplexMatrix u = randomUnitary(dimOut * rank, rng);
  const double s = std::sqrt(scale);
  std::vector<ComplexMatrix> kraus;
  for (std::size_t r = 0; r < rank; ++r) {
    ComplexMatrix k(dimOut, dimIn);
    for (std::size_t o = 0; o < dimOut; ++o) {
      for (std::size_t i = 0; i < dimIn; ++i) k(o, i) = s * u(r * dimOut + o, i);
    }
    kraus.push_back(std::move(k));
  }
  return kraus;
}

ChoiChannel randomChannel(std::size_t dimIn, std::size_t dimOut,
                          std::size_t rank, Rng& rng) {
  return krausChannel(randomKraus(dimIn, dimOut, rank, rng), "random");
}

Instrument randomInstrument(std::size_t d, std::size_t outcomes,
                            std::size_t rank, Rng& rng) {
  const auto kraus = randomKraus(d, d, outcomes * rank, rng);
  std::vector<InstrumentOutcome> out;
  for (std::size_t x = 0; x < outcomes; ++x) {
    std::vector<ComplexMatrix> group(kraus.begin() + static_cast<long>(x * rank),
                                     kraus.begin() + static_cast<long>((x + 1) * rank));
    const std::string label = std::to_string(x);
    out.push_back({label, krausChannel(group, label)});
  }
  return Instrument(std::move(out));
}

Dilation randomDilation(std::size_t systemDim, std::size_t envDim,
                        std::size_t steps, Rng& rng) {
  Dilation d{systemDim, envDim, randomDensityMatrix(systemDim * envDim, rng), {}};
  for (std::size_t j = 0; j < steps; ++j) {
    d.unitaries.push_back(randomUnitary(systemDim * envDim, rng));
  }
  return d;
}

std::vector<double> randomSimplexPoint(std::size_t n, Rng& rng) {
  // Normalized exponentials: uniform on the simplex.
  std::vector<double> p(n);
  double sum = 0.0;
  for (auto& x : p) {
    x = -std::log(1.0 - rng.uniform());
    sum += x;
  }
  for (auto& x : p) x /= sum;
  return p;
}

TimeSet defaultTimes(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t j = 1; j <= n; ++j) labels.push_back(fmt::format("t{}", j));
  return TimeSet(std::move(labels));
}

}  // namespace combkit
