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

#include "combkit/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <limits>
#include <set>

namespace combkit {

namespace {

std::size_t initialCap() {
  if (const char* env = std::getenv("COMBKIT_DIM_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      return static_cast<std::size_t>(v);
    }
  }
  return kDefaultDimensionCap;
}

std::atomic<std::size_t>& capStorage() {
  static std::atomic<std::size_t> cap{initialCap()};
  return cap;
}

std::size_t checkedEntries(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw ShapeError(fmt::format("matrix dimensions must be positive, got {}x{}",
                                 rows, cols));
  }
  const std::size_t cap = dimensionCap();
  if (rows > cap / cols || rows * cols > cap) {
    throw SizeError(fmt::format(
        "{}x{} matrix exceeds the dimension cap of {} entries", rows, cols,
        cap));
  }
  return rows * cols;
}

using EigenRowMajor =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMajor>;
using MutMap = Eigen::Map<EigenRowMajor>;

ConstMap asEigen(const ComplexMatrix& m) {
  return ConstMap(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}

void requireSquare(const ComplexMatrix& m, const char* what) {
  if (!m.isSquare()) {
    throw ShapeError(fmt::format("{}: matrix must be square, got {}x{}", what,
                                 m.rows(), m.cols()));
  }
}

void requireStructure(const ComplexMatrix& m, const LegStructure& s,
                      const char* what) {
  requireSquare(m, what);
  if (s.totalDim() != m.rows()) {
    throw DimensionError(fmt::format(
        "{}: leg structure has total dimension {} but matrix is {}x{}", what,
        s.totalDim(), m.rows(), m.cols()));
  }
}

std::vector<std::size_t> strides(const LegStructure& s) {
  const auto& legs = s.legs();
  std::vector<std::size_t> out(legs.size());
  std::size_t stride = 1;
  for (std::size_t k = legs.size(); k-- > 0;) {
    out[k] = stride;
    stride *= legs[k].dim;
  }
  return out;
}

// Index offsets for every multi-index over the given leg positions; the first
// listed leg is the most significant digit.
std::vector<std::size_t> offsets(const LegStructure& s,
                                 std::span<const std::size_t> positions) {
  const auto st = strides(s);
  std::vector<std::size_t> out{0};
  for (std::size_t pos : positions) {
    const std::size_t dim = s.legs()[pos].dim;
    std::vector<std::size_t> next;
    next.reserve(out.size() * dim);
    for (std::size_t base : out) {
      for (std::size_t d = 0; d < dim; ++d) next.push_back(base + d * st[pos]);
    }
    out = std::move(next);
  }
  return out;
}

std::vector<std::size_t> positionsOf(const LegStructure& s,
                                     std::span<const std::string> labels) {
  std::vector<std::size_t> pos;
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw LookupError(fmt::format("leg label '{}' listed twice", l));
    }
    pos.push_back(s.position(l));
  }
  return pos;
}

std::vector<std::size_t> complementPositions(
    const LegStructure& s, std::span<const std::size_t> removed) {
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < s.legs().size(); ++k) {
    if (std::find(removed.begin(), removed.end(), k) == removed.end()) {
      kept.push_back(k);
    }
  }
  return kept;
}

}  // namespace

std::size_t dimensionCap() { return capStorage().load(); }

void setDimensionCap(std::size_t cap) {
  if (cap == 0) throw SizeError("dimension cap must be positive");
  capStorage().store(cap);
}

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix() : rows_(1), cols_(1), data_(1) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(checkedEntries(rows, cols)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != checkedEntries(rows, cols)) {
    throw ShapeError(fmt::format("{}x{} matrix needs {} entries, got {}", rows,
                                 cols, rows * cols, data_.size()));
  }
  for (const auto& z : data_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw ValidationError("matrix entries must be finite");
    }
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::fromRows(
    std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<Complex> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged row list");
    data.insert(data.end(), row.begin(), row.end());
  }
  return ComplexMatrix(r, c, std::move(data));
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> v,
                                   std::span<const Complex> w) {
  ComplexMatrix m(v.size(), w.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * std::conj(w[j]);
  }
  return m;
}

Complex ComplexMatrix::trace() const {
  requireSquare(*this, "trace");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  }
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionError("matrix sum: shape mismatch");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionError("matrix difference: shape mismatch");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : data_) z *= scale;
  return *this;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError(fmt::format("matmul: {}x{} times {}x{}", a.rows(),
                                     a.cols(), b.rows(), b.cols()));
  }
  ComplexMatrix out(a.rows(), b.cols());
  MutMap(out.data().data(), static_cast<Eigen::Index>(out.rows()),
         static_cast<Eigen::Index>(out.cols())).noalias() =
      asEigen(a) * asEigen(b);
  return out;
}

double maxAbsDiff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(fmt::format("cannot compare {}x{} with {}x{}",
                                     a.rows(), a.cols(), b.rows(), b.cols()));
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, std::abs(a.data()[k] - b.data()[k]));
  }
  return worst;
}

double maxOffDiagonal(const ComplexMatrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (i != j) worst = std::max(worst, std::abs(m(i, j)));
    }
  }
  return worst;
}

bool isHermitian(const ComplexMatrix& m, double tol) {
  if (!m.isSquare()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// LegStructure

LegStructure::LegStructure(std::vector<Leg> legs) : legs_(std::move(legs)) {
  std::set<std::string> labels;
  for (const auto& leg : legs_) {
    if (leg.dim == 0) {
      throw ShapeError(fmt::format("leg '{}' has zero dimension", leg.label));
    }
    if (!labels.insert(leg.label).second) {
      throw LookupError(fmt::format("duplicate leg label '{}'", leg.label));
    }
    if (total_ > dimensionCap() / leg.dim) {
      throw SizeError("leg structure exceeds the dimension cap");
    }
    total_ *= leg.dim;
  }
}

std::size_t LegStructure::position(const std::string& label) const {
  for (std::size_t k = 0; k < legs_.size(); ++k) {
    if (legs_[k].label == label) return k;
  }
  throw LookupError(fmt::format("unknown leg label '{}'", label));
}

bool LegStructure::contains(const std::string& label) const {
  return std::any_of(legs_.begin(), legs_.end(),
                     [&](const Leg& l) { return l.label == label; });
}

LegStructure LegStructure::without(std::span<const std::string> labels) const {
  for (const auto& l : labels) position(l);
  std::vector<Leg> kept;
  for (const auto& leg : legs_) {
    if (std::find(labels.begin(), labels.end(), leg.label) == labels.end()) {
      kept.push_back(leg);
    }
  }
  return LegStructure(std::move(kept));
}

// ---------------------------------------------------------------------------
// Tensor operations

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t cap = dimensionCap();
  if (a.size() > cap / b.size()) {
    throw SizeError(fmt::format(
        "kron of {}x{} and {}x{} exceeds the dimension cap of {} entries",
        a.rows(), a.cols(), b.rows(), b.cols(), cap));
  }
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i1 = 0; i1 < a.rows(); ++i1) {
    for (std::size_t j1 = 0; j1 < a.cols(); ++j1) {
      const Complex s = a(i1, j1);
      if (s == Complex{}) continue;
      for (std::size_t i2 = 0; i2 < b.rows(); ++i2) {
        Complex* row = &out(i1 * b.rows() + i2, j1 * b.cols());
        for (std::size_t j2 = 0; j2 < b.cols(); ++j2) row[j2] = s * b(i2, j2);
      }
    }
  }
  return out;
}

ComplexMatrix kronAll(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

ComplexMatrix partialTrace(const ComplexMatrix& m,
                           const LegStructure& structure,
                           std::span<const std::string> traced) {
  requireStructure(m, structure, "partialTrace");
  const auto tracedPos = positionsOf(structure, traced);
  const auto keptPos = complementPositions(structure, tracedPos);
  const auto keptOff = offsets(structure, keptPos);
  const auto tracedOff = offsets(structure, tracedPos);

  const std::size_t n = keptOff.size();
  ComplexMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      Complex acc = 0.0;
      for (std::size_t t : tracedOff) acc += m(keptOff[r] + t, keptOff[c] + t);
      out(r, c) = acc;
    }
  }
  return out;
}

ComplexMatrix contractLegs(const ComplexMatrix& m,
                           const LegStructure& structure,
                           std::span<const std::string> labels,
                           const ComplexMatrix& op) {
  requireStructure(m, structure, "contractLegs");
  const auto contractedPos = positionsOf(structure, labels);
  const auto keptPos = complementPositions(structure, contractedPos);
  const auto keptOff = offsets(structure, keptPos);
  const auto contractedOff = offsets(structure, contractedPos);
  if (op.rows() != contractedOff.size() || !op.isSquare()) {
    throw DimensionError(fmt::format(
        "contractLegs: operator is {}x{} but contracted legs have dimension {}",
        op.rows(), op.cols(), contractedOff.size()));
  }

  // Nonzero entries of op; identity-like operators are sparse.
  struct Entry {
    std::size_t rowOff, colOff;
    Complex value;
  };
  std::vector<Entry> entries;
  for (std::size_t a = 0; a < op.rows(); ++a) {
    for (std::size_t b = 0; b < op.cols(); ++b) {
      if (op(a, b) != Complex{}) {
        entries.push_back({contractedOff[a], contractedOff[b], op(a, b)});
      }
    }
  }

  const std::size_t n = keptOff.size();
  ComplexMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      Complex acc = 0.0;
      for (const auto& e : entries) {
        acc += e.value * m(keptOff[r] + e.rowOff, keptOff[c] + e.colOff);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

ComplexMatrix permuteLegs(const ComplexMatrix& m,
                          const LegStructure& structure,
                          std::span<const std::string> order) {
  requireStructure(m, structure, "permuteLegs");
  if (order.size() != structure.legs().size()) {
    throw LookupError("permuteLegs: order must list every leg exactly once");
  }
  const auto pos = positionsOf(structure, order);
  // Offsets in the old index space enumerated in the new digit order.
  const auto map = offsets(structure, pos);
  const std::size_t n = map.size();
  ComplexMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) out(r, c) = m(map[r], map[c]);
  }
  return out;
}

ComplexMatrix basisTranspose(const ComplexMatrix& m) {
  requireSquare(m, "basisTranspose");
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  }
  return out;
}

ComplexMatrix maxEntangled(std::size_t d) {
  if (d == 0) throw ShapeError("maxEntangled: dimension must be positive");
  ComplexMatrix out(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out(i * d + i, j * d + j) = 1.0;
  }
  return out;
}

double minEigenvalue(const ComplexMatrix& m) {
  requireSquare(m, "minEigenvalue");
  const Eigen::MatrixXcd a = asEigen(m);
  const Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalIntegrityError("Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues().minCoeff();
}

bool isPSD(const ComplexMatrix& m, double tol) {
  requireSquare(m, "isPSD");
  if (!isHermitian(m, tol)) {
    throw ShapeError("isPSD: matrix is not Hermitian within tolerance");
  }
  return minEigenvalue(m) >= -tol;
}

}  // namespace combkit
