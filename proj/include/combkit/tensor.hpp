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

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "combkit/errors.hpp"

namespace combkit {

using Complex = std::complex<double>;

// Default Hermiticity / positivity tolerance shared by all modules.
inline constexpr double kDefaultTol = 1e-10;

// Default maximum number of entries of any matrix (2^20). Overridden by
// the COMBKIT_DIM_CAP environment variable or setDimensionCap().
inline constexpr std::size_t kDefaultDimensionCap = std::size_t{1} << 20;

std::size_t dimensionCap();
void setDimensionCap(std::size_t cap);

// Dense complex matrix, row-major. Rows and columns are always >= 1 and all
// entries are finite.
class ComplexMatrix {
 public:
  // 1x1 zero.
  ComplexMatrix();
  // rows x cols zero matrix.
  ComplexMatrix(std::size_t rows, std::size_t cols);
  // Takes ownership of row-major data; throws if a value is not finite.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const Complex> values);
  static ComplexMatrix fromRows(
      std::initializer_list<std::initializer_list<Complex>> rows);
  // |v><w|
  static ComplexMatrix outer(std::span<const Complex> v,
                             std::span<const Complex> w);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool isSquare() const noexcept { return rows_ == cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  Complex operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  Complex& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }

  std::span<const Complex> data() const noexcept { return data_; }
  std::span<Complex> data() noexcept { return data_; }

  Complex trace() const;
  ComplexMatrix adjoint() const;
  ComplexMatrix conjugate() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    return a += b;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    return a -= b;
  }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
};

// Matrix product.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

// Largest absolute entrywise difference; throws DimensionError on shape
// mismatch.
double maxAbsDiff(const ComplexMatrix& a, const ComplexMatrix& b);

// Largest absolute off-diagonal entry.
double maxOffDiagonal(const ComplexMatrix& m);

bool isHermitian(const ComplexMatrix& m, double tol = kDefaultTol);

// One tensor factor of a matrix's row (and column) space.
struct Leg {
  std::string label;
  std::size_t dim;

  friend bool operator==(const Leg&, const Leg&) = default;
};

// Ordered tensor factorization of a square matrix's index space. The first
// leg is the most significant digit of the row-major index.
class LegStructure {
 public:
  LegStructure() = default;
  explicit LegStructure(std::vector<Leg> legs);

  const std::vector<Leg>& legs() const noexcept { return legs_; }
  std::size_t totalDim() const noexcept { return total_; }
  std::size_t position(const std::string& label) const;
  bool contains(const std::string& label) const;

  // Structure with only the listed legs, in this structure's order.
  LegStructure without(std::span<const std::string> labels) const;

  friend bool operator==(const LegStructure&, const LegStructure&) = default;

 private:
  std::vector<Leg> legs_;
  std::size_t total_ = 1;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
// Left fold of kron; an empty list yields the 1x1 identity.
ComplexMatrix kronAll(std::span<const ComplexMatrix> factors);

ComplexMatrix partialTrace(const ComplexMatrix& m,
                           const LegStructure& structure,
                           std::span<const std::string> traced);

// Contracts the listed legs against `op`:
//   result[(K),(K')] = sum_{T,T'} op[T,T'] * m[(K,T),(K',T')]
// where T runs over the listed legs in the order given. With op = identity
// this is the partial trace; in general it equals tr_T[(1 (x) op^T) m].
ComplexMatrix contractLegs(const ComplexMatrix& m,
                           const LegStructure& structure,
                           std::span<const std::string> labels,
                           const ComplexMatrix& op);

// Reorders tensor legs; `order` is a permutation of the structure labels.
ComplexMatrix permuteLegs(const ComplexMatrix& m,
                          const LegStructure& structure,
                          std::span<const std::string> order);

// Transpose in the reference basis, no conjugation.
ComplexMatrix basisTranspose(const ComplexMatrix& m);

// Unnormalized |Phi+><Phi+| = sum_{i,j} |ii><jj| on C^d (x) C^d.
ComplexMatrix maxEntangled(std::size_t d);

// Smallest eigenvalue of the Hermitian part of m.
double minEigenvalue(const ComplexMatrix& m);

// Positive semidefinite within tol. Throws ShapeError when m is not square or
// not Hermitian within tol.
bool isPSD(const ComplexMatrix& m, double tol = kDefaultTol);

}  // namespace combkit
