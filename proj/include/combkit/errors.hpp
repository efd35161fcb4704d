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

#include <stdexcept>
#include <string>

namespace combkit {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A requested matrix would exceed the configured entry cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Wrong shape: non-square where square is required, non-Hermitian, etc.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Dimensions of two operands do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Unknown leg label, time label not in a set, subset not contained.
class LookupError : public Error {
 public:
  using Error::Error;
};

// A value violates a domain invariant (not PSD, not trace preserving,
// basis not orthonormal, distribution not normalized, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A result that should be real carries a non-negligible imaginary part.
class NumericalIntegrityError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized input. `path()` is a JSON pointer to the first
// offending element.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace combkit
