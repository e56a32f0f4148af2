// Copyright 2026 The trispin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace trispin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: parameters, configuration, dimensions. CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical check did not hold (complex leading eigenvalue, non-unique
// steady state, ill-conditioned eigenbasis). CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Leading eigenvalue of the tilted generator is degenerate, so its
// derivative is not defined by first-order perturbation theory.
class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A central difference stencil contains a point where theta(s) is not
// differentiable. Use one-sided evaluation on either side instead.
class KinkStraddleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace trispin
