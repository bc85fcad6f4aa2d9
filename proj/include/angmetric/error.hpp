// Copyright 2026 The angmetric Authors.
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

namespace angmetric {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments violate a documented precondition (shape, range, parity).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The dataset cannot satisfy a sampler's constraints.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, zero-norm normalization, training divergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed feature or model file.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace angmetric
