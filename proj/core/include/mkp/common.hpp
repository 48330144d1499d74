// Copyright 2026 The MKPNet Authors
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

#ifndef MKP_COMMON_HPP_
#define MKP_COMMON_HPP_

#include <stdexcept>
#include <string>

#ifdef MKP_DOUBLE_PRECISION
#define MKP_PRECISION_NS f64
#else
#define MKP_PRECISION_NS f32
#endif

#define MKP_NAMESPACE_BEGIN \
  namespace mkp {           \
  inline namespace MKP_PRECISION_NS {
#define MKP_NAMESPACE_END \
  }                       \
  }

MKP_NAMESPACE_BEGIN

#ifdef MKP_DOUBLE_PRECISION
using Real = double;
#else
using Real = float;
#endif

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible tensor shapes or model dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered, or a numeric precondition violated.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent corpus, label, or graph data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or API misuse.
class ConfigError : public Error {
 public:
  using Error::Error;
};

MKP_NAMESPACE_END

#endif  // MKP_COMMON_HPP_
