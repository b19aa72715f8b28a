// Copyright 2026 The scenex Authors
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

#ifndef SCENEX__ERRORS_HPP_
#define SCENEX__ERRORS_HPP_

#include <stdexcept>

namespace scenex
{

/// Malformed or inconsistent scenario/run configuration. CLI exit code 2.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Surrogate factorization failed even after the noise retry. CLI exit code 3.
class FitError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace scenex

#endif  // SCENEX__ERRORS_HPP_
