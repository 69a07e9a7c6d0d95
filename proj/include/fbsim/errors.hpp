// SPDX-License-Identifier: Apache-2.0
//
// fbsim: multi-user MIMO downlink simulator with limited channel feedback
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FBSIM_ERRORS_HPP
#define FBSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fbsim {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent configuration (dimensions, bit budgets, file contents).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A request that exceeds an explicit storage/scan guard (e.g. explicit RVQ above 24 bits).
class CapacityError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Zero-forcing was asked to invert a rank-deficient set of channel directions.
class SingularSetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The Lambert-W based optimizer left the region where its argument is >= -1/e.
class InfeasibleRegimeError : public DomainError {
public:
    using DomainError::DomainError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fbsim

#endif
