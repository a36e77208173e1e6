// Copyright 2026 The detpower Authors
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

#ifndef DETPOWER_ERROR_HPP
#define DETPOWER_ERROR_HPP

#include <stdexcept>
#include <string>

namespace detpower {

/// Shapes that do not fit together: mismatched dimensions, incomplete trees.
struct StructuralError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A value outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A computation that would exceed a configured size cap.
struct ResourceError : std::runtime_error {
    ResourceError(std::string cap_name, const std::string &what)
        : std::runtime_error(what), cap(std::move(cap_name)) {}
    std::string cap;
};

/// The operation exists but not for this kind of input (e.g. a non-commuting POVM).
struct UnsupportedError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed external input (JSON files).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace detpower

#endif
