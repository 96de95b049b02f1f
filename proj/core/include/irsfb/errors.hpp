// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace irsfb {

/// Shape, size or index arguments that do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// NaN/Inf input, zero norms where a normalization is required, and similar.
class NumericalError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or truncated feedback messages.
class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration or configuration file syntax.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace irsfb
