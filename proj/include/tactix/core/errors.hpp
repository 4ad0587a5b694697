// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace tactix {

/// Configuration faults (empty pools, unknown tactics, bad flags); the CLI maps them to exit 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tactix
