#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace sdet {

inline constexpr const char* kVersion = "sdet 0.1.0";

// Error taxonomy used across the library. Contract violations are caller
// bugs, config errors are bad setup, state errors are out-of-order use.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractError(msg);
}
inline void require_config(bool cond, const std::string& msg) {
    if (!cond) throw ConfigError(msg);
}
inline void require_state(bool cond, const std::string& msg) {
    if (!cond) throw StateError(msg);
}
inline void require_finite(double x, const std::string& what) {
    if (!std::isfinite(x)) throw NumericError("non-finite value in " + what);
}

}  // namespace sdet
