#pragma once

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>

namespace topsim {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad parameters or malformed run configuration. CLI exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

/// Bad input data: parse failures, degenerate point sets, size limits.
/// CLI exit code 3.
struct DataError : Error {
    using Error::Error;
};

/// Internal numerical cross-checks disagree (rank vs spectral Betti,
/// transport optimality, symmetry violations). CLI exit code 4.
struct ConsistencyError : Error {
    using Error::Error;
};

/// u_GH requested against an empty generator space; the pipeline decides
/// what to substitute.
struct EmptySpaceError : DataError {
    using DataError::DataError;
};

inline int exit_code_for(const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const ConsistencyError*>(&e)) return 4;
    return 3;
}

/// Non-fatal diagnostics (eigenvalue-gap ambiguity, degenerate Fiedler
/// multiplicity, ...). Replaceable so tests can capture warnings.
inline std::function<void(const std::string&)>& warning_handler() {
    static std::function<void(const std::string&)> handler =
        [](const std::string& msg) { std::cerr << "[warn] " << msg << "\n"; };
    return handler;
}

inline void warn(const std::string& msg) { warning_handler()(msg); }

}  // namespace topsim
