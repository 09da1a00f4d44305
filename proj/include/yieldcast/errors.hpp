#pragma once

#include <stdexcept>
#include <string>

namespace yieldcast {

// Every error family maps to a distinct process exit code (see tools/).
// Code 0 is success, 1 is reserved for uncategorized failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual int exit_code() const noexcept { return 1; }
};

// Bad CLI arguments or unusable job/train configuration.
struct ConfigError : Error {
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

// Malformed input file content (unparseable row, wrong column count, ...).
struct ParseError : Error {
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 3; }
};

// Structurally valid file violating a documented schema rule
// (duplicate keys, missing required column, wrong vector length, ...).
struct SchemaError : Error {
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 4; }
};

// Calendar lookups that cannot be resolved and feature windows that are
// incomplete, discontinuous, or of the wrong length.
struct WindowError : Error {
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 5; }
};

// Tensor shape mismatches inside the network.
struct ShapeError : Error {
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 6; }
};

// Value outside its mathematical domain (tmax < tmin, zero actual in MAPE,
// constant vector in correlation, negative yield, ...).
struct DomainError : Error {
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 7; }
};

// Non-finite numbers where finite ones are required (diverged training,
// NaN gradients).
struct NumericError : Error {
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 8; }
};

// Filesystem problems: unreadable input, unwritable output.
struct IoError : Error {
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 9; }
};

// API misuse: operations invoked against stale or missing internal state
// (e.g. backward without a training-mode forward cache).
struct StateError : Error {
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 10; }
};

// Too much input data had to be dropped during assembly (missing weather
// or soil beyond the configured threshold).
struct AssemblyError : Error {
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 11; }
};

}  // namespace yieldcast
