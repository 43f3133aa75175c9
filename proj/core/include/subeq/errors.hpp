#pragma once

#include <stdexcept>
#include <string>

namespace subeq {

// Bad user input: dimensions, parameters, malformed specs.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Violated internal guarantee (e.g. a Garding root with nonreal residue).
// Maps to exit code 4 in the CLI.
class InternalDefect : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Malformed run configuration. Maps to exit code 3 in the CLI.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Nodal update cannot move: the margin does not depend on the center value
// (e.g. the eikonal constraint under centered first differences).
class FlatUpdateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A nodal bracket ran past the configured value cap.
class ValueCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace subeq
