#pragma once

#include <stdexcept>
#include <string>

namespace linkrank {

/// Malformed input file (bad token, wrong arity, unparsable CSV).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally invalid request: delta referencing unknown nodes/edges,
/// overlapping id universes, dimension mismatches.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad solver configuration: discount outside (0,1), non-probability
/// teleportation vector, nonpositive tolerance.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Dense direct solves refuse graphs above the configured node cap.
class DenseCapError : public std::runtime_error {
public:
    explicit DenseCapError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite value produced mid-iteration. Unreachable for valid inputs.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace linkrank
