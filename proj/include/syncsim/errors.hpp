#pragma once

#include <stdexcept>
#include <string>

namespace syncsim {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Arithmetic left the representable range (seconds overflow, delta overflow).
class RangeError : public Error {
public:
    using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

// Events presented out of order (e.g. a PPS edge earlier than the last one).
class SequencingError : public Error {
public:
    using Error::Error;
};

// Invalid configuration (non-divisor trigger rate, duplicate line id, bad window).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed input that could not be parsed (framing, syntax).
class ParseError : public Error {
public:
    using Error::Error;
};

// Input parsed but failed an integrity check (NMEA checksum mismatch).
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Scenario loader errors, one class per failure mode so callers can
// distinguish a missing file from a typo.
class ScenarioError : public Error {
public:
    using Error::Error;
};

class ScenarioFileError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

class ScenarioSyntaxError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

class ScenarioUnknownKeyError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

class ScenarioValueError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

} // namespace syncsim
