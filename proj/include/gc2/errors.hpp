// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace gc2 {

// Base class for all library errors. Each subclass tags one failure domain so
// callers (and the CLI exit-code mapping) can tell user-data problems from bugs.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed container: bad magic, truncated stream, nonsensical header.
class FormatError : public Error {
public:
    using Error::Error;
};

// Well-formed container holding unusable payload (NaN/Inf, wrong value domain).
class DataError : public Error {
public:
    using Error::Error;
};

// Underlying read/write failed.
class IoError : public Error {
public:
    using Error::Error;
};

// Configuration rejected: unknown key, wrong type, out-of-range value.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Operand dimensions disagree with the operation's contract.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Index outside its addressable range.
class IndexError : public Error {
public:
    using Error::Error;
};

// Scalar argument outside its admissible range.
class RangeError : public Error {
public:
    using Error::Error;
};

// Internal budgeting invariant failed; indicates a bug, not bad input.
class AllocationError : public Error {
public:
    using Error::Error;
};

} // namespace gc2
