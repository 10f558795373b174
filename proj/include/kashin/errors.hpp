#pragma once

#include <stdexcept>
#include <string>

namespace kashin {

/// Base for every error this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimensionError : public Error {
public:
    using Error::Error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// Butterfly operators exist only for power-of-two sizes; no silent padding.
class UnsupportedDimensionError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class ResourceLimitError : public Error {
public:
    using Error::Error;
};

class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Base for serialization errors; readers never report garbage as data.
class FormatError : public Error {
public:
    using Error::Error;
};

class BadMagicError : public FormatError {
public:
    using FormatError::FormatError;
};

class CrcError : public FormatError {
public:
    using FormatError::FormatError;
};

class TruncatedError : public FormatError {
public:
    using FormatError::FormatError;
};

class UnsupportedVersionError : public FormatError {
public:
    using FormatError::FormatError;
};

class UnsupportedKindError : public FormatError {
public:
    using FormatError::FormatError;
};

} // namespace kashin
