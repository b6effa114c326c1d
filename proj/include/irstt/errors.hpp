#pragma once

#include <stdexcept>
#include <string>

namespace irstt {

// Root of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error
{
public:
    using Error::Error;
};

class RankOutOfRange : public Error
{
public:
    using Error::Error;
};

class NumericalFailure : public Error
{
public:
    using Error::Error;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

// Raised by the gradient solvers when the loss blows past the divergence guard.
class Diverged : public Error
{
public:
    using Error::Error;
};

class NonPositiveInput : public Error
{
public:
    using Error::Error;
};

class DivisionByZero : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    ParseError(const std::string& msg, int line, std::string key)
        : Error(msg), line_(line), key_(std::move(key))
    {
    }

    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    int line_;
    std::string key_;
};

class ValidationError : public Error
{
public:
    ValidationError(const std::string& key, const std::string& msg)
        : Error(key + ": " + msg), key_(key)
    {
    }

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class IoError : public Error
{
public:
    using Error::Error;
};

} // namespace irstt
