#pragma once

#include <stdexcept>
#include <string>

namespace adlink {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid arguments or configuration values.
class UsageError : public Error {
public:
    using Error::Error;
};

/// A pipeline stage was asked to run before the stage producing its inputs.
class PrerequisiteError : public Error {
public:
    PrerequisiteError(std::string stage, const std::string& what)
        : Error(what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace adlink
