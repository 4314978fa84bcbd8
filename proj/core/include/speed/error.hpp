#pragma once

#include <stdexcept>
#include <string>

namespace speed {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input too small or otherwise unusable for the requested operation.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

// A non-finite value appeared during an iterative filter.
class NumericInstabilityError : public Error {
public:
    using Error::Error;
};

// TP/FP scores are undefined when the ground truth has no edge pixels.
class UndefinedScoreError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Wraps a failure raised inside a pipeline stage and records which stage failed.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace speed
