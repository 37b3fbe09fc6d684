#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rcs {

/// Base for every error raised by the toolkit. The CLI maps subclasses
/// to exit codes, so new error types must derive from one of these.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input rejected by a precondition check (non-finite samples, bad ranges).
class InputError : public Error {
public:
    using Error::Error;
};

/// Failure parsing a sweep file. `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message, const std::string& file = {})
        : Error(format(line, message, file)), line_(line), message_(message) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }

private:
    static std::string format(std::size_t line, const std::string& message, const std::string& file) {
        std::string out = file;
        if (line) out += (file.empty() ? "line " : ":") + std::to_string(line);
        return out.empty() ? message : out + ": " + message;
    }

    std::size_t line_;
    std::string message_;
};

class IoError : public Error {
public:
    using Error::Error;
};

struct ValidationIssue {
    std::string band;
    double theta_deg = 0.0;
    double phi_deg = 0.0;
    std::string scenario;
    std::string message;
};

/// Campaign or manifest validation failure, carrying every offending entry.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<ValidationIssue> issues);
    const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ValidationIssue> issues_;
};

/// Raised by an extraction stage. `stage()` names the stage that failed.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace rcs
