#pragma once

#include <stdexcept>
#include <string>

namespace strokebench {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file. Carries the source line when known (1-based, 0 = n/a).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::string path = {}, std::size_t line = 0)
        : Error(format(msg, path, line)), path_(std::move(path)), line_(line) {}

    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

private:
    static std::string format(const std::string& msg, const std::string& path, std::size_t line) {
        std::string out = msg;
        if (!path.empty()) out += " [" + path + (line ? ":" + std::to_string(line) : "") + "]";
        return out;
    }
    std::string path_;
    std::size_t line_;
};

// Structurally valid input that violates a contract (ordering, ranges, schema).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Degenerate geometry (parallel lines, zero denominators).
class GeometryError : public Error {
public:
    using Error::Error;
};

// Non-finite values or singular systems inside numeric kernels.
class NumericError : public Error {
public:
    using Error::Error;
};

// Bad pipeline / spec configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Filesystem trouble.
class IoError : public Error {
public:
    using Error::Error;
};

// A failure re-thrown by the pipeline with stage / person / stroke context.
class StageError : public Error {
public:
    StageError(std::string stage, std::string person, long stroke, const std::string& what)
        : Error(format(stage, person, stroke, what)),
          stage_(std::move(stage)), person_(std::move(person)), stroke_(stroke) {}

    const std::string& stage() const { return stage_; }
    const std::string& person() const { return person_; }
    long stroke() const { return stroke_; }  // -1 when not stroke-specific

private:
    static std::string format(const std::string& stage, const std::string& person,
                              long stroke, const std::string& what) {
        std::string out = "[stage " + stage;
        if (!person.empty()) out += ", person " + person;
        if (stroke >= 0) out += ", stroke " + std::to_string(stroke);
        out += "] " + what;
        return out;
    }
    std::string stage_;
    std::string person_;
    long stroke_;
};

}  // namespace strokebench
