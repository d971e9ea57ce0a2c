#pragma once

#include <stdexcept>
#include <string>

namespace deformsim {

// Base type for every error this library raises on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or inconsistent tensor/convolution geometry.
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Malformed input: tensor files and experiment configs. `line` is 1-based
// for config files, 0 when not applicable.
struct ParseError : Error {
    explicit ParseError(const std::string& msg, int line_no = 0) : Error(msg), line(line_no) {}
    int line;
};

// Structurally valid configuration that combines features which cannot run
// together (e.g. a fractional-offset variant on the line buffer).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace deformsim
