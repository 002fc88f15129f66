#ifndef CM2PA_ERRORS_HPP
#define CM2PA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cm2pa {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Source-level problem in a machine program file.
struct ParseError : Error {
    ParseError(const std::string& msg, int line, int col)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line), col(col) {}
    int line;
    int col;
};

/// A counter or line value does not fit into its subchunk.
struct CapacityError : Error {
    using Error::Error;
};

/// Bit lookup beyond the materialized prefix of a growing model.
struct AccessError : Error {
    using Error::Error;
};

/// Formula cannot be evaluated or transformed as requested.
struct EvalError : Error {
    using Error::Error;
};

/// A bit model does not follow the chunk layout.
struct MalformedModel : Error {
    using Error::Error;
};

} // namespace cm2pa

#endif
