#pragma once

#include <stdexcept>
#include <string>

namespace tdabands {

// Bad values or broken invariants in otherwise well-formed input.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally malformed text input; message carries the line number.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failures (missing file, unwritable output).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tdabands
