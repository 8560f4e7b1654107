#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppf {

/// Invalid configuration or precondition violation (bad channel/tap counts,
/// mismatched shapes, out-of-range parameters).
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// FIR input shorter than the tap count.
struct insufficient_history_error : config_error {
    using config_error::config_error;
};

/// Transform size not supported by the fast path.
struct unsupported_size_error : config_error {
    using config_error::config_error;
};

/// Prototype filter whose coefficient sum vanishes; cannot be normalized.
struct degenerate_filter_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or truncated input bytes. Carries the offset of the first
/// byte that could not be decoded.
struct decode_error : std::runtime_error {
    decode_error(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at byte offset " + std::to_string(offset)),
          byte_offset(offset) {}

    std::size_t byte_offset;
};

/// Failure writing to a sink or file.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ppf
