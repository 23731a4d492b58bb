#pragma once

#include <stdexcept>
#include <string>

namespace cone {

enum class ErrorCode {
    dimension,      // mismatched vector/matrix shapes
    domain,         // argument outside the operation's domain
    numeric_range,  // overflow, underflow or non-finite intermediate
    inconsistency,  // an oracle disagrees with a predicate it relies on
    format,         // malformed input file or config
    io,             // unreadable or unwritable file
};

const char* to_string(ErrorCode code) noexcept;

/// Library-wide exception. The code drives CLI exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace cone
