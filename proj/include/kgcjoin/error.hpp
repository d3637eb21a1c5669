#pragma once

#include <stdexcept>
#include <string>

namespace kgcjoin {

enum class ErrorKind {
    Format,        // malformed file header or record
    Data,          // non-finite values, duplicate labels, out-of-range ids
    Length,        // truncated payload or size mismatch
    Parameter,     // invalid argument value
    Dimension,     // vector/matrix shape mismatch
    Io,            // open/read/write failure
    Resource,      // request exceeds a buffer budget
    Precondition,  // caller broke a documented precondition
    Usage,         // bad CLI / config usage
    Verification,  // cross-algorithm results disagree
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace kgcjoin
