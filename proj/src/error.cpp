#include "kgcjoin/error.hpp"

namespace kgcjoin {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Format: return "format error";
        case ErrorKind::Data: return "data error";
        case ErrorKind::Length: return "length error";
        case ErrorKind::Parameter: return "parameter error";
        case ErrorKind::Dimension: return "dimension error";
        case ErrorKind::Io: return "I/O error";
        case ErrorKind::Resource: return "resource error";
        case ErrorKind::Precondition: return "precondition violation";
        case ErrorKind::Usage: return "usage error";
        case ErrorKind::Verification: return "verification failure";
    }
    return "error";
}

}  // namespace kgcjoin
