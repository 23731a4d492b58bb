#include "cone/errors.hpp"

namespace cone {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::dimension: return "dimension mismatch";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::numeric_range: return "numeric range error";
    case ErrorCode::inconsistency: return "inconsistency";
    case ErrorCode::format: return "format error";
    case ErrorCode::io: return "I/O error";
    }
    return "error";
}

}  // namespace cone
