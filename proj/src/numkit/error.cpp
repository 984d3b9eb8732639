#include "dicnn/error.hpp"

namespace dicnn {

std::string_view category_name(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::io: return "io";
        case ErrorCategory::config: return "config";
        case ErrorCategory::numeric: return "numeric";
        case ErrorCategory::data: return "data";
        case ErrorCategory::shape: return "shape";
        case ErrorCategory::state: return "state";
    }
    return "unknown";
}

int exit_code(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::io: return 2;
        case ErrorCategory::config: return 3;
        case ErrorCategory::numeric: return 4;
        case ErrorCategory::data: return 5;
        case ErrorCategory::shape: return 6;
        case ErrorCategory::state: return 7;
    }
    return 1;
}

}  // namespace dicnn
