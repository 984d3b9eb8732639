#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dicnn {

// Every failure the library reports carries one of these categories. The CLI
// maps them to exit codes, see exit_code().
enum class ErrorCategory { io, config, numeric, data, shape, state };

std::string_view category_name(ErrorCategory category);

// 2 = I/O, 3 = config, 4 = numeric failure, 5 = bad input data,
// 6 = shape/compatibility contract, 7 = invalid object state.
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error(ErrorCategory::io, m) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(ErrorCategory::config, m) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error(ErrorCategory::numeric, m) {}
};
struct DataError : Error {
    explicit DataError(const std::string& m) : Error(ErrorCategory::data, m) {}
};
struct ShapeError : Error {
    explicit ShapeError(const std::string& m) : Error(ErrorCategory::shape, m) {}
};
struct StateError : Error {
    explicit StateError(const std::string& m) : Error(ErrorCategory::state, m) {}
};

}  // namespace dicnn
