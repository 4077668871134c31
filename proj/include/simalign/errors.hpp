#pragma once

#include <stdexcept>
#include <string>

namespace simalign {

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedDimension : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};

struct InvalidOperation : std::logic_error {
    using std::logic_error::logic_error;
};

// Halfnormal-gamma parameters with no interior maximum.
struct NoModeError : std::domain_error {
    using std::domain_error::domain_error;
};

struct DegenerateElement : std::domain_error {
    using std::domain_error::domain_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace simalign
