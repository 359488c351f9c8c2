#ifndef CELLDESC_ERRORS_HPP_
#define CELLDESC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace celldesc {

/// Base class for all library errors. The CLI maps the subclasses onto its
/// exit-code taxonomy (1 usage, 2 I/O, 3 parse, 4 validation).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input content. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg, long line = 0)
        : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

/// Structurally valid input that violates a contract (bad schema, empty corpus, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace celldesc

#endif // CELLDESC_ERRORS_HPP_
