#ifndef GERMKG_ERROR_HPP
#define GERMKG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace germkg {

/// Broad failure classes. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
    validation = 1,
    not_found = 2,
    io = 3,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error(ErrorKind::not_found, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

} // namespace germkg

#endif
