#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cbt {

// Error families map one-to-one onto process exit codes of the command line
// front end: configuration problems (2), numerical failures (3), I/O (4).
enum class ErrorKind : int { Config = 2, Numerics = 3, Io = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string what)
        : std::runtime_error(std::move(what)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

inline Error config_error(const std::string& what) { return Error(ErrorKind::Config, what); }
inline Error numerics_error(const std::string& what) { return Error(ErrorKind::Numerics, what); }
inline Error io_error(const std::string& what) { return Error(ErrorKind::Io, what); }

} // namespace cbt
