#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lupi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Error category, mirrored 1:1 by the C API status codes and the CLI
/// exit-code convention (invalid_argument -> usage, data/io -> data error,
/// numeric -> numerical failure).
enum class ErrorKind {
    invalid_argument,
    data,
    io,
    numeric,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
    throw Error(ErrorKind::invalid_argument, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
    throw Error(ErrorKind::data, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
    throw Error(ErrorKind::io, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
    throw Error(ErrorKind::numeric, msg);
}

/// Formats a double with enough digits for an exact text round-trip.
std::string format_full(double v);

/// Formats a double with the given number of significant digits.
std::string format_sig(double v, int digits);

/// Writes `content` to `path` via a temp file in the same directory plus
/// rename, so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

std::vector<std::string> split(const std::string& line, char delim);

std::string trim(const std::string& s);

bool parse_double(const std::string& text, double& out);

/// Splitmix64 step; used to derive independent RNG streams from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace lupi
