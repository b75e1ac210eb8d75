#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace capstrip {

/// Malformed or inconsistent user input (files, quote sets, configuration).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input error tied to a location inside a delimited text file.
class ParseError : public InputError {
public:
    ParseError(std::string file, std::size_t line, std::size_t column, const std::string& what)
        : InputError(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          file_(std::move(file)), line_(line), column_(column) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::string file_;
    std::size_t line_;
    std::size_t column_;
};

/// Target price below the zero-volatility limit; carries the shortfall so callers can clamp.
class NegativeTimeValueError : public std::domain_error {
public:
    explicit NegativeTimeValueError(double deficit)
        : std::domain_error("target price below intrinsic value by " + std::to_string(deficit)),
          deficit_(deficit) {}

    double deficit() const noexcept { return deficit_; }

private:
    double deficit_;
};

}  // namespace capstrip
