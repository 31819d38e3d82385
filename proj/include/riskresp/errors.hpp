#ifndef RISKRESP_ERRORS_HPP
#define RISKRESP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace riskresp {

/// Invalid or inconsistent model / scenario configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// State vector does not have the length the model layout expects.
class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integration produced a non-finite value or broke a state invariant.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time)
        : std::runtime_error(what), m_time(time) {}

    double time() const noexcept { return m_time; }

private:
    double m_time;
};

/// Malformed trajectory CSV; line() is 1-based.
class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), m_line(line) {}

    std::size_t line() const noexcept { return m_line; }

private:
    std::size_t m_line;
};

} // namespace riskresp

#endif // RISKRESP_ERRORS_HPP
