#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dsi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfRangeError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class NotPsdError : public Error {
public:
    using Error::Error;
};

class ZeroVariationError : public Error {
public:
    ZeroVariationError(int j, int i)
        : Error("zero quadratic variation in subinterval (j=" + std::to_string(j) +
                ", i=" + std::to_string(i) + ")"),
          j_(j), i_(i) {}
    int scale_index() const { return j_; }
    int sub_index() const { return i_; }

private:
    int j_;
    int i_;
};

class TooFewPointsError : public Error {
public:
    using Error::Error;
};

class InsufficientPathsError : public Error {
public:
    using Error::Error;
};

class NonContiguousGroupError : public Error {
public:
    using Error::Error;
};

class IndexOutOfDataError : public Error {
public:
    using Error::Error;
};

class NonPositiveTimeError : public Error {
public:
    using Error::Error;
};

class RangeTooNarrowError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class EmptySelectionError : public Error {
public:
    using Error::Error;
};

class NonMonotoneDatesError : public Error {
public:
    using Error::Error;
};

// Carries every violated invariant, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid configuration:";
        for (const auto& item : v) s += "\n  - " + item;
        return s;
    }
    std::vector<std::string> violations_;
};

}  // namespace dsi
