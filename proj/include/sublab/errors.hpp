#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace sublab {

std::string format_point(std::span<const double> p);

// Evaluation hit a singular point (division by zero, log/sqrt of a
// nonpositive value, ...). Carries the offending point when known.
class eval_error : public std::runtime_error {
public:
    explicit eval_error(const std::string& what) : std::runtime_error(what) {}
    eval_error(const std::string& what, std::span<const double> point)
        : std::runtime_error(what + " at " + format_point(point)) {}
};

// The metric is not positive definite (order-0 Cholesky/pivot failure).
class degenerate_metric_error : public eval_error {
public:
    using eval_error::eval_error;
};

// A derivative was requested beyond the surviving jet order. This is a
// pipeline bug, not a user error.
class jet_order_error : public std::logic_error {
public:
    explicit jet_order_error(const std::string& what) : std::logic_error(what) {}
};

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& message, std::size_t pos, std::size_t len)
        : std::runtime_error(message + " (at offset " + std::to_string(pos) + ")"),
          pos(pos), len(len), message(message) {}
    std::size_t pos;
    std::size_t len;
    std::string message;
};

class build_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class sampling_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sublab
