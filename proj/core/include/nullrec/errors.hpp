#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nullrec {

/// A simulated state became non-finite; `node` is the first bad grid index.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(std::string what, std::size_t node)
        : std::runtime_error(std::move(what)), node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

/// Catalog lookup failed.
class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical quadrature did not converge or the integral diverges.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix that must be invertible / PSD within tolerance is not.
class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nullrec
