#pragma once

#include <cstddef>
#include <span>

namespace homeadv {

// Target density over an unconstrained real vector, up to a constant.
class LogDensity {
public:
    virtual ~LogDensity() = default;

    virtual std::size_t dimension() const = 0;
    virtual double log_density(std::span<const double> x) const = 0;
    // Returns the log density and overwrites `grad` with its gradient.
    virtual double log_density_gradient(std::span<const double> x, std::span<double> grad) const = 0;
};

} // namespace homeadv
