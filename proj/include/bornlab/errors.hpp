#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bornlab {

/// Raised when an evolution produces non-finite amplitudes.
class NumericalAbort : public std::runtime_error {
public:
    NumericalAbort(std::size_t step, const std::string& what)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step)
    {
    }
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

} // namespace bornlab
