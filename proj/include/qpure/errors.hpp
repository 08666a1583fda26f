// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qpure {

// Invalid physical input: state outside the Bloch ball, parameter out of range,
// or an operation requested outside its supported regime.
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure detected mid-computation: integrator overshoot, quadrature
// stall, normalization loss.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integrator stepped outside the Bloch ball by more than the allowed slack.
struct overshoot_error : numeric_error {
    explicit overshoot_error(const std::string& what) : numeric_error(what) {}
};

}  // namespace qpure
