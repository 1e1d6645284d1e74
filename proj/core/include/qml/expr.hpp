#pragma once

#include <string_view>

#include "qml/poly.hpp"

namespace qml {

/// Parses a polynomial written with z1..zd, w1..wd, numbers, the imaginary
/// unit i, + - * ^ and parentheses, e.g. "w2^2 - (1+2*i)*z1*z3".
/// Throws InputError naming the offending position.
GradedPoly parse_polynomial(std::string_view text, int dim);

}  // namespace qml
