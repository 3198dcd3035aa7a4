#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace spex {

using Rational = mpq_class;

/// Parses an exact rational from "p", "p/q", or a decimal literal such as "-0.125" or "2.5e-3".
/// Decimal literals are converted digit by digit, so "0.1" is exactly 1/10.
Rational parseRational(std::string_view text);

/// Integer text when the denominator is 1, "p/q" otherwise.
std::string toString(Rational const & value);

double toDouble(Rational const & value);

} // namespace spex
