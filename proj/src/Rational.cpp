#include "spex/Rational.h"

#include "spex/Error.h"

#include <cctype>

namespace spex {

namespace {
bool isDigits(std::string_view s) {
    if (s.empty()) { return false; }
    for (char c : s) {
        if (not std::isdigit(static_cast<unsigned char>(c))) { return false; }
    }
    return true;
}

mpz_class pow10(unsigned long exponent) {
    mpz_class result;
    mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
    return result;
}
} // namespace

Rational parseRational(std::string_view text) {
    std::string_view s = text;
    while (not s.empty() and std::isspace(static_cast<unsigned char>(s.front()))) { s.remove_prefix(1); }
    while (not s.empty() and std::isspace(static_cast<unsigned char>(s.back()))) { s.remove_suffix(1); }
    if (s.empty()) { throw ParseError("empty number literal"); }

    bool negative = false;
    std::string_view body = s;
    if (body.front() == '-' or body.front() == '+') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    auto fail = [&]() -> Rational { throw ParseError("invalid number literal '" + std::string(text) + "'"); };

    Rational result;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (not isDigits(num) or not isDigits(den)) { return fail(); }
        mpz_class d(std::string(den), 10);
        if (d == 0) { throw ParseError("zero denominator in '" + std::string(text) + "'"); }
        result = Rational(mpz_class(std::string(num), 10), d);
        result.canonicalize();
    } else {
        std::string_view mantissa = body;
        long exponent = 0;
        if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
            mantissa = body.substr(0, e);
            auto expText = body.substr(e + 1);
            bool expNegative = false;
            if (not expText.empty() and (expText.front() == '-' or expText.front() == '+')) {
                expNegative = expText.front() == '-';
                expText.remove_prefix(1);
            }
            if (not isDigits(expText) or expText.size() > 6) { return fail(); }
            exponent = std::stol(std::string(expText));
            if (expNegative) { exponent = -exponent; }
        }
        std::string digits;
        long fractionDigits = 0;
        if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
            auto intPart = mantissa.substr(0, dot);
            auto fracPart = mantissa.substr(dot + 1);
            if ((intPart.empty() and fracPart.empty()) or (not intPart.empty() and not isDigits(intPart))
                or (not fracPart.empty() and not isDigits(fracPart))) {
                return fail();
            }
            digits = std::string(intPart) + std::string(fracPart);
            fractionDigits = static_cast<long>(fracPart.size());
        } else {
            if (not isDigits(mantissa)) { return fail(); }
            digits = std::string(mantissa);
        }
        long scale = exponent - fractionDigits;
        mpz_class value(digits, 10);
        if (scale >= 0) {
            result = Rational(value * pow10(static_cast<unsigned long>(scale)));
        } else {
            result = Rational(value, pow10(static_cast<unsigned long>(-scale)));
            result.canonicalize();
        }
    }
    if (negative) { result = -result; }
    return result;
}

std::string toString(Rational const & value) {
    if (value.get_den() == 1) { return value.get_num().get_str(); }
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

double toDouble(Rational const & value) {
    return value.get_d();
}

} // namespace spex
