#ifndef MILNOR_RATIONAL_HPP
#define MILNOR_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace milnor {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite value");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double m = std::frexp(x, &exp);  // x = m * 2^exp, 0.5 <= |m| < 1
    // 53 doublings make the mantissa integral.
    BigInt num(static_cast<long long>(std::ldexp(m, 53)));
    exp -= 53;
    if (exp >= 0) return Rational(num << exp);
    BigInt den(1);
    den <<= -exp;
    return Rational(num, den);
}

// Decimal BigInt parse; strips leading zeros (cpp_int would read them as octal).
inline BigInt bigint_from_decimal(std::string s) {
    bool negative = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        negative = s[0] == '-';
        s.erase(0, 1);
    }
    std::size_t nz = s.find_first_not_of('0');
    s = nz == std::string::npos ? "0" : s.substr(nz);
    BigInt v(s);
    return negative ? BigInt(-v) : v;
}

// Exact parse of "123", "-4/7" or "0.25" style literals.
inline Rational rational_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt num = bigint_from_decimal(s.substr(0, slash));
        BigInt den = bigint_from_decimal(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("rational_from_string: zero denominator");
        return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        size_t frac_len = s.size() - dot - 1;
        BigInt num = bigint_from_decimal(digits);
        BigInt den(1);
        for (size_t i = 0; i < frac_len; ++i) den *= 10;
        return Rational(num, den);
    }
    return Rational(bigint_from_decimal(s));
}

inline std::string rational_to_string(const Rational& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1) s += "/" + denominator(q).str();
    return s;
}

}  // namespace milnor

#endif
