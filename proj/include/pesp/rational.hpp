#ifndef pesp_rational_hpp
#define pesp_rational_hpp

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

namespace pesp {

// Exact rational arithmetic; used for all cut construction and the oracle LP.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

inline double to_double(const Rat& r) {
    return r.convert_to<double>();
}

// Exact conversion: every finite double is a dyadic rational.
inline Rat rat_of(double v) {
    return Rat(v);
}

// [v]_T with values in [0, T)
inline int64_t mod_period(int64_t v, int64_t T) {
    int64_t r = v % T;
    return r < 0 ? r + T : r;
}

inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) q -= 1;
    return q;
}

inline Rat mod_period(const Rat& v, int64_t T) {
    Rat f = v / T;
    return v - Rat(T) * Rat(floor_div(numerator(f), denominator(f)));
}

inline Int floor_rat(const Rat& r) {
    return floor_div(numerator(r), denominator(r));
}

inline Int ceil_rat(const Rat& r) {
    return -floor_rat(-r);
}

inline std::string rat_to_string(const Rat& r) {
    return r.str();
}

inline Rat rat_from_string(const std::string& s) {
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(s);  // integer or "p/q"
    // decimal literal: digits.digits -> scaled fraction
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    Int denom = 1;
    for (size_t k = dot + 1; k < s.size(); ++k) denom *= 10;
    return Rat(Int(digits), denom);
}

}  // namespace pesp

#endif
