#pragma once
//
// sosdict/rational.hpp
//
// Exact rational scalar type. GMP's mpq_class gives us canonical form and
// exact field arithmetic; everything downstream that needs bit-for-bit
// certificates is templated on this.
//

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace sosdict {

using Rational = mpq_class;

// two-argument mpq construction does not reduce the fraction, and GMP's
// comparison and arithmetic require canonical form; always build through here
inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

// (d-1)!! for even d, the standard Gaussian moment E g^d
inline std::int64_t odd_double_factorial(int d) {
    std::int64_t r = 1;
    for (int k = d - 1; k >= 1; k -= 2) r *= k;
    return r;
}

// scalar traits so templated code can ask for zero/one uniformly
template <class K>
struct scalar_traits {
    static K zero() { return K(0); }
    static K one() { return K(1); }
    static bool is_zero(const K& v) { return v == K(0); }
};

}  // namespace sosdict
