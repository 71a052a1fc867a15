#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "vbh/error.hpp"

namespace vbh {

using Rat = mpq_class;

inline Rat rat_of(long num, long den = 1) {
    if (den == 0) fail(ErrorKind::DivisionByZero, "rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat rat_parse(const std::string& text) {
    Rat r;
    if (r.set_str(text, 10) != 0)
        fail(ErrorKind::SyntaxError, "bad rational literal '" + text + "'");
    if (r.get_den() == 0)
        fail(ErrorKind::DivisionByZero, "rational with zero denominator");
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    if (e < 0) {
        if (base == 0) fail(ErrorKind::DivisionByZero, "0 raised to a negative power");
        return rat_pow(Rat(1) / base, -e);
    }
    Rat acc(1), b(base);
    long k = e;
    while (k > 0) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    return acc;
}

// Principal (nonnegative) square root, when the argument is the square of a rational.
inline std::optional<Rat> rat_sqrt(const Rat& r) {
    if (r < 0) return std::nullopt;
    mpz_class num = r.get_num(), den = r.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return std::nullopt;
    if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    Rat out(rn, rd);
    out.canonicalize();
    return out;
}

} // namespace vbh
