#pragma once

#include <cctype>
#include <string>
#include <variant>

#include "vbh/forms.hpp"
#include "vbh/functional.hpp"

namespace vbh {

// Value of a parsed expression: a jet-ring element, a general or reduced
// one-form, or a local functional. int(density) integrates to a functional;
// int(one-form) reduces the form modulo total derivatives.
using ExprValue = std::variant<DiffPoly, OneForm, ReducedOneForm, LocalFunctional>;

inline std::string expr_str(const ExprValue& v) {
    if (std::holds_alternative<DiffPoly>(v)) return std::get<DiffPoly>(v).str();
    if (std::holds_alternative<OneForm>(v)) return std::get<OneForm>(v).str();
    if (std::holds_alternative<ReducedOneForm>(v)) return std::get<ReducedOneForm>(v).str();
    return "int(" + std::get<LocalFunctional>(v).rep.str() + ")";
}

inline bool expr_is_zero(const ExprValue& v) {
    if (std::holds_alternative<DiffPoly>(v)) return std::get<DiffPoly>(v).is_zero();
    if (std::holds_alternative<OneForm>(v)) return std::get<OneForm>(v).is_zero();
    if (std::holds_alternative<ReducedOneForm>(v)) return std::get<ReducedOneForm>(v).is_zero();
    return std::get<LocalFunctional>(v).is_zero();
}

namespace detail {

// Recursive-descent parser over the shared text syntax:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' ('-')? integer)?
//   atom   := integer | 'lam' | name '[' i (',' s)? ']' | '(' expr ')'
//           | 'int' '(' expr ')'
//   name   := 'u' | 'th' | 'du' | 'dth' | 'L' | 'C' | 's'
// Rational constants are spelled as quotients of integers and handled by the
// division operator, so `3/4` and `(3)/(4)` evaluate identically.
class ExprParser {
public:
    ExprParser(const std::string& text, int nv, int nd, RootRegistry roots)
        : t_(text), nv_(nv), nd_(nd), roots_(std::move(roots)) {}

    ExprValue run() {
        ExprValue v = parse_sum();
        skip_ws();
        if (pos_ != t_.size()) bail("unexpected trailing input");
        return v;
    }

private:
    const std::string& t_;
    size_t pos_ = 0;
    int nv_, nd_;
    RootRegistry roots_;

    [[noreturn]] void bail(const std::string& msg) const {
        fail(ErrorKind::SyntaxError, msg + " at offset " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < t_.size() && t_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) bail(std::string("expected '") + c + "'");
    }

    long parse_integer() {
        skip_ws();
        bool neg = eat('-');
        skip_ws();
        if (pos_ >= t_.size() || !std::isdigit(static_cast<unsigned char>(t_[pos_])))
            bail("expected an integer");
        long v = 0;
        while (pos_ < t_.size() && std::isdigit(static_cast<unsigned char>(t_[pos_])))
            v = v * 10 + (t_[pos_++] - '0');
        return neg ? -v : v;
    }

    std::string parse_name() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < t_.size() && std::isalpha(static_cast<unsigned char>(t_[pos_]))) ++pos_;
        if (start == pos_) bail("expected a name");
        return t_.substr(start, pos_ - start);
    }

    DiffPoly unit() const { return DiffPoly::constant(nv_, nd_, Rat(1)); }

    // --- arithmetic on parsed values -------------------------------------

    static bool is_poly(const ExprValue& v) { return std::holds_alternative<DiffPoly>(v); }

    // A jet-free even element acts as a scalar on every kind of value.
    Scalar scalar_of(const DiffPoly& a) const {
        Scalar acc = Scalar::constant(nv_, nd_, Rat(0));
        for (const Term& t : a.terms) {
            if (!t.even.empty() || !t.odd.empty() || !t.logs.empty())
                bail("expected a jet-free scalar expression");
            acc = acc + t.c;
        }
        return acc;
    }

    ExprValue add(const ExprValue& a, const ExprValue& b, bool subtract) {
        if (expr_is_zero(a) && is_poly(a)) return subtract ? negate(b) : b;
        if (expr_is_zero(b) && is_poly(b)) return a;
        if (a.index() != b.index()) bail("cannot add values of different kinds");
        auto op = [&](const auto& x, const auto& y) -> ExprValue {
            return subtract ? ExprValue(x - y) : ExprValue(x + y);
        };
        if (is_poly(a)) return op(std::get<DiffPoly>(a), std::get<DiffPoly>(b));
        if (std::holds_alternative<OneForm>(a))
            return op(std::get<OneForm>(a), std::get<OneForm>(b));
        if (std::holds_alternative<ReducedOneForm>(a))
            return op(std::get<ReducedOneForm>(a), std::get<ReducedOneForm>(b));
        return op(std::get<LocalFunctional>(a), std::get<LocalFunctional>(b));
    }

    ExprValue negate(const ExprValue& v) {
        if (is_poly(v)) return -std::get<DiffPoly>(v);
        if (std::holds_alternative<OneForm>(v)) return -std::get<OneForm>(v);
        if (std::holds_alternative<ReducedOneForm>(v)) return -std::get<ReducedOneForm>(v);
        return -std::get<LocalFunctional>(v);
    }

    ExprValue mul(const ExprValue& a, const ExprValue& b) {
        if (is_poly(a) && is_poly(b)) return std::get<DiffPoly>(a) * std::get<DiffPoly>(b);
        if (is_poly(a)) {
            const DiffPoly& c = std::get<DiffPoly>(a);
            if (std::holds_alternative<OneForm>(b)) return c * std::get<OneForm>(b);
            if (std::holds_alternative<ReducedOneForm>(b)) {
                // scaling a reduced integral only makes sense for jet-free
                // factors; anything else would silently disagree with the
                // reduction of the scaled integrand
                Scalar sc = scalar_of(c);
                ReducedOneForm r = std::get<ReducedOneForm>(b);
                for (int i = 0; i < r.nd; ++i) {
                    r.g[i] = sc * r.g[i];
                    r.h[i] = sc * r.h[i];
                }
                return r;
            }
            return scalar_of(c) * std::get<LocalFunctional>(b);
        }
        bail("forms and integrals can only be multiplied from the left by jet expressions");
    }

    ExprValue div(const ExprValue& a, const ExprValue& b) {
        if (!is_poly(b)) bail("can only divide by a jet-free scalar");
        Scalar inv = Scalar::constant(nv_, nd_, Rat(1)) / scalar_of(std::get<DiffPoly>(b));
        return mul(DiffPoly::constant(nv_, nd_, inv), a);
    }

    ExprValue pow(const ExprValue& a, long k) {
        if (!is_poly(a)) {
            if (k == 1) return a;
            bail("exponents apply to jet expressions only");
        }
        const DiffPoly& base = std::get<DiffPoly>(a);
        if (k < 0) {
            // inverse powers exist only for u^{i,1} factors and for scalars
            if (base.terms.size() == 1) {
                const Term& t = base.terms[0];
                if (t.odd.empty() && t.logs.empty() && t.even.size() == 1 &&
                    std::get<1>(t.even[0]) == 1 && t.c.is_base() &&
                    t.c.base().is_constant() && t.c.base().constant_value() == 1) {
                    DiffPoly r(nv_, nd_);
                    Term nt = t;
                    std::get<2>(nt.even[0]) =
                        static_cast<int>(k) * std::get<2>(t.even[0]);
                    r.terms.push_back(std::move(nt));
                    return r;
                }
            }
            Scalar inv = Scalar::constant(nv_, nd_, Rat(1)) / scalar_of(base);
            ExprValue acc = DiffPoly::constant(nv_, nd_, inv);
            for (long i = 1; i < -k; ++i) acc = mul(acc, DiffPoly::constant(nv_, nd_, inv));
            return acc;
        }
        ExprValue acc = unit();
        for (long i = 0; i < k; ++i) acc = mul(acc, a);
        return acc;
    }

    // --- grammar ----------------------------------------------------------

    ExprValue parse_sum() {
        ExprValue v = parse_term();
        for (;;) {
            if (eat('+'))
                v = add(v, parse_term(), false);
            else if (eat('-'))
                v = add(v, parse_term(), true);
            else
                return v;
        }
    }

    ExprValue parse_term() {
        ExprValue v = parse_unary();
        for (;;) {
            if (eat('*'))
                v = mul(v, parse_unary());
            else if (eat('/'))
                v = div(v, parse_unary());
            else
                return v;
        }
    }

    ExprValue parse_unary() {
        if (eat('-')) return negate(parse_unary());
        return parse_power();
    }

    ExprValue parse_power() {
        ExprValue v = parse_atom();
        if (eat('^')) return pow(v, parse_integer());
        return v;
    }

    void check_coord(int i) const {
        if (i < 1 || i > nd_)
            fail(ErrorKind::IndexOutOfRange,
                 "coordinate index " + std::to_string(i) + " outside 1.." + std::to_string(nd_));
    }

    ExprValue generator(const std::string& name) {
        expect('[');
        long i = parse_integer();
        long s = -1;
        if (eat(',')) s = parse_integer();
        expect(']');
        if (name == "u" || name == "th" || name == "du" || name == "dth") {
            if (s < 0) {
                if (name != "u") bail("'" + name + "' needs two indices");
                s = 0; // u[i] abbreviates the coefficient variable u[i,0]
            }
            check_coord(static_cast<int>(i));
            if (name == "u") return DiffPoly::var(nv_, nd_, JetVar::u(i, s));
            if (name == "th") return DiffPoly::var(nv_, nd_, JetVar::th(i, s));
            OneForm w(nv_, nd_);
            if (name == "du")
                w.add_du(i, s, unit());
            else
                w.add_dth(i, s, unit());
            return w;
        }
        if (s >= 0) bail("'" + name + "' takes a single index");
        if (name == "C") {
            if (i < 1 || nd_ + i > nv_)
                fail(ErrorKind::IndexOutOfRange,
                     "constant symbol C[" + std::to_string(i) + "] outside the variable set");
            return DiffPoly::constant(nv_, nd_,
                                      Scalar(BaseScalar::var(nv_, nd_, nd_ + static_cast<int>(i))));
        }
        if (name == "L") {
            check_coord(static_cast<int>(i));
            DiffPoly r(nv_, nd_);
            Term t;
            t.c = Scalar::constant(nv_, nd_, Rat(1));
            t.logs = {{static_cast<int>(i), 1}};
            r.terms.push_back(std::move(t));
            return r;
        }
        if (name == "s") {
            check_coord(static_cast<int>(i));
            if (!roots_) bail("root symbol 's' needs a structure context");
            return DiffPoly::constant(nv_, nd_, Scalar(RootScalar::root(roots_, i)));
        }
        bail("unknown generator '" + name + "'");
    }

    ExprValue parse_atom() {
        skip_ws();
        if (pos_ >= t_.size()) bail("unexpected end of input");
        char c = t_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)))
            return DiffPoly::constant(nv_, nd_, Rat(parse_integer()));
        if (c == '(') {
            ++pos_;
            ExprValue v = parse_sum();
            expect(')');
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string name = parse_name();
            if (name == "lam") {
                LambdaScalar L;
                L.coef.push_back(BaseScalar(nv_, nd_));
                L.coef.push_back(BaseScalar::constant(nv_, nd_, Rat(1)));
                return DiffPoly::constant(nv_, nd_, Scalar(L));
            }
            if (name == "int") {
                expect('(');
                ExprValue v = parse_sum();
                expect(')');
                if (is_poly(v)) return LocalFunctional(std::get<DiffPoly>(v));
                if (std::holds_alternative<OneForm>(v))
                    return reduce_mod_dx(std::get<OneForm>(v));
                bail("int() takes a density or a one-form");
            }
            return generator(name);
        }
        bail("unexpected character");
    }
};

} // namespace detail

// Parse against an explicit variable context: nd dynamic coordinates out of
// nv scalar variables, with an optional root register for the s[i] symbols.
inline ExprValue parse_expr(const std::string& text, int nv, int nd,
                            RootRegistry roots = nullptr) {
    if (nd < 1 || nv < nd) fail(ErrorKind::ValidationError, "parse context needs nv >= nd >= 1");
    return detail::ExprParser(text, nv, nd, std::move(roots)).run();
}

namespace detail {

// Largest coordinate index mentioned by any generator, for context inference.
inline int scan_max_index(const std::string& text) {
    int best = 1;
    for (size_t k = 0; k < text.size(); ++k) {
        if (text[k] != '[') continue;
        size_t j = k + 1;
        while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        int v = 0;
        bool any = false;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
            v = v * 10 + (text[j++] - '0');
            any = true;
        }
        if (any) best = std::max(best, v);
    }
    return best;
}

} // namespace detail

// Parse with an inferred context: every bracketed index fits, and constant
// symbols get slots after the dynamic coordinates.
inline ExprValue parse_expr(const std::string& text) {
    int n = detail::scan_max_index(text);
    return parse_expr(text, 2 * n, n);
}

} // namespace vbh
