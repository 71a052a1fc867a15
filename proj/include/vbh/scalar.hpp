#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "vbh/error.hpp"
#include "vbh/rational.hpp"
#include "vbh/upoly.hpp"

namespace vbh {

// Rational function in u^1..u^nd (plus optional constant symbols), kept in
// lowest terms with a monic denominator under the global grlex order.
class BaseScalar {
public:
    UPoly num, den;

    BaseScalar() : BaseScalar(0, 0) {}
    BaseScalar(int nv, int nd)
        : num(UPoly::zero(nv, nd)), den(UPoly::constant(nv, nd, Rat(1))) {}
    BaseScalar(const UPoly& n, const UPoly& d) : num(n), den(d) { canonicalize(); }

    static BaseScalar from_poly(const UPoly& p) {
        return BaseScalar(p, UPoly::constant(p.nv, p.nd, Rat(1)));
    }
    static BaseScalar constant(int nv, int nd, const Rat& c) {
        return from_poly(UPoly::constant(nv, nd, c));
    }
    static BaseScalar var(int nv, int nd, int i) { return from_poly(UPoly::var(nv, nd, i)); }

    int nv() const { return den.nv; }
    int nd() const { return den.nd; }
    bool is_zero() const { return num.is_zero(); }
    bool is_constant() const { return num.is_constant() && den.is_constant(); }

    Rat constant_value() const {
        if (!is_constant()) fail(ErrorKind::Internal, "constant_value on nonconstant scalar");
        if (num.is_zero()) return Rat(0);
        return num.constant_value() / den.constant_value();
    }

    bool is_polynomial() const { return den.is_constant(); }

    void canonicalize() {
        if (den.is_zero()) fail(ErrorKind::DivisionByZero, "zero denominator");
        if (num.is_zero()) {
            den = UPoly::constant(num.nv, num.nd, Rat(1));
            return;
        }
        if (!den.is_constant()) {
            UPoly g = detail::gcd(num, den);
            if (!g.is_constant()) {
                num = detail::divexact(num, g);
                den = detail::divexact(den, g);
            }
        }
        Rat lc = den.leading_coeff();
        if (lc != 1) {
            num = num * (Rat(1) / lc);
            den = den * (Rat(1) / lc);
        }
    }

    void check_compatible(const BaseScalar& o) const {
        if (nv() != o.nv() || nd() != o.nd())
            fail(ErrorKind::MixedExtension, "scalars over different variable sets");
    }

    friend BaseScalar operator+(const BaseScalar& a, const BaseScalar& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        a.check_compatible(b);
        if (a.den == b.den) return BaseScalar(a.num + b.num, a.den);
        return BaseScalar(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend BaseScalar operator-(const BaseScalar& a) {
        BaseScalar r = a;
        r.num = -r.num;
        return r;
    }
    friend BaseScalar operator-(const BaseScalar& a, const BaseScalar& b) { return a + (-b); }
    friend BaseScalar operator*(const BaseScalar& a, const BaseScalar& b) {
        if (a.is_zero()) return a;
        if (b.is_zero()) return b;
        a.check_compatible(b);
        return BaseScalar(a.num * b.num, a.den * b.den);
    }
    friend BaseScalar operator/(const BaseScalar& a, const BaseScalar& b) {
        if (b.is_zero()) fail(ErrorKind::DivisionByZero, "scalar division by zero");
        if (a.is_zero()) return a;
        a.check_compatible(b);
        return BaseScalar(a.num * b.den, a.den * b.num);
    }
    friend bool operator==(const BaseScalar& a, const BaseScalar& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const BaseScalar& a, const BaseScalar& b) { return !(a == b); }

    BaseScalar inv() const {
        if (is_zero()) fail(ErrorKind::DivisionByZero, "inverting zero scalar");
        return BaseScalar(den, num);
    }

    BaseScalar pow(int e) const {
        if (e < 0) return inv().pow(-e);
        BaseScalar acc = constant(nv(), nd(), Rat(1));
        for (int k = 0; k < e; ++k) acc = acc * (*this);
        return acc;
    }

    BaseScalar partial_u(int i) const {
        if (is_zero()) return *this;
        UPoly dn = num.derivative(i), dd = den.derivative(i);
        return BaseScalar(dn * den - num * dd, den * den);
    }

    Rat eval(const std::vector<Rat>& point) const {
        Rat d = den.eval(point);
        if (d == 0) fail(ErrorKind::PoleAtPoint, "denominator vanishes at evaluation point");
        return num.eval(point) / d;
    }

    // True when the scalar depends on no dynamic variable other than u^i.
    bool single_variable(int i) const {
        for (int j = 1; j <= nd(); ++j) {
            if (j == i) continue;
            if (num.depends_on(j) || den.depends_on(j)) return false;
        }
        return true;
    }

    std::string str() const {
        if (den.is_constant() && den.constant_value() == 1) {
            if (num.is_constant() || num.terms.size() == 1) return num.str();
            return "(" + num.str() + ")";
        }
        std::string n = num.terms.size() == 1 ? num.str() : "(" + num.str() + ")";
        std::string d = den.terms.size() == 1 ? den.str() : "(" + den.str() + ")";
        return n + "/" + d;
    }
};

// Polynomial in the pencil parameter with BaseScalar coefficients.
class LambdaScalar {
public:
    std::vector<BaseScalar> coef; // coef[k] multiplies lam^k; trailing zeros stripped

    LambdaScalar() = default;
    explicit LambdaScalar(const BaseScalar& b) {
        if (!b.is_zero()) coef.push_back(b);
    }

    void normalize() {
        while (!coef.empty() && coef.back().is_zero()) coef.pop_back();
    }

    bool is_zero() const { return coef.empty(); }
    int degree() const { return static_cast<int>(coef.size()) - 1; }

    BaseScalar at(int k) const {
        if (k < 0 || k >= static_cast<int>(coef.size())) {
            for (const auto& c : coef)
                if (!c.is_zero()) return BaseScalar(c.nv(), c.nd());
            return BaseScalar();
        }
        return coef[k];
    }

    friend LambdaScalar operator+(const LambdaScalar& a, const LambdaScalar& b) {
        LambdaScalar r;
        size_t m = std::max(a.coef.size(), b.coef.size());
        r.coef.resize(m);
        for (size_t k = 0; k < m; ++k) {
            if (k < a.coef.size()) r.coef[k] = r.coef[k] + a.coef[k];
            if (k < b.coef.size()) r.coef[k] = r.coef[k] + b.coef[k];
        }
        r.normalize();
        return r;
    }
    friend LambdaScalar operator-(const LambdaScalar& a) {
        LambdaScalar r = a;
        for (auto& c : r.coef) c = -c;
        return r;
    }
    friend LambdaScalar operator-(const LambdaScalar& a, const LambdaScalar& b) { return a + (-b); }
    friend LambdaScalar operator*(const LambdaScalar& a, const LambdaScalar& b) {
        LambdaScalar r;
        if (a.is_zero() || b.is_zero()) return r;
        r.coef.assign(a.coef.size() + b.coef.size() - 1, BaseScalar(a.coef[0].nv(), a.coef[0].nd()));
        for (size_t i = 0; i < a.coef.size(); ++i)
            for (size_t j = 0; j < b.coef.size(); ++j)
                r.coef[i + j] = r.coef[i + j] + a.coef[i] * b.coef[j];
        r.normalize();
        return r;
    }
    friend LambdaScalar operator/(const LambdaScalar& a, const LambdaScalar& b) {
        if (b.is_zero()) fail(ErrorKind::DivisionByZero, "division by zero");
        if (a.is_zero()) return a;
        if (b.degree() == 0) {
            LambdaScalar r = a;
            for (auto& c : r.coef) c = c / b.coef[0];
            return r;
        }
        // exact euclidean division in the pencil parameter
        LambdaScalar rem = a, quot;
        quot.coef.assign(std::max<size_t>(a.coef.size(), 1), BaseScalar(b.coef[0].nv(), b.coef[0].nd()));
        while (!rem.is_zero() && rem.degree() >= b.degree()) {
            int k = rem.degree() - b.degree();
            BaseScalar q = rem.coef.back() / b.coef.back();
            quot.coef[k] = quot.coef[k] + q;
            LambdaScalar sub;
            sub.coef.assign(k + 1, BaseScalar(q.nv(), q.nd()));
            sub.coef[k] = q;
            rem = rem - sub * b;
        }
        if (!rem.is_zero())
            fail(ErrorKind::DivisionByZero, "inexact division in the pencil parameter");
        quot.normalize();
        return quot;
    }
    friend bool operator==(const LambdaScalar& a, const LambdaScalar& b) { return a.coef == b.coef; }
    friend bool operator!=(const LambdaScalar& a, const LambdaScalar& b) { return !(a == b); }

    LambdaScalar partial_u(int i) const {
        LambdaScalar r = *this;
        for (auto& c : r.coef) c = c.partial_u(i);
        r.normalize();
        return r;
    }

    std::string str() const {
        if (coef.empty()) return "0";
        std::string out;
        for (int k = degree(); k >= 0; --k) {
            if (coef[k].is_zero()) continue;
            if (!out.empty()) out += " + ";
            std::string c = coef[k].str();
            if (k == 0)
                out += c;
            else {
                std::string lam = k == 1 ? "lam" : "lam^" + std::to_string(k);
                out += (c == "1") ? lam : c + "*" + lam;
            }
        }
        return out.empty() ? "0" : out;
    }
};

// Register of the squared values f^i for the formal roots s_i.
using RootRegistry = std::shared_ptr<const std::vector<BaseScalar>>;

// Element of the quadratic tower Base[s_1..s_n]/(s_i^2 = f^i): a sum of
// square-free root monomials (encoded as bitmasks) with BaseScalar weights.
class RootScalar {
public:
    RootRegistry squares;
    std::map<uint32_t, BaseScalar> comp;

    RootScalar() = default;
    explicit RootScalar(RootRegistry reg) : squares(std::move(reg)) {}

    static RootScalar from_base(RootRegistry reg, const BaseScalar& b) {
        RootScalar r(std::move(reg));
        if (!b.is_zero()) r.comp[0] = b;
        return r;
    }
    static RootScalar root(RootRegistry reg, int i) {
        if (!reg || i < 1 || i > static_cast<int>(reg->size()))
            fail(ErrorKind::RootNotRegistered, "root symbol s_" + std::to_string(i));
        RootScalar r(reg);
        const BaseScalar& f = (*reg)[i - 1];
        r.comp[uint32_t(1) << (i - 1)] = BaseScalar::constant(f.nv(), f.nd(), Rat(1));
        return r;
    }

    bool is_zero() const { return comp.empty(); }

    void normalize() {
        for (auto it = comp.begin(); it != comp.end();)
            it = it->second.is_zero() ? comp.erase(it) : std::next(it);
    }

    static RootRegistry merged_registry(const RootScalar& a, const RootScalar& b) {
        if (!a.squares) return b.squares;
        if (!b.squares) return a.squares;
        if (a.squares == b.squares || *a.squares == *b.squares) return a.squares;
        fail(ErrorKind::MixedExtension, "root extensions over different structures");
    }

    friend RootScalar operator+(const RootScalar& a, const RootScalar& b) {
        RootScalar r(merged_registry(a, b));
        r.comp = a.comp;
        for (const auto& [m, c] : b.comp) {
            auto it = r.comp.find(m);
            if (it == r.comp.end())
                r.comp[m] = c;
            else
                it->second = it->second + c;
        }
        r.normalize();
        return r;
    }
    friend RootScalar operator-(const RootScalar& a) {
        RootScalar r = a;
        for (auto& [m, c] : r.comp) c = -c;
        return r;
    }
    friend RootScalar operator-(const RootScalar& a, const RootScalar& b) { return a + (-b); }
    friend RootScalar operator*(const RootScalar& a, const RootScalar& b) {
        RootScalar r(merged_registry(a, b));
        for (const auto& [ma, ca] : a.comp)
            for (const auto& [mb, cb] : b.comp) {
                uint32_t common = ma & mb, m = ma ^ mb;
                BaseScalar c = ca * cb;
                for (int i = 0; i < 32; ++i)
                    if (common & (uint32_t(1) << i)) c = c * (*r.squares)[i];
                auto it = r.comp.find(m);
                if (it == r.comp.end())
                    r.comp[m] = c;
                else
                    it->second = it->second + c;
            }
        r.normalize();
        return r;
    }
    friend bool operator==(const RootScalar& a, const RootScalar& b) { return a.comp == b.comp; }
    friend bool operator!=(const RootScalar& a, const RootScalar& b) { return !(a == b); }

    RootScalar conj(int bit) const {
        RootScalar r = *this;
        for (auto& [m, c] : r.comp)
            if (m & (uint32_t(1) << bit)) c = -c;
        return r;
    }

    RootScalar inv() const {
        if (is_zero()) fail(ErrorKind::DivisionByZero, "inverting zero scalar");
        RootScalar a = *this;
        RootScalar m = from_base(squares, BaseScalar::constant(nv(), nd(), Rat(1)));
        while (true) {
            uint32_t mask = 0;
            for (const auto& [mm, c] : a.comp) mask |= mm;
            if (mask == 0) break;
            int bit = 0;
            while (!(mask & (uint32_t(1) << bit))) ++bit;
            RootScalar c = a.conj(bit);
            m = m * c;
            a = a * c;
        }
        if (a.comp.empty() || a.comp.begin()->second.is_zero())
            fail(ErrorKind::DivisionByZero, "zero norm in root extension");
        BaseScalar n0 = a.comp.begin()->second;
        RootScalar r = m * from_base(squares, n0.inv());
        return r;
    }

    friend RootScalar operator/(const RootScalar& a, const RootScalar& b) { return a * b.inv(); }

    int nv() const {
        if (!comp.empty()) return comp.begin()->second.nv();
        if (squares && !squares->empty()) return (*squares)[0].nv();
        return 0;
    }
    int nd() const {
        if (!comp.empty()) return comp.begin()->second.nd();
        if (squares && !squares->empty()) return (*squares)[0].nd();
        return 0;
    }

    RootScalar partial_u(int i) const {
        RootScalar r(squares);
        for (const auto& [m, c] : comp) {
            BaseScalar chain(c.nv(), c.nd());
            for (int b = 0; b < 32; ++b)
                if (m & (uint32_t(1) << b)) {
                    const BaseScalar& f = (*squares)[b];
                    chain = chain + f.partial_u(i) / (BaseScalar::constant(f.nv(), f.nd(), Rat(2)) * f);
                }
            BaseScalar d = c.partial_u(i) + c * chain;
            if (!d.is_zero()) r.comp[m] = d;
        }
        return r;
    }

    Rat eval(const std::vector<Rat>& point) const {
        Rat acc(0);
        for (const auto& [m, c] : comp) {
            Rat v = c.eval(point);
            for (int b = 0; b < 32; ++b)
                if (m & (uint32_t(1) << b)) {
                    Rat fv = (*squares)[b].eval(point);
                    auto root = rat_sqrt(fv);
                    if (!root)
                        fail(ErrorKind::NonSquareRoot,
                             "f^" + std::to_string(b + 1) + " is not a rational square at the point");
                    v *= *root;
                }
            acc += v;
        }
        return acc;
    }

    std::string str() const {
        if (comp.empty()) return "0";
        std::string out;
        for (const auto& [m, c] : comp) {
            if (!out.empty()) out += " + ";
            std::string roots;
            for (int b = 0; b < 32; ++b)
                if (m & (uint32_t(1) << b)) {
                    if (!roots.empty()) roots += "*";
                    roots += "s[" + std::to_string(b + 1) + "]";
                }
            if (roots.empty())
                out += c.str();
            else
                out += c.str() + "*" + roots;
        }
        return out;
    }
};

// Runtime-tagged scalar tower. Base values promote into either extension;
// the two extensions do not mix.
class Scalar {
public:
    std::variant<BaseScalar, LambdaScalar, RootScalar> v;

    Scalar() : v(BaseScalar()) {}
    Scalar(const BaseScalar& b) : v(b) {}
    Scalar(const LambdaScalar& l) : v(l) {}
    Scalar(const RootScalar& r) : v(r) {}

    static Scalar constant(int nv, int nd, const Rat& c) {
        return Scalar(BaseScalar::constant(nv, nd, c));
    }

    bool is_base() const { return std::holds_alternative<BaseScalar>(v); }
    bool is_lambda() const { return std::holds_alternative<LambdaScalar>(v); }
    bool is_root() const { return std::holds_alternative<RootScalar>(v); }

    bool is_zero() const {
        if (is_base()) return std::get<BaseScalar>(v).is_zero();
        if (is_lambda()) return std::get<LambdaScalar>(v).is_zero();
        return std::get<RootScalar>(v).is_zero();
    }

    int nv() const {
        if (is_base()) return std::get<BaseScalar>(v).nv();
        if (is_lambda()) {
            const auto& l = std::get<LambdaScalar>(v);
            return l.coef.empty() ? 0 : l.coef[0].nv();
        }
        return std::get<RootScalar>(v).nv();
    }
    int nd() const {
        if (is_base()) return std::get<BaseScalar>(v).nd();
        if (is_lambda()) {
            const auto& l = std::get<LambdaScalar>(v);
            return l.coef.empty() ? 0 : l.coef[0].nd();
        }
        return std::get<RootScalar>(v).nd();
    }

    // Collapse trivial extensions back to the base level when possible.
    const BaseScalar& base() const {
        if (is_base()) return std::get<BaseScalar>(v);
        fail(ErrorKind::MixedExtension, "expected a base-level scalar");
    }

    BaseScalar to_base() const {
        if (is_base()) return std::get<BaseScalar>(v);
        if (is_lambda()) {
            const auto& l = std::get<LambdaScalar>(v);
            if (l.is_zero()) return BaseScalar();
            if (l.degree() == 0) return l.coef[0];
            fail(ErrorKind::MixedExtension, "scalar carries the pencil parameter");
        }
        const auto& r = std::get<RootScalar>(v);
        if (r.is_zero()) return BaseScalar();
        if (r.comp.size() == 1 && r.comp.begin()->first == 0) return r.comp.begin()->second;
        fail(ErrorKind::MixedExtension, "scalar carries root symbols");
    }

    template <typename F>
    static Scalar combine(const Scalar& a, const Scalar& b, F&& op) {
        if (a.is_base() && b.is_base())
            return Scalar(op(std::get<BaseScalar>(a.v), std::get<BaseScalar>(b.v)));
        if (a.is_lambda() || b.is_lambda()) {
            if (a.is_root() || b.is_root())
                fail(ErrorKind::MixedExtension, "cannot mix pencil and root extensions");
            LambdaScalar la = a.is_lambda() ? std::get<LambdaScalar>(a.v)
                                            : LambdaScalar(std::get<BaseScalar>(a.v));
            LambdaScalar lb = b.is_lambda() ? std::get<LambdaScalar>(b.v)
                                            : LambdaScalar(std::get<BaseScalar>(b.v));
            return Scalar(op(la, lb));
        }
        RootRegistry reg = a.is_root() ? std::get<RootScalar>(a.v).squares
                                       : std::get<RootScalar>(b.v).squares;
        RootScalar ra = a.is_root() ? std::get<RootScalar>(a.v)
                                    : RootScalar::from_base(reg, std::get<BaseScalar>(a.v));
        RootScalar rb = b.is_root() ? std::get<RootScalar>(b.v)
                                    : RootScalar::from_base(reg, std::get<BaseScalar>(b.v));
        return Scalar(op(ra, rb));
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        return combine(a, b, [](const auto& x, const auto& y) { return x + y; });
    }
    friend Scalar operator-(const Scalar& a) {
        if (a.is_base()) return Scalar(-std::get<BaseScalar>(a.v));
        if (a.is_lambda()) return Scalar(-std::get<LambdaScalar>(a.v));
        return Scalar(-std::get<RootScalar>(a.v));
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        if (a.is_zero()) return a;
        if (b.is_zero()) return b;
        return combine(a, b, [](const auto& x, const auto& y) { return x * y; });
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        if (b.is_zero()) fail(ErrorKind::DivisionByZero, "scalar division by zero");
        if (a.is_zero()) return a;
        return combine(a, b, [](const auto& x, const auto& y) { return x / y; });
    }
    friend bool operator==(const Scalar& a, const Scalar& b) {
        if (a.v.index() == b.v.index()) return a.v == b.v;
        return (a - b).is_zero();
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    Scalar partial_u(int i) const {
        if (is_base()) return Scalar(std::get<BaseScalar>(v).partial_u(i));
        if (is_lambda()) return Scalar(std::get<LambdaScalar>(v).partial_u(i));
        return Scalar(std::get<RootScalar>(v).partial_u(i));
    }

    Rat eval(const std::vector<Rat>& point) const {
        if (is_base()) return std::get<BaseScalar>(v).eval(point);
        if (is_lambda()) return to_base().eval(point);
        return std::get<RootScalar>(v).eval(point);
    }

    // Multiply by lam^k, lifting into the pencil extension.
    Scalar times_lambda_power(int k) const {
        if (is_root()) fail(ErrorKind::MixedExtension, "cannot mix pencil and root extensions");
        LambdaScalar l = is_lambda() ? std::get<LambdaScalar>(v)
                                     : LambdaScalar(std::get<BaseScalar>(v));
        if (l.is_zero()) return Scalar(l);
        LambdaScalar r;
        r.coef.assign(l.coef.size() + k, BaseScalar(l.coef[0].nv(), l.coef[0].nd()));
        for (size_t j = 0; j < l.coef.size(); ++j) r.coef[j + k] = l.coef[j];
        return Scalar(r);
    }

    std::string str() const {
        if (is_base()) return std::get<BaseScalar>(v).str();
        if (is_lambda()) return std::get<LambdaScalar>(v).str();
        return std::get<RootScalar>(v).str();
    }
};

enum class FieldOp { Add, Sub, Mul, Div };

inline Scalar field_ops(const Scalar& a, const Scalar& b, FieldOp op) {
    switch (op) {
        case FieldOp::Add: return a + b;
        case FieldOp::Sub: return a - b;
        case FieldOp::Mul: return a * b;
        case FieldOp::Div: return a / b;
    }
    fail(ErrorKind::Internal, "unknown field operation");
}

inline Scalar partial_u(const Scalar& a, int i) { return a.partial_u(i); }

inline Rat eval_at(const Scalar& a, const std::vector<Rat>& point) { return a.eval(point); }

} // namespace vbh
