#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vbh/error.hpp"
#include "vbh/rational.hpp"

namespace vbh {

// Sparse multivariate polynomial over Rat in variables x_1..x_nv, kept in
// graded lexicographic order (highest first). The first nd variables are the
// dynamic coordinates u^1..u^nd; any trailing variables act as free constant
// symbols (they are never touched by the total derivative).
class UPoly {
public:
    int nv = 0;
    int nd = 0;
    // exponent vector -> coefficient, sorted grlex descending, no zero coeffs
    std::vector<std::pair<std::vector<int>, Rat>> terms;

    UPoly() = default;
    UPoly(int nv_, int nd_) : nv(nv_), nd(nd_) {}

    static UPoly zero(int nv, int nd) { return UPoly(nv, nd); }

    static UPoly constant(int nv, int nd, const Rat& c) {
        UPoly p(nv, nd);
        if (c != 0) p.terms.emplace_back(std::vector<int>(nv, 0), c);
        return p;
    }

    static UPoly var(int nv, int nd, int i) {
        if (i < 1 || i > nv) fail(ErrorKind::IndexOutOfRange, "variable index " + std::to_string(i));
        UPoly p(nv, nd);
        std::vector<int> e(nv, 0);
        e[i - 1] = 1;
        p.terms.emplace_back(std::move(e), Rat(1));
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    bool is_constant() const {
        if (terms.empty()) return true;
        return terms.size() == 1 && total_deg(terms[0].first) == 0;
    }

    Rat constant_value() const {
        if (terms.empty()) return Rat(0);
        if (!is_constant()) fail(ErrorKind::Internal, "constant_value on nonconstant polynomial");
        return terms[0].second;
    }

    static int total_deg(const std::vector<int>& e) {
        int d = 0;
        for (int x : e) d += x;
        return d;
    }

    // grlex: larger total degree first, ties broken lexicographically
    static bool exp_less(const std::vector<int>& a, const std::vector<int>& b) {
        int da = total_deg(a), db = total_deg(b);
        if (da != db) return da < db;
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }

    void normalize() {
        std::sort(terms.begin(), terms.end(),
                  [](const auto& a, const auto& b) { return exp_less(b.first, a.first); });
        std::vector<std::pair<std::vector<int>, Rat>> out;
        for (auto& t : terms) {
            if (!out.empty() && out.back().first == t.first)
                out.back().second += t.second;
            else
                out.push_back(std::move(t));
            if (!out.empty() && out.back().second == 0) out.pop_back();
        }
        terms = std::move(out);
    }

    void check_compatible(const UPoly& o) const {
        if (nv != o.nv || nd != o.nd)
            fail(ErrorKind::MixedExtension, "polynomials over different variable sets");
    }

    friend UPoly operator+(const UPoly& a, const UPoly& b) {
        if (a.terms.empty()) return b;
        if (b.terms.empty()) return a;
        a.check_compatible(b);
        UPoly r(a.nv, a.nd);
        r.terms = a.terms;
        r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
        r.normalize();
        return r;
    }

    friend UPoly operator-(const UPoly& a) {
        UPoly r = a;
        for (auto& t : r.terms) t.second = -t.second;
        return r;
    }

    friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }

    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.terms.empty() || b.terms.empty())
            return a.nv >= b.nv ? UPoly(a.nv, a.nd) : UPoly(b.nv, b.nd);
        a.check_compatible(b);
        UPoly r(a.nv, a.nd);
        r.terms.reserve(a.terms.size() * b.terms.size());
        for (const auto& ta : a.terms)
            for (const auto& tb : b.terms) {
                std::vector<int> e(a.nv);
                for (int k = 0; k < a.nv; ++k) e[k] = ta.first[k] + tb.first[k];
                r.terms.emplace_back(std::move(e), ta.second * tb.second);
            }
        r.normalize();
        return r;
    }

    friend UPoly operator*(const UPoly& a, const Rat& c) {
        if (c == 0) return UPoly(a.nv, a.nd);
        UPoly r = a;
        for (auto& t : r.terms) t.second *= c;
        return r;
    }

    friend UPoly operator*(const Rat& c, const UPoly& a) { return a * c; }

    friend bool operator==(const UPoly& a, const UPoly& b) {
        return a.nv == b.nv && a.terms == b.terms;
    }
    friend bool operator!=(const UPoly& a, const UPoly& b) { return !(a == b); }

    UPoly pow(int e) const {
        if (e < 0) fail(ErrorKind::Internal, "UPoly::pow negative exponent");
        UPoly acc = constant(nv, nd, Rat(1));
        for (int k = 0; k < e; ++k) acc = acc * (*this);
        return acc;
    }

    // Partial derivative with respect to x_i (1-based).
    UPoly derivative(int i) const {
        if (i < 1 || i > nv) fail(ErrorKind::IndexOutOfRange, "derivative index " + std::to_string(i));
        UPoly r(nv, nd);
        for (const auto& t : terms) {
            int e = t.first[i - 1];
            if (e == 0) continue;
            std::vector<int> m = t.first;
            m[i - 1] -= 1;
            r.terms.emplace_back(std::move(m), t.second * e);
        }
        r.normalize();
        return r;
    }

    Rat eval(const std::vector<Rat>& point) const {
        if (static_cast<int>(point.size()) < nv)
            fail(ErrorKind::Internal, "evaluation point too short");
        Rat acc(0);
        for (const auto& t : terms) {
            Rat m = t.second;
            for (int k = 0; k < nv; ++k)
                if (t.first[k] != 0) m *= rat_pow(point[k], t.first[k]);
            acc += m;
        }
        return acc;
    }

    int degree() const {
        int d = 0;
        for (const auto& t : terms) d = std::max(d, total_deg(t.first));
        return terms.empty() ? -1 : d;
    }

    int degree_in(int i) const {
        int d = 0;
        for (const auto& t : terms) d = std::max(d, t.first[i - 1]);
        return d;
    }

    bool depends_on(int i) const { return degree_in(i) > 0; }

    const Rat& leading_coeff() const {
        if (terms.empty()) fail(ErrorKind::Internal, "leading_coeff of zero");
        return terms.front().second;
    }

    // Coefficient of x_k^d viewed as a univariate polynomial in x_k.
    UPoly coeff_of_power(int k, int d) const {
        UPoly r(nv, nd);
        for (const auto& t : terms)
            if (t.first[k - 1] == d) {
                std::vector<int> e = t.first;
                e[k - 1] = 0;
                r.terms.emplace_back(std::move(e), t.second);
            }
        r.normalize();
        return r;
    }

    UPoly shifted_by_var_pow(int k, int d) const {
        UPoly r = *this;
        for (auto& t : r.terms) t.first[k - 1] += d;
        r.normalize();
        return r;
    }

    std::string str(const std::function<std::string(int)>& namer) const {
        if (terms.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& t : terms) {
            Rat c = t.second;
            std::string sign;
            if (first) {
                sign = (c < 0) ? "-" : "";
            } else {
                sign = (c < 0) ? " - " : " + ";
            }
            if (c < 0) c = -c;
            std::string mono;
            for (int k = 0; k < nv; ++k) {
                if (t.first[k] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += namer(k);
                if (t.first[k] != 1) mono += "^" + std::to_string(t.first[k]);
            }
            std::string body;
            if (mono.empty())
                body = rat_str(c);
            else if (c == 1)
                body = mono;
            else
                body = rat_str(c) + "*" + mono;
            out += sign + body;
            first = false;
        }
        return out;
    }

    std::string str() const {
        return str([this](int k) {
            if (k < nd) return "u[" + std::to_string(k + 1) + "]";
            return "C[" + std::to_string(k - nd + 1) + "]";
        });
    }
};

namespace detail {

// Exact division; both operands nonzero, division guaranteed to succeed in
// the contexts where this is used (fails loudly otherwise).
inline UPoly divexact(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) fail(ErrorKind::DivisionByZero, "polynomial division by zero");
    if (a.is_zero()) return UPoly(a.nv, a.nd);
    a.check_compatible(b);
    UPoly r = a;
    UPoly q(a.nv, a.nd);
    const auto& ltb = b.terms.front();
    while (!r.is_zero()) {
        const auto& ltr = r.terms.front();
        std::vector<int> e(a.nv);
        for (int k = 0; k < a.nv; ++k) {
            e[k] = ltr.first[k] - ltb.first[k];
            if (e[k] < 0) fail(ErrorKind::Internal, "inexact polynomial division");
        }
        UPoly qt(a.nv, a.nd);
        qt.terms.emplace_back(std::move(e), ltr.second / ltb.second);
        q = q + qt;
        r = r - qt * b;
    }
    return q;
}

inline UPoly gcd(const UPoly& a, const UPoly& b);

// gcd of the coefficients of p viewed as univariate in x_k.
inline UPoly content_in(const UPoly& p, int k) {
    UPoly c(p.nv, p.nd);
    for (int d = 0; d <= p.degree_in(k); ++d) {
        UPoly cd = p.coeff_of_power(k, d);
        if (cd.is_zero()) continue;
        c = c.is_zero() ? cd : gcd(c, cd);
        if (c.is_constant()) break;
    }
    return c;
}

inline UPoly pseudo_rem(const UPoly& a, const UPoly& b, int k) {
    UPoly r = a;
    int db = b.degree_in(k);
    UPoly lcb = b.coeff_of_power(k, db);
    while (!r.is_zero() && r.degree_in(k) >= db) {
        int dr = r.degree_in(k);
        UPoly lcr = r.coeff_of_power(k, dr);
        r = lcb * r - (lcr * b).shifted_by_var_pow(k, dr - db);
    }
    return r;
}

inline UPoly monic(const UPoly& p) {
    if (p.is_zero()) return p;
    return p * (Rat(1) / p.leading_coeff());
}

inline UPoly gcd(const UPoly& a, const UPoly& b) {
    if (a.is_zero()) return monic(b);
    if (b.is_zero()) return monic(a);
    a.check_compatible(b);
    if (a.is_constant() || b.is_constant())
        return UPoly::constant(a.nv, a.nd, Rat(1));
    int k = 0;
    for (int i = a.nv; i >= 1; --i)
        if (a.degree_in(i) > 0 || b.degree_in(i) > 0) {
            k = i;
            break;
        }
    UPoly ca = content_in(a, k), cb = content_in(b, k);
    UPoly c = gcd(ca, cb);
    UPoly A = divexact(a, ca), B = divexact(b, cb);
    if (A.degree_in(k) < B.degree_in(k)) std::swap(A, B);
    while (!B.is_zero()) {
        UPoly R = pseudo_rem(A, B, k);
        if (!R.is_zero()) {
            UPoly cr = content_in(R, k);
            R = divexact(R, cr);
        }
        A = B;
        B = R;
    }
    return monic(c * A);
}

inline UPoly lcm(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return UPoly(a.nv, a.nd);
    return monic(divexact(a * b, gcd(a, b)));
}

} // namespace detail

} // namespace vbh
