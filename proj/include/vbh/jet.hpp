#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "vbh/error.hpp"
#include "vbh/scalar.hpp"

namespace vbh {

struct JetVar {
    bool odd = false;
    int i = 1;
    int s = 0;

    static JetVar u(int i, int s) { return JetVar{false, i, s}; }
    static JetVar th(int i, int s) { return JetVar{true, i, s}; }

    friend bool operator==(const JetVar& a, const JetVar& b) {
        return a.odd == b.odd && a.i == b.i && a.s == b.s;
    }
    friend bool operator<(const JetVar& a, const JetVar& b) {
        return std::tie(a.odd, a.i, a.s) < std::tie(b.odd, b.i, b.s);
    }

    std::string str() const {
        std::string head = odd ? "th" : "u";
        return head + "[" + std::to_string(i) + "," + std::to_string(s) + "]";
    }
};

struct Bidegree {
    int p = 0; // theta degree
    int d = 0; // x degree

    friend bool operator==(const Bidegree& a, const Bidegree& b) {
        return a.p == b.p && a.d == b.d;
    }
    friend bool operator<(const Bidegree& a, const Bidegree& b) {
        return std::tie(a.p, a.d) < std::tie(b.p, b.d);
    }
    std::string str() const {
        return "(" + std::to_string(p) + "," + std::to_string(d) + ")";
    }
};

// One monomial: scalar coefficient, even jet factors u^{i,s} with s >= 1,
// odd factors th_i^s in strictly ascending (i,s) order, and optional log
// symbols L_i used only by the tau construction. Signs live in the
// coefficient. Negative exponents are admitted only on u^{i,1}.
struct Term {
    Scalar c;
    std::vector<std::tuple<int, int, int>> even; // (i, s, exponent)
    std::vector<std::pair<int, int>> odd;        // (i, s)
    std::vector<std::pair<int, int>> logs;       // (i, exponent)

    bool same_monomial(const Term& o) const {
        return even == o.even && odd == o.odd && logs == o.logs;
    }
    friend bool monomial_less(const Term& a, const Term& b) {
        return std::tie(a.even, a.odd, a.logs) < std::tie(b.even, b.odd, b.logs);
    }

    int deg_x() const {
        int d = 0;
        for (const auto& [i, s, e] : even) d += s * e;
        for (const auto& [i, s] : odd) d += s;
        return d;
    }
    int deg_theta() const { return static_cast<int>(odd.size()); }
};

namespace detail {

// Sort an odd-generator list, counting transpositions; nullopt on a repeat.
inline std::optional<std::pair<std::vector<std::pair<int, int>>, int>>
sort_odd(std::vector<std::pair<int, int>> v) {
    int swaps = 0;
    for (size_t i = 1; i < v.size(); ++i)
        for (size_t j = i; j > 0 && v[j] < v[j - 1]; --j) {
            std::swap(v[j], v[j - 1]);
            ++swaps;
        }
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] == v[i - 1]) return std::nullopt;
    return std::make_pair(std::move(v), swaps % 2 == 0 ? 1 : -1);
}

inline void even_insert(std::vector<std::tuple<int, int, int>>& even, int i, int s, int delta) {
    auto key = std::make_tuple(i, s, 0);
    auto it = std::lower_bound(even.begin(), even.end(), key,
                               [](const auto& a, const auto& b) {
                                   return std::tie(std::get<0>(a), std::get<1>(a)) <
                                          std::tie(std::get<0>(b), std::get<1>(b));
                               });
    if (it != even.end() && std::get<0>(*it) == i && std::get<1>(*it) == s) {
        std::get<2>(*it) += delta;
        if (std::get<2>(*it) == 0) even.erase(it);
    } else {
        even.insert(it, {i, s, delta});
    }
}

inline void logs_insert(std::vector<std::pair<int, int>>& logs, int i, int delta) {
    auto it = std::lower_bound(logs.begin(), logs.end(), std::make_pair(i, 0),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    if (it != logs.end() && it->first == i) {
        it->second += delta;
        if (it->second == 0) logs.erase(it);
    } else {
        logs.insert(it, {i, delta});
    }
}

} // namespace detail

// Element of the graded super ring of differential polynomials in the
// fields u^1..u^nd (scalar coefficients may carry extra constant symbols,
// hence nv >= nd).
class DiffPoly {
public:
    int nv = 0;
    int nd = 0;
    std::vector<Term> terms;

    DiffPoly() = default;
    DiffPoly(int nv_, int nd_) : nv(nv_), nd(nd_) {}

    static DiffPoly zero(int nv, int nd) { return DiffPoly(nv, nd); }

    static DiffPoly constant(int nv, int nd, const Scalar& c) {
        DiffPoly p(nv, nd);
        if (!c.is_zero()) p.terms.push_back(Term{c, {}, {}, {}});
        return p;
    }
    static DiffPoly constant(int nv, int nd, const Rat& c) {
        return constant(nv, nd, Scalar::constant(nv, nd, c));
    }

    static DiffPoly var(int nv, int nd, const JetVar& v) {
        DiffPoly p(nv, nd);
        Term t;
        t.c = Scalar::constant(nv, nd, Rat(1));
        if (v.odd) {
            t.odd.push_back({v.i, v.s});
        } else if (v.s == 0) {
            t.c = Scalar(BaseScalar::var(nv, nd, v.i));
        } else {
            t.even.push_back({v.i, v.s, 1});
        }
        p.terms.push_back(std::move(t));
        return p;
    }

    Scalar unit_scalar() const { return Scalar::constant(nv, nd, Rat(1)); }

    bool is_zero() const { return terms.empty(); }

    void check_compatible(const DiffPoly& o) const {
        if (nv != o.nv || nd != o.nd)
            fail(ErrorKind::MixedExtension, "jet elements over different variable sets");
    }

    void normalize() {
        std::sort(terms.begin(), terms.end(),
                  [](const Term& a, const Term& b) { return monomial_less(a, b); });
        std::vector<Term> out;
        for (auto& t : terms) {
            if (!out.empty() && out.back().same_monomial(t))
                out.back().c = out.back().c + t.c;
            else
                out.push_back(std::move(t));
        }
        terms.clear();
        for (auto& t : out)
            if (!t.c.is_zero()) terms.push_back(std::move(t));
    }

    friend DiffPoly operator+(const DiffPoly& a, const DiffPoly& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        a.check_compatible(b);
        DiffPoly r = a;
        r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
        r.normalize();
        return r;
    }
    friend DiffPoly operator-(const DiffPoly& a) {
        DiffPoly r = a;
        for (auto& t : r.terms) t.c = -t.c;
        return r;
    }
    friend DiffPoly operator-(const DiffPoly& a, const DiffPoly& b) { return a + (-b); }

    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
        if (a.is_zero()) return a;
        if (b.is_zero()) return b;
        a.check_compatible(b);
        DiffPoly r(a.nv, a.nd);
        for (const auto& ta : a.terms)
            for (const auto& tb : b.terms) {
                std::vector<std::pair<int, int>> odd;
                int cross = 0;
                {
                    bool dup = false;
                    std::vector<std::pair<int, int>> merged;
                    size_t ja = 0, jb = 0;
                    while (ja < ta.odd.size() && jb < tb.odd.size()) {
                        if (ta.odd[ja] == tb.odd[jb]) {
                            dup = true;
                            break;
                        }
                        if (ta.odd[ja] < tb.odd[jb]) {
                            merged.push_back(ta.odd[ja++]);
                        } else {
                            cross += static_cast<int>(ta.odd.size() - ja);
                            merged.push_back(tb.odd[jb++]);
                        }
                    }
                    if (dup) continue;
                    while (ja < ta.odd.size()) merged.push_back(ta.odd[ja++]);
                    while (jb < tb.odd.size()) merged.push_back(tb.odd[jb++]);
                    odd = std::move(merged);
                }
                Term t;
                t.c = ta.c * tb.c;
                if (cross % 2 != 0) t.c = -t.c;
                t.odd = std::move(odd);
                t.even = ta.even;
                for (const auto& [i, s, e] : tb.even) detail::even_insert(t.even, i, s, e);
                t.logs = ta.logs;
                for (const auto& [i, e] : tb.logs) detail::logs_insert(t.logs, i, e);
                r.terms.push_back(std::move(t));
            }
        r.normalize();
        return r;
    }

    friend DiffPoly operator*(const Scalar& c, const DiffPoly& a) {
        if (c.is_zero() || a.is_zero()) return DiffPoly(a.nv, a.nd);
        DiffPoly r = a;
        for (auto& t : r.terms) t.c = c * t.c;
        r.normalize();
        return r;
    }
    friend DiffPoly operator*(const DiffPoly& a, const Scalar& c) { return c * a; }
    friend DiffPoly operator*(const Rat& c, const DiffPoly& a) {
        return Scalar::constant(a.nv, a.nd, c) * a;
    }
    friend DiffPoly operator*(const DiffPoly& a, const Rat& c) { return c * a; }

    friend bool operator==(const DiffPoly& a, const DiffPoly& b) {
        if (a.terms.size() != b.terms.size()) return false;
        for (size_t k = 0; k < a.terms.size(); ++k) {
            if (!a.terms[k].same_monomial(b.terms[k])) return false;
            if (!(a.terms[k].c == b.terms[k].c)) return false;
        }
        return true;
    }
    friend bool operator!=(const DiffPoly& a, const DiffPoly& b) { return !(a == b); }

    // Left partial derivative with respect to one jet generator.
    DiffPoly partial(const JetVar& v) const {
        DiffPoly r(nv, nd);
        for (const auto& t : terms) {
            if (v.odd) {
                for (size_t k = 0; k < t.odd.size(); ++k)
                    if (t.odd[k] == std::make_pair(v.i, v.s)) {
                        Term nt = t;
                        nt.odd.erase(nt.odd.begin() + static_cast<long>(k));
                        if (k % 2 != 0) nt.c = -nt.c;
                        r.terms.push_back(std::move(nt));
                        break;
                    }
            } else if (v.s == 0) {
                Scalar dc = t.c.partial_u(v.i);
                if (!dc.is_zero()) {
                    Term nt = t;
                    nt.c = std::move(dc);
                    r.terms.push_back(std::move(nt));
                }
            } else {
                for (const auto& [i, s, e] : t.even)
                    if (i == v.i && s == v.s) {
                        Term nt = t;
                        nt.c = t.c * Scalar::constant(nv, nd, Rat(e));
                        detail::even_insert(nt.even, i, s, -1);
                        r.terms.push_back(std::move(nt));
                        break;
                    }
                if (v.s == 1) {
                    for (const auto& [i, e] : t.logs)
                        if (i == v.i) {
                            Term nt = t;
                            nt.c = t.c * Scalar::constant(nv, nd, Rat(e));
                            detail::logs_insert(nt.logs, i, -1);
                            detail::even_insert(nt.even, i, 1, -1);
                            r.terms.push_back(std::move(nt));
                            break;
                        }
                }
            }
        }
        r.normalize();
        return r;
    }

    // The total x-derivative.
    DiffPoly dx() const {
        DiffPoly r(nv, nd);
        for (const auto& t : terms) {
            for (int i = 1; i <= nd; ++i) {
                Scalar dc = t.c.partial_u(i);
                if (dc.is_zero()) continue;
                Term nt = t;
                nt.c = std::move(dc);
                detail::even_insert(nt.even, i, 1, 1);
                r.terms.push_back(std::move(nt));
            }
            for (const auto& [i, s, e] : t.even) {
                Term nt = t;
                nt.c = t.c * Scalar::constant(nv, nd, Rat(e));
                detail::even_insert(nt.even, i, s, -1);
                detail::even_insert(nt.even, i, s + 1, 1);
                r.terms.push_back(std::move(nt));
            }
            for (size_t k = 0; k < t.odd.size(); ++k) {
                auto [i, s] = t.odd[k];
                auto odd = t.odd;
                odd[k] = {i, s + 1};
                auto sorted = detail::sort_odd(std::move(odd));
                if (!sorted) continue;
                Term nt = t;
                nt.odd = std::move(sorted->first);
                if (sorted->second < 0) nt.c = -nt.c;
                r.terms.push_back(std::move(nt));
            }
            for (const auto& [i, e] : t.logs) {
                Term nt = t;
                nt.c = t.c * Scalar::constant(nv, nd, Rat(e));
                detail::logs_insert(nt.logs, i, -1);
                detail::even_insert(nt.even, i, 1, -1);
                detail::even_insert(nt.even, i, 2, 1);
                r.terms.push_back(std::move(nt));
            }
        }
        r.normalize();
        return r;
    }

    DiffPoly dx_pow(int k) const {
        DiffPoly r = *this;
        for (int j = 0; j < k; ++j) r = r.dx();
        return r;
    }

    int max_order(bool odd_kind, int i) const {
        int m = -1;
        for (const auto& t : terms) {
            if (odd_kind) {
                for (const auto& [j, s] : t.odd)
                    if (j == i) m = std::max(m, s);
            } else {
                for (const auto& [j, s, e] : t.even)
                    if (j == i) m = std::max(m, s);
                for (const auto& [j, e] : t.logs)
                    if (j == i) m = std::max(m, 1);
                m = std::max(m, 0);
            }
        }
        return m;
    }

    // Variational derivative with respect to u^i (kind even) or th_i (odd).
    DiffPoly variational(bool odd_kind, int i) const {
        DiffPoly acc(nv, nd);
        int top = max_order(odd_kind, i);
        for (int s = 0; s <= top; ++s) {
            DiffPoly p = partial(JetVar{odd_kind, i, s});
            if (p.is_zero()) continue;
            p = p.dx_pow(s);
            acc = (s % 2 == 0) ? acc + p : acc - p;
        }
        return acc;
    }

    std::map<Bidegree, DiffPoly> grade_components() const {
        std::map<Bidegree, DiffPoly> out;
        for (const auto& t : terms) {
            if (!t.logs.empty())
                fail(ErrorKind::NotPolynomial, "log symbols carry no x-grading");
            Bidegree b{t.deg_theta(), t.deg_x()};
            auto it = out.find(b);
            if (it == out.end()) {
                DiffPoly p(nv, nd);
                p.terms.push_back(t);
                out.emplace(b, std::move(p));
            } else {
                it->second.terms.push_back(t);
            }
        }
        for (auto& [b, p] : out) p.normalize();
        return out;
    }

    bool is_homogeneous(Bidegree* out = nullptr) const {
        auto comps = grade_components();
        if (comps.size() > 1) return false;
        if (out && comps.size() == 1) *out = comps.begin()->first;
        if (out && comps.empty()) *out = Bidegree{0, 0};
        return true;
    }

    int theta_degree() const {
        int p = -1;
        for (const auto& t : terms) {
            int q = t.deg_theta();
            if (p >= 0 && q != p)
                fail(ErrorKind::WrongBidegree, "element is not homogeneous in the odd grading");
            p = q;
        }
        return p < 0 ? 0 : p;
    }

    // Exit gate for the extended ring: all logs and negative powers must
    // have cancelled.
    DiffPoly assert_polynomial() const {
        for (const auto& t : terms) {
            bool bad = !t.logs.empty();
            for (const auto& [i, s, e] : t.even)
                if (e < 0) bad = true;
            if (bad) {
                DiffPoly res(nv, nd);
                res.terms.push_back(t);
                fail(ErrorKind::NotPolynomial, "non-polynomial residue: " + res.str());
            }
        }
        return *this;
    }

    bool has_logs() const {
        for (const auto& t : terms)
            if (!t.logs.empty()) return true;
        return false;
    }

    DiffPoly times_lambda(int k = 1) const {
        DiffPoly r = *this;
        for (auto& t : r.terms) t.c = t.c.times_lambda_power(k);
        return r;
    }

    std::string str() const {
        if (terms.empty()) return "0";
        std::string out;
        for (const auto& t : terms) {
            if (!out.empty()) out += " + ";
            std::string cs = t.c.str();
            std::string mono;
            for (const auto& [i, s, e] : t.even) {
                if (!mono.empty()) mono += "*";
                mono += JetVar::u(i, s).str();
                if (e != 1) mono += "^" + std::to_string(e);
            }
            for (const auto& [i, s] : t.odd) {
                if (!mono.empty()) mono += "*";
                mono += JetVar::th(i, s).str();
            }
            for (const auto& [i, e] : t.logs) {
                if (!mono.empty()) mono += "*";
                mono += "L[" + std::to_string(i) + "]";
                if (e != 1) mono += "^" + std::to_string(e);
            }
            if (mono.empty()) {
                out += cs;
            } else if (cs == "1") {
                out += mono;
            } else if (cs == "-1") {
                out += "-" + mono;
            } else {
                // a coefficient is safe unwrapped only when it is a single
                // parenthesized group or free of operator characters
                bool grouped = false;
                if (cs.front() == '(') {
                    int depth = 0;
                    grouped = true;
                    for (size_t k = 0; k < cs.size(); ++k) {
                        if (cs[k] == '(') ++depth;
                        if (cs[k] == ')') --depth;
                        if (depth == 0 && k + 1 < cs.size()) {
                            grouped = false;
                            break;
                        }
                    }
                }
                bool wrap = !grouped && cs.find_first_of("+-*/ ") != std::string::npos;
                out += (wrap ? "(" + cs + ")" : cs) + "*" + mono;
            }
        }
        return out;
    }
};

using OddMono = std::vector<std::pair<int, int>>;
using JetPoint = std::map<std::pair<int, int>, Rat>;

// Independent numeric oracle: evaluate every even variable, leaving the odd
// monomials symbolic.
inline std::map<OddMono, Rat> eval_oracle(const DiffPoly& a, const JetPoint& pt) {
    std::map<OddMono, Rat> out;
    std::vector<Rat> base(a.nv, Rat(0));
    for (int i = 1; i <= a.nv; ++i) {
        auto it = pt.find({i, 0});
        if (it != pt.end()) base[i - 1] = it->second;
    }
    for (const auto& t : a.terms) {
        if (!t.logs.empty())
            fail(ErrorKind::NotPolynomial, "log symbols cannot be evaluated");
        Rat v = t.c.eval(base);
        for (const auto& [i, s, e] : t.even) {
            auto it = pt.find({i, s});
            if (it == pt.end())
                fail(ErrorKind::ValidationError,
                     "missing assignment for " + JetVar::u(i, s).str());
            if (it->second == 0 && e < 0)
                fail(ErrorKind::PoleAtPoint, "negative power of a vanishing jet variable");
            v *= rat_pow(it->second, e);
        }
        if (v == 0) continue;
        auto it = out.find(t.odd);
        if (it == out.end())
            out[t.odd] = v;
        else {
            it->second += v;
            if (it->second == 0) out.erase(it);
        }
    }
    return out;
}

} // namespace vbh
