#pragma once

#include <map>
#include <vector>

#include "vbh/functional.hpp"

namespace vbh {

class OneForm;

// Unique representative of a 1-form class modulo d/dx: coefficients of
// du^{i,0} and dth_{i,0} only.
class ReducedOneForm {
public:
    int nv = 0;
    int nd = 0;
    std::vector<DiffPoly> g, h;

    ReducedOneForm() = default;
    ReducedOneForm(int nv_, int nd_)
        : nv(nv_), nd(nd_), g(nd_, DiffPoly(nv_, nd_)), h(nd_, DiffPoly(nv_, nd_)) {}

    bool is_zero() const {
        for (const auto& a : g)
            if (!a.is_zero()) return false;
        for (const auto& a : h)
            if (!a.is_zero()) return false;
        return true;
    }

    friend ReducedOneForm operator+(const ReducedOneForm& a, const ReducedOneForm& b) {
        ReducedOneForm r = a;
        for (int i = 0; i < r.nd; ++i) {
            r.g[i] = a.g[i] + b.g[i];
            r.h[i] = a.h[i] + b.h[i];
        }
        return r;
    }
    friend ReducedOneForm operator-(const ReducedOneForm& a) {
        ReducedOneForm r = a;
        for (int i = 0; i < r.nd; ++i) {
            r.g[i] = -a.g[i];
            r.h[i] = -a.h[i];
        }
        return r;
    }
    friend ReducedOneForm operator-(const ReducedOneForm& a, const ReducedOneForm& b) {
        return a + (-b);
    }
    friend ReducedOneForm operator*(const Rat& c, const ReducedOneForm& a) {
        ReducedOneForm r = a;
        for (int i = 0; i < r.nd; ++i) {
            r.g[i] = c * a.g[i];
            r.h[i] = c * a.h[i];
        }
        return r;
    }
    friend bool operator==(const ReducedOneForm& a, const ReducedOneForm& b) {
        return a.g == b.g && a.h == b.h;
    }
    friend bool operator!=(const ReducedOneForm& a, const ReducedOneForm& b) {
        return !(a == b);
    }

    OneForm as_form() const;

    ReducedOneForm times_lambda(int k = 1) const {
        ReducedOneForm r = *this;
        for (int i = 0; i < nd; ++i) {
            r.g[i] = g[i].times_lambda(k);
            r.h[i] = h[i].times_lambda(k);
        }
        return r;
    }

    // Super degree p of the class, with g_i of odd degree p and h^i of p-1.
    int theta_degree() const {
        int p = -1;
        auto feed = [&](int q) {
            if (p >= 0 && q != p)
                fail(ErrorKind::NonHomogeneous, "form mixes odd degrees");
            p = q;
        };
        for (const auto& a : g)
            if (!a.is_zero()) feed(a.theta_degree());
        for (const auto& a : h)
            if (!a.is_zero()) feed(a.theta_degree() + 1);
        return p < 0 ? 0 : p;
    }

    Bidegree bidegree() const {
        int p = theta_degree(), d = -1;
        auto feed = [&](int dd) {
            if (d >= 0 && dd != d)
                fail(ErrorKind::NonHomogeneous, "form mixes x-degrees");
            d = dd;
        };
        for (const auto& a : g) {
            if (a.is_zero()) continue;
            Bidegree b;
            if (!a.is_homogeneous(&b))
                fail(ErrorKind::NonHomogeneous, "form mixes x-degrees");
            feed(b.d);
        }
        for (const auto& a : h) {
            if (a.is_zero()) continue;
            Bidegree b;
            if (!a.is_homogeneous(&b))
                fail(ErrorKind::NonHomogeneous, "form mixes x-degrees");
            feed(b.d);
        }
        return Bidegree{p, d < 0 ? 0 : d};
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::string out;
        auto emit = [&](const DiffPoly& a, const std::string& gen) {
            if (a.is_zero()) return;
            if (!out.empty()) out += " + ";
            out += "(" + a.str() + ")*" + gen;
        };
        for (int i = 0; i < nd; ++i)
            emit(g[i], "du[" + std::to_string(i + 1) + ",0]");
        for (int i = 0; i < nd; ++i)
            emit(h[i], "dth[" + std::to_string(i + 1) + ",0]");
        return "int(" + out + ")";
    }
};

// General 1-form with coefficients of du^{i,s} and dth_{i,s}.
class OneForm {
public:
    int nv = 0;
    int nd = 0;
    std::map<std::pair<int, int>, DiffPoly> du, dth;

    OneForm() = default;
    OneForm(int nv_, int nd_) : nv(nv_), nd(nd_) {}

    void normalize() {
        for (auto it = du.begin(); it != du.end();)
            it = it->second.is_zero() ? du.erase(it) : std::next(it);
        for (auto it = dth.begin(); it != dth.end();)
            it = it->second.is_zero() ? dth.erase(it) : std::next(it);
    }

    bool is_zero() const { return du.empty() && dth.empty(); }

    void add_du(int i, int s, const DiffPoly& a) {
        if (a.is_zero()) return;
        auto [it, fresh] = du.try_emplace({i, s}, a);
        if (!fresh) {
            it->second = it->second + a;
            if (it->second.is_zero()) du.erase(it);
        }
    }
    void add_dth(int i, int s, const DiffPoly& a) {
        if (a.is_zero()) return;
        auto [it, fresh] = dth.try_emplace({i, s}, a);
        if (!fresh) {
            it->second = it->second + a;
            if (it->second.is_zero()) dth.erase(it);
        }
    }

    friend OneForm operator+(const OneForm& a, const OneForm& b) {
        OneForm r = a;
        for (const auto& [k, v] : b.du) r.add_du(k.first, k.second, v);
        for (const auto& [k, v] : b.dth) r.add_dth(k.first, k.second, v);
        return r;
    }
    friend OneForm operator-(const OneForm& a) {
        OneForm r = a;
        for (auto& [k, v] : r.du) v = -v;
        for (auto& [k, v] : r.dth) v = -v;
        return r;
    }
    friend OneForm operator-(const OneForm& a, const OneForm& b) { return a + (-b); }
    friend OneForm operator*(const DiffPoly& c, const OneForm& a) {
        OneForm r(a.nv, a.nd);
        for (const auto& [k, v] : a.du) r.add_du(k.first, k.second, c * v);
        for (const auto& [k, v] : a.dth) r.add_dth(k.first, k.second, c * v);
        return r;
    }
    friend OneForm operator*(const Rat& c, const OneForm& a) {
        OneForm r = a;
        for (auto& [k, v] : r.du) v = c * v;
        for (auto& [k, v] : r.dth) v = c * v;
        r.normalize();
        return r;
    }
    friend bool operator==(const OneForm& a, const OneForm& b) {
        return a.du == b.du && a.dth == b.dth;
    }
    friend bool operator!=(const OneForm& a, const OneForm& b) { return !(a == b); }

    int theta_degree() const {
        int p = -1;
        auto feed = [&](int q) {
            if (p >= 0 && q != p)
                fail(ErrorKind::NonHomogeneous, "form mixes odd degrees");
            p = q;
        };
        for (const auto& [k, v] : du) feed(v.theta_degree());
        for (const auto& [k, v] : dth) feed(v.theta_degree() + 1);
        return p < 0 ? 0 : p;
    }

    OneForm times_lambda(int k = 1) const {
        OneForm r(nv, nd);
        for (const auto& [key, v] : du) r.du[key] = v.times_lambda(k);
        for (const auto& [key, v] : dth) r.dth[key] = v.times_lambda(k);
        return r;
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::string out;
        auto emit = [&](const std::pair<int, int>& k, const DiffPoly& v, bool odd) {
            if (!out.empty()) out += " + ";
            std::string gen = (odd ? "dth[" : "du[") + std::to_string(k.first) + "," +
                              std::to_string(k.second) + "]";
            out += "(" + v.str() + ")*" + gen;
        };
        for (const auto& [k, v] : du) emit(k, v, false);
        for (const auto& [k, v] : dth) emit(k, v, true);
        return out;
    }
};

inline OneForm ReducedOneForm::as_form() const {
    OneForm w(nv, nd);
    for (int i = 0; i < nd; ++i) {
        w.add_du(i + 1, 0, g[i]);
        w.add_dth(i + 1, 0, h[i]);
    }
    return w;
}

// The de Rham differential of a density, expanded over all jet generators
// with coefficients standing to the left of the form generators.
inline OneForm delta_of(const DiffPoly& f) {
    OneForm w(f.nv, f.nd);
    std::map<int, DiffPoly> comps;
    for (const auto& t : f.terms) {
        auto [it, fresh] = comps.try_emplace(t.deg_theta(), DiffPoly(f.nv, f.nd));
        it->second.terms.push_back(t);
    }
    for (auto& [p, comp] : comps) {
        comp.normalize();
        bool plus = (p % 2) == 1; // sign (-1)^{p-1}
        for (int i = 1; i <= f.nd; ++i) {
            int top_e = comp.max_order(false, i);
            for (int s = 0; s <= top_e; ++s)
                w.add_du(i, s, comp.partial(JetVar::u(i, s)));
            int top_o = comp.max_order(true, i);
            for (int s = 0; s <= top_o; ++s) {
                DiffPoly a = comp.partial(JetVar::th(i, s));
                w.add_dth(i, s, plus ? a : -a);
            }
        }
    }
    return w;
}

inline ReducedOneForm reduce_mod_dx(const OneForm& w) {
    ReducedOneForm r(w.nv, w.nd);
    for (const auto& [k, v] : w.du) {
        DiffPoly a = v.dx_pow(k.second);
        r.g[k.first - 1] = r.g[k.first - 1] + (k.second % 2 == 0 ? a : -a);
    }
    for (const auto& [k, v] : w.dth) {
        DiffPoly a = v.dx_pow(k.second);
        r.h[k.first - 1] = r.h[k.first - 1] + (k.second % 2 == 0 ? a : -a);
    }
    return r;
}

inline ReducedOneForm de_rham(const LocalFunctional& F) {
    return reduce_mod_dx(delta_of(F.rep));
}

inline OneForm lie_derivative(const EvDerivation& X, const OneForm& w) {
    if (w.is_zero()) return w;
    int p = w.theta_degree();
    int q = X.superdeg;
    bool s1 = ((p * q) % 2) == 0;       // sign (-1)^{pq}
    bool s2 = (((p - 1) * q) % 2) == 0; // sign (-1)^{(p-1)q}
    OneForm r(w.nv, w.nd);
    for (const auto& [k, v] : w.du) {
        r.add_du(k.first, k.second, X.apply(v));
        OneForm dxv = delta_of(X.image(JetVar::u(k.first, k.second)));
        OneForm piece = v * dxv;
        r = r + (s1 ? piece : -piece);
    }
    for (const auto& [k, v] : w.dth) {
        r.add_dth(k.first, k.second, X.apply(v));
        OneForm dxv = delta_of(X.image(JetVar::th(k.first, k.second)));
        OneForm piece = v * dxv;
        r = r + (s2 ? piece : -piece);
    }
    return r;
}

inline ReducedOneForm lie_derivative(const EvDerivation& X, const ReducedOneForm& w) {
    return reduce_mod_dx(lie_derivative(X, w.as_form()));
}

inline OneForm dtilde(const HamStructure& P, const OneForm& w) {
    if (!P.verified)
        fail(ErrorKind::UnverifiedStructure, "structure has not been verified");
    return lie_derivative(derivation_of(P.P), w);
}

inline ReducedOneForm dtilde(const HamStructure& P, const ReducedOneForm& w) {
    if (!P.verified)
        fail(ErrorKind::UnverifiedStructure, "structure has not been verified");
    return lie_derivative(derivation_of(P.P), w);
}

// The pencil operator d_lambda = Dtilde_1 - lambda * Dtilde_0.
inline ReducedOneForm pencil_operator(const HamStructure& P0, const HamStructure& P1,
                                      const ReducedOneForm& w) {
    return dtilde(P1, w) - dtilde(P0, w).times_lambda(1);
}

inline ReducedOneForm phi(const EvDerivation& X) {
    ReducedOneForm r(X.nv, X.nd);
    for (int i = 0; i < X.nd; ++i) {
        r.g[i] = -X.th_img[i];
        r.h[i] = X.u_img[i];
    }
    return r;
}

inline EvDerivation phi_inverse(const ReducedOneForm& w) {
    int p = w.is_zero() ? 1 : w.theta_degree();
    EvDerivation X(w.nv, w.nd, p - 1);
    for (int i = 0; i < w.nd; ++i) {
        X.u_img[i] = w.h[i];
        X.th_img[i] = -w.g[i];
    }
    return X;
}

inline bool intertwine_check(const HamStructure& P, const EvDerivation& X) {
    EvDerivation bracket = commutator(derivation_of(P.P), X);
    ReducedOneForm lhs = phi(bracket);
    ReducedOneForm rhs = dtilde(P, phi(X));
    return lhs == rhs;
}

} // namespace vbh
