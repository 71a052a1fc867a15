#pragma once

#include <optional>
#include <set>
#include <vector>

#include "vbh/jet.hpp"

namespace vbh {

// Class of a differential polynomial modulo total x-derivatives. Equality is
// decided through the variational derivatives plus the jet-free component,
// which together detect exactness in every bidegree the constructions use.
class LocalFunctional {
public:
    DiffPoly rep;

    LocalFunctional() = default;
    explicit LocalFunctional(DiffPoly f) : rep(std::move(f)) {}

    int nv() const { return rep.nv; }
    int nd() const { return rep.nd; }

    DiffPoly vder(bool odd_kind, int i) const { return rep.variational(odd_kind, i); }

    DiffPoly jet_free_part() const {
        DiffPoly r(rep.nv, rep.nd);
        for (const auto& t : rep.terms)
            if (t.even.empty() && t.odd.empty() && t.logs.empty()) r.terms.push_back(t);
        return r;
    }

    bool is_zero() const {
        if (rep.is_zero()) return true;
        if (!jet_free_part().is_zero()) return false;
        for (int i = 1; i <= rep.nd; ++i) {
            if (!vder(false, i).is_zero()) return false;
            if (!vder(true, i).is_zero()) return false;
        }
        return true;
    }

    // Theta degree of the class; exact components of other degrees are
    // tolerated, genuinely mixed classes are rejected.
    int theta_degree() const {
        std::set<int> degs;
        std::map<int, DiffPoly> split;
        for (const auto& t : rep.terms) {
            auto [it, fresh] = split.try_emplace(t.deg_theta(), DiffPoly(rep.nv, rep.nd));
            it->second.terms.push_back(t);
        }
        for (auto& [p, comp] : split) {
            comp.normalize();
            if (!LocalFunctional(comp).is_zero()) degs.insert(p);
        }
        if (degs.size() > 1)
            fail(ErrorKind::NonHomogeneous, "functional mixes odd degrees");
        return degs.empty() ? 0 : *degs.begin();
    }

    friend LocalFunctional operator+(const LocalFunctional& a, const LocalFunctional& b) {
        return LocalFunctional(a.rep + b.rep);
    }
    friend LocalFunctional operator-(const LocalFunctional& a) { return LocalFunctional(-a.rep); }
    friend LocalFunctional operator-(const LocalFunctional& a, const LocalFunctional& b) {
        return LocalFunctional(a.rep - b.rep);
    }
    friend LocalFunctional operator*(const Scalar& c, const LocalFunctional& a) {
        return LocalFunctional(c * a.rep);
    }
    friend LocalFunctional operator*(const Rat& c, const LocalFunctional& a) {
        return LocalFunctional(c * a.rep);
    }
    friend bool operator==(const LocalFunctional& a, const LocalFunctional& b) {
        return (a - b).is_zero();
    }
    friend bool operator!=(const LocalFunctional& a, const LocalFunctional& b) {
        return !(a == b);
    }
};

inline LocalFunctional functional_of(DiffPoly f) { return LocalFunctional(std::move(f)); }

inline LocalFunctional schouten(const LocalFunctional& a, const LocalFunctional& b) {
    int p = a.theta_degree();
    (void)b.theta_degree();
    DiffPoly acc(a.nv(), a.nd());
    for (int i = 1; i <= a.nd(); ++i) {
        DiffPoly lhs = a.vder(true, i) * b.vder(false, i);
        DiffPoly rhs = a.vder(false, i) * b.vder(true, i);
        acc = acc + lhs + (p % 2 == 0 ? rhs : -rhs);
    }
    return LocalFunctional(acc);
}

// Derivation commuting with d/dx up to a dilation weight: the action on
// u^{i,s} is dx^s of the stored image plus s*mu*u^{i,s}, likewise on odd
// generators, so [X, dx] = mu*dx holds structurally.
class EvDerivation {
public:
    int nv = 0;
    int nd = 0;
    int superdeg = 0;
    Rat mu = Rat(0);
    std::optional<int> xdeg;
    std::vector<DiffPoly> u_img, th_img;

    EvDerivation() = default;
    EvDerivation(int nv_, int nd_, int superdeg_)
        : nv(nv_), nd(nd_), superdeg(superdeg_),
          u_img(nd_, DiffPoly(nv_, nd_)), th_img(nd_, DiffPoly(nv_, nd_)) {}

    bool is_zero() const {
        for (const auto& f : u_img)
            if (!f.is_zero()) return false;
        for (const auto& f : th_img)
            if (!f.is_zero()) return false;
        return mu == 0;
    }

    DiffPoly image(const JetVar& v) const {
        const DiffPoly& base = v.odd ? th_img[v.i - 1] : u_img[v.i - 1];
        DiffPoly r = base.dx_pow(v.s);
        if (mu != 0 && v.s > 0)
            r = r + (Rat(v.s) * mu) * DiffPoly::var(nv, nd, v);
        return r;
    }

    DiffPoly apply(const DiffPoly& f) const {
        DiffPoly acc(f.nv, f.nd);
        for (int i = 1; i <= f.nd; ++i) {
            int top_e = f.max_order(false, i);
            for (int s = 0; s <= top_e; ++s) {
                DiffPoly pf = f.partial(JetVar::u(i, s));
                if (pf.is_zero()) continue;
                acc = acc + image(JetVar::u(i, s)) * pf;
            }
            int top_o = f.max_order(true, i);
            for (int s = 0; s <= top_o; ++s) {
                DiffPoly pf = f.partial(JetVar::th(i, s));
                if (pf.is_zero()) continue;
                acc = acc + image(JetVar::th(i, s)) * pf;
            }
        }
        return acc;
    }

    friend EvDerivation operator+(const EvDerivation& a, const EvDerivation& b) {
        EvDerivation r = a;
        r.mu = a.mu + b.mu;
        r.xdeg = std::nullopt;
        for (int i = 0; i < r.nd; ++i) {
            r.u_img[i] = a.u_img[i] + b.u_img[i];
            r.th_img[i] = a.th_img[i] + b.th_img[i];
        }
        return r;
    }
    friend EvDerivation operator-(const EvDerivation& a) {
        EvDerivation r = a;
        r.mu = -a.mu;
        for (int i = 0; i < r.nd; ++i) {
            r.u_img[i] = -a.u_img[i];
            r.th_img[i] = -a.th_img[i];
        }
        return r;
    }
    friend EvDerivation operator-(const EvDerivation& a, const EvDerivation& b) {
        return a + (-b);
    }
    friend EvDerivation operator*(const Rat& c, const EvDerivation& a) {
        EvDerivation r = a;
        r.mu = c * a.mu;
        for (int i = 0; i < r.nd; ++i) {
            r.u_img[i] = c * a.u_img[i];
            r.th_img[i] = c * a.th_img[i];
        }
        return r;
    }
    friend bool operator==(const EvDerivation& a, const EvDerivation& b) {
        if (a.nd != b.nd || a.mu != b.mu) return false;
        for (int i = 0; i < a.nd; ++i)
            if (a.u_img[i] != b.u_img[i] || a.th_img[i] != b.th_img[i]) return false;
        return true;
    }
    friend bool operator!=(const EvDerivation& a, const EvDerivation& b) { return !(a == b); }
};

inline EvDerivation derivation_of(const LocalFunctional& P) {
    int p = P.theta_degree();
    EvDerivation X(P.nv(), P.nd(), p - 1);
    for (int i = 1; i <= P.nd(); ++i) {
        X.u_img[i - 1] = P.vder(true, i);
        DiffPoly t = P.vder(false, i);
        X.th_img[i - 1] = (p % 2 == 0) ? t : -t;
    }
    Bidegree b;
    if (P.rep.is_homogeneous(&b)) X.xdeg = b.d;
    return X;
}

inline EvDerivation commutator(const EvDerivation& X, const EvDerivation& Y) {
    if (X.nv != Y.nv || X.nd != Y.nd)
        fail(ErrorKind::MixedExtension, "derivations over different variable sets");
    EvDerivation Z(X.nv, X.nd, X.superdeg + Y.superdeg);
    bool flip = (X.superdeg % 2 != 0) && (Y.superdeg % 2 != 0);
    if (flip && (X.mu != 0 || Y.mu != 0))
        fail(ErrorKind::Internal, "dilation weights require an even operand");
    for (int i = 0; i < X.nd; ++i) {
        DiffPoly yu = Y.u_img[i], yth = Y.th_img[i];
        DiffPoly xu = X.u_img[i], xth = X.th_img[i];
        Z.u_img[i] = X.apply(yu) - (flip ? -Y.apply(xu) : Y.apply(xu));
        Z.th_img[i] = X.apply(yth) - (flip ? -Y.apply(xth) : Y.apply(xth));
    }
    Z.mu = Rat(0);
    if (X.xdeg && Y.xdeg) Z.xdeg = *X.xdeg + *Y.xdeg;
    return Z;
}

inline bool is_hamiltonian(const LocalFunctional& P) {
    if (P.theta_degree() != 2)
        fail(ErrorKind::NonHomogeneous, "structure must have odd degree two");
    return schouten(P, P).is_zero();
}

inline bool is_bihamiltonian(const LocalFunctional& P0, const LocalFunctional& P1) {
    return is_hamiltonian(P0) && is_hamiltonian(P1) && schouten(P0, P1).is_zero();
}

// A local functional of odd degree two together with the record that its
// self-bracket was checked.
struct HamStructure {
    LocalFunctional P;
    bool verified = false;

    static HamStructure checked(const LocalFunctional& P) {
        if (!is_hamiltonian(P))
            fail(ErrorKind::UnverifiedStructure, "self-bracket does not vanish");
        return HamStructure{P, true};
    }
};

} // namespace vbh
