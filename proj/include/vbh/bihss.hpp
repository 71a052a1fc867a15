#pragma once

// Semisimple hydrodynamic pairs in canonical coordinates, together with the
// constructions attached to them: index functions, the tau classes spanning
// the degree-(1,2) cohomology, normal forms with their gauge records, the
// conformal classification, and the pencil operators Delta_{-1} / dhat_i /
// the Psi rescaling / rotation coefficients.

#include <utility>
#include <vector>

#include "vbh/forms.hpp"

namespace vbh {

// ---------------------------------------------------------------------------
// Pair assembly.

class SemisimpleHydroPair {
public:
    int n = 0;   // number of canonical coordinates (dynamic variables)
    int nv = 0;  // total symbol count of the coefficient ring (>= n)
    std::vector<BaseScalar> f;                 // metric entries f^i, index i-1
    std::vector<std::vector<BaseScalar>> a, b; // a[i-1][j-1] = 1/2 d_i f^j,
                                               // b[i-1][j-1] = 1/2 f^i d_i f^j / f^j
    HamStructure H0, H1;
    EvDerivation D0, D1;
    RootRegistry roots;      // quadratic tower with s_i^2 = f^i

    const LocalFunctional& P0() const { return H0.P; }
    const LocalFunctional& P1() const { return H1.P; }
    bool verified() const { return H0.verified && H1.verified; }
};

namespace detail {

// Density 1/2 sum_i diag^i th_i th_i^1 + sum_{i<j} W^{ij} th_i th_j with
// W^{ij} = 1/2 (diag^i/f^j) d_i f^j u^{j,1} - 1/2 (diag^j/f^i) d_j f^i u^{i,1}.
// diag = f yields the first structure, diag^i = u^i f^i the second; the
// diagonal W^{ii} would multiply th_i th_i = 0 and is omitted.
inline LocalFunctional hydro_structure(const std::vector<BaseScalar>& diag,
                                       const std::vector<BaseScalar>& f) {
    const int n = static_cast<int>(f.size());
    const int nv = f[0].nv();
    const BaseScalar half = BaseScalar::constant(nv, n, Rat(1, 2));
    auto U = [&](int i, int s) { return DiffPoly::var(nv, n, JetVar::u(i, s)); };
    auto TH = [&](int i, int s) { return DiffPoly::var(nv, n, JetVar::th(i, s)); };

    DiffPoly dens(nv, n);
    for (int i = 1; i <= n; ++i)
        dens = dens + Scalar(half * diag[i - 1]) * (TH(i, 0) * TH(i, 1));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            BaseScalar wij = half * diag[i - 1] * f[j - 1].partial_u(i) / f[j - 1];
            BaseScalar wji = half * diag[j - 1] * f[i - 1].partial_u(j) / f[i - 1];
            DiffPoly W = Scalar(wij) * U(j, 1) - Scalar(wji) * U(i, 1);
            dens = dens + W * (TH(i, 0) * TH(j, 0));
        }
    return functional_of(dens);
}

inline SemisimpleHydroPair assemble_pair(const std::vector<BaseScalar>& f, bool verify) {
    if (f.empty()) fail(ErrorKind::ValidationError, "pair needs at least one coordinate");
    const int n = static_cast<int>(f.size());
    const int nv = f[0].nv();
    if (nv < n) fail(ErrorKind::ValidationError, "coefficient ring too small for the pair");
    std::vector<BaseScalar> g;
    for (int i = 1; i <= n; ++i) {
        if (f[i - 1].is_zero())
            fail(ErrorKind::ZeroMetricEntry, "metric entry f^" + std::to_string(i));
        if (f[i - 1].nv() != nv || f[i - 1].nd() != n)
            fail(ErrorKind::ValidationError, "metric entries live in different rings");
        g.push_back(BaseScalar::var(nv, n, i) * f[i - 1]);
    }

    LocalFunctional P0 = hydro_structure(f, f);
    LocalFunctional P1 = hydro_structure(g, f);
    if (verify && !is_bihamiltonian(P0, P1))
        fail(ErrorKind::NotBihamiltonian, "assembled pair fails the bracket checks");

    SemisimpleHydroPair S;
    S.n = n;
    S.nv = nv;
    S.f = f;
    S.a.assign(n, std::vector<BaseScalar>());
    S.b.assign(n, std::vector<BaseScalar>());
    const BaseScalar half = BaseScalar::constant(nv, n, Rat(1, 2));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            BaseScalar d = f[j - 1].partial_u(i);
            S.a[i - 1].push_back(half * d);
            S.b[i - 1].push_back(half * f[i - 1] * d / f[j - 1]);
        }
    S.H0 = HamStructure{P0, verify};
    S.H1 = HamStructure{P1, verify};
    S.D0 = derivation_of(P0);
    S.D1 = derivation_of(P1);
    S.roots = std::make_shared<const std::vector<BaseScalar>>(f);
    return S;
}

} // namespace detail

inline SemisimpleHydroPair build_pair(const std::vector<BaseScalar>& f) {
    return detail::assemble_pair(f, true);
}

// Assembly without the bracket verification, for the metric-level operators
// (rescaling, rotation coefficients, dhat) that are defined for any nonzero
// diagonal; the structure differentials stay gated behind verification.
inline SemisimpleHydroPair build_pair_unchecked(const std::vector<BaseScalar>& f) {
    return detail::assemble_pair(f, false);
}

// Recover the metric entries from a structure of the diagonal hydrodynamic
// shape; rejects inputs whose theta_i theta_i^1 diagonal is missing or whose
// remainder is not the canonical completion of that diagonal.
inline std::vector<BaseScalar> extract_metric(const LocalFunctional& P, int n) {
    std::vector<BaseScalar> f;
    for (int i = 1; i <= n; ++i) {
        DiffPoly v = P.vder(true, i);
        Scalar c(BaseScalar(v.nv, v.nd));
        for (const auto& t : v.terms)
            if (t.even.empty() && t.logs.empty() &&
                t.odd == std::vector<std::pair<int, int>>{{i, 1}})
                c = c + t.c;
        BaseScalar fi = c.to_base();
        if (fi.is_zero())
            fail(ErrorKind::ZeroMetricEntry, "no diagonal entry for coordinate " + std::to_string(i));
        f.push_back(fi);
    }
    if (detail::hydro_structure(f, f) != P)
        fail(ErrorKind::WrongShape, "structure is not of diagonal hydrodynamic shape");
    return f;
}

// ---------------------------------------------------------------------------
// Index functions.

using IndexVector = std::vector<BaseScalar>;

namespace detail {

// Coefficient of one monomial (exact even/odd factor lists, no logs).
inline Scalar monomial_coeff(const DiffPoly& p,
                             const std::vector<std::tuple<int, int, int>>& even,
                             const std::vector<std::pair<int, int>>& odd) {
    Scalar c(BaseScalar(p.nv, p.nd));
    for (const auto& t : p.terms)
        if (t.even == even && t.odd == odd && t.logs.empty()) c = c + t.c;
    return c;
}

inline void require_bidegree_12(const ReducedOneForm& w, const char* who) {
    bool ok = false;
    try {
        ok = w.bidegree() == Bidegree{1, 2};
    } catch (const Error&) {
        ok = false;
    }
    if (!ok) fail(ErrorKind::WrongBidegree, std::string(who) + " needs theta-degree 1, x-degree 2");
}

} // namespace detail

inline IndexVector indices(const SemisimpleHydroPair& S, const ReducedOneForm& w) {
    IndexVector ind;
    if (w.is_zero()) {
        for (int i = 0; i < S.n; ++i) ind.push_back(BaseScalar::constant(S.nv, S.n, Rat(0)));
        return ind;
    }
    detail::require_bidegree_12(w, "index functions");
    for (int i = 1; i <= S.n; ++i) {
        BaseScalar X = detail::monomial_coeff(w.g[i - 1], {}, {{i, 2}}).to_base();
        BaseScalar Y = detail::monomial_coeff(w.h[i - 1], {{i, 2, 1}}, {}).to_base();
        ind.push_back((X + Y) / S.f[i - 1]);
    }
    for (int i = 1; i <= S.n; ++i)
        if (!ind[i - 1].single_variable(i))
            fail(ErrorKind::NotSingleVariable,
                 "index " + std::to_string(i) + " depends on a foreign coordinate");
    return ind;
}

// ---------------------------------------------------------------------------
// Cocycles and tau classes.

inline bool is_cocycle(const SemisimpleHydroPair& S, const ReducedOneForm& w) {
    if (w.is_zero()) return true;
    detail::require_bidegree_12(w, "the cocycle test");
    return dtilde(S.H0, dtilde(S.H1, w)).is_zero();
}

// The class with index functions -3 c_i, built from the logarithmic density
// D_1 sum_i c_i u^{i,1} log u^{i,1} - D_0 sum_i u^i c_i u^{i,1} log u^{i,1};
// the exact part sum_i d_x(B_i log u^{i,1}) with B_i = c_i (D_1 u^i - u^i D_0 u^i)
// absorbs every logarithm, and the remaining negative powers cancel because
// B_i is divisible by u^{i,1}.
inline ReducedOneForm build_tau(const SemisimpleHydroPair& S, const std::vector<BaseScalar>& c) {
    const int n = S.n, nv = S.nv;
    if (static_cast<int>(c.size()) != n)
        fail(ErrorKind::ValidationError, "one coefficient function per coordinate");
    for (int i = 1; i <= n; ++i)
        if (!c[i - 1].single_variable(i))
            fail(ErrorKind::NotSingleVariable, "coefficient " + std::to_string(i));

    auto U = [&](int i, int s) { return DiffPoly::var(nv, n, JetVar::u(i, s)); };
    auto LOG = [&](int i) {
        DiffPoly L(nv, n);
        Term t;
        t.c = Scalar::constant(nv, n, Rat(1));
        t.logs = {{i, 1}};
        L.terms.push_back(t);
        return L;
    };

    DiffPoly h0(nv, n), h1(nv, n);
    for (int i = 1; i <= n; ++i) {
        DiffPoly base = Scalar(c[i - 1]) * U(i, 1) * LOG(i);
        h1 = h1 + base;
        h0 = h0 + Scalar(BaseScalar::var(nv, n, i)) * base;
    }
    DiffPoly dens = S.D1.apply(h1) - S.D0.apply(h0);
    for (int i = 1; i <= n; ++i) {
        DiffPoly Bi = Scalar(c[i - 1]) *
                      (S.D1.apply(U(i, 0)) - Scalar(BaseScalar::var(nv, n, i)) * S.D0.apply(U(i, 0)));
        dens = dens - (Bi * LOG(i)).dx();
    }
    dens = dens.assert_polynomial();

    ReducedOneForm tau = reduce_mod_dx(delta_of(dens));
    if (!is_cocycle(S, tau))
        fail(ErrorKind::Internal, "tau construction failed the cocycle verification");
    return tau;
}

// ---------------------------------------------------------------------------
// Normal forms.

// Coefficient families of the unique degree-(1,2) representation
//   g_i = sum_j X1(i,j) th_j^2 + sum_{k,j} X2(i,k,j) u^{j,1} th_k^1
//       + sum_{j,k} Z2(i,j,k) u^{k,2} th_j + sum_{j,k,l} Z3(i,j,k,l) u^{k,1} u^{l,1} th_j
//   h_i = sum_j Y1(i,j) u^{j,2} + sum_{j,k} Y2(i,j,k) u^{j,1} u^{k,1}
// with Z3 symmetric in (k,l) and Y2 symmetric in (j,k). A normal form in
// addition has X1 diagonal, Y1 = 0 and vanishing Y2 diagonal entries Y2(i,i,i).
class NormalFormCocycle {
public:
    int nv = 0, n = 0;
    std::vector<BaseScalar> X1, X2, Z2, Z3, Y1, Y2;

    static NormalFormCocycle zero(int nv, int n) {
        NormalFormCocycle c;
        c.nv = nv;
        c.n = n;
        BaseScalar z = BaseScalar::constant(nv, n, Rat(0));
        c.X1.assign(static_cast<size_t>(n) * n, z);
        c.X2.assign(static_cast<size_t>(n) * n * n, z);
        c.Z2.assign(static_cast<size_t>(n) * n * n, z);
        c.Z3.assign(static_cast<size_t>(n) * n * n * n, z);
        c.Y1.assign(static_cast<size_t>(n) * n, z);
        c.Y2.assign(static_cast<size_t>(n) * n * n, z);
        return c;
    }

    BaseScalar& x1(int i, int j) { return X1[static_cast<size_t>(i - 1) * n + (j - 1)]; }
    BaseScalar& x2(int i, int k, int j) {
        return X2[(static_cast<size_t>(i - 1) * n + (k - 1)) * n + (j - 1)];
    }
    BaseScalar& z2(int i, int j, int k) {
        return Z2[(static_cast<size_t>(i - 1) * n + (j - 1)) * n + (k - 1)];
    }
    BaseScalar& z3(int i, int j, int k, int l) {
        return Z3[((static_cast<size_t>(i - 1) * n + (j - 1)) * n + (k - 1)) * n + (l - 1)];
    }
    BaseScalar& y1(int i, int j) { return Y1[static_cast<size_t>(i - 1) * n + (j - 1)]; }
    BaseScalar& y2(int i, int j, int k) {
        return Y2[(static_cast<size_t>(i - 1) * n + (j - 1)) * n + (k - 1)];
    }
    const BaseScalar& x1(int i, int j) const { return const_cast<NormalFormCocycle*>(this)->x1(i, j); }
    const BaseScalar& x2(int i, int k, int j) const {
        return const_cast<NormalFormCocycle*>(this)->x2(i, k, j);
    }
    const BaseScalar& z2(int i, int j, int k) const {
        return const_cast<NormalFormCocycle*>(this)->z2(i, j, k);
    }
    const BaseScalar& z3(int i, int j, int k, int l) const {
        return const_cast<NormalFormCocycle*>(this)->z3(i, j, k, l);
    }
    const BaseScalar& y1(int i, int j) const { return const_cast<NormalFormCocycle*>(this)->y1(i, j); }
    const BaseScalar& y2(int i, int j, int k) const {
        return const_cast<NormalFormCocycle*>(this)->y2(i, j, k);
    }

    void validate() const {
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k) {
                    if (!(y2(i, j, k) == y2(i, k, j)))
                        fail(ErrorKind::WrongShape, "quadratic family must be symmetric");
                    for (int l = 1; l <= n; ++l)
                        if (!(z3(i, j, k, l) == z3(i, j, l, k)))
                            fail(ErrorKind::WrongShape, "quadratic family must be symmetric");
                }
    }

    bool is_normal() const {
        for (int i = 1; i <= n; ++i) {
            for (int j = 1; j <= n; ++j) {
                if (j != i && !x1(i, j).is_zero()) return false;
                if (!y1(i, j).is_zero()) return false;
            }
            if (!y2(i, i, i).is_zero()) return false;
        }
        return true;
    }

    DiffPoly x_component(int i) const {
        auto U = [&](int j, int s) { return DiffPoly::var(nv, n, JetVar::u(j, s)); };
        auto TH = [&](int j, int s) { return DiffPoly::var(nv, n, JetVar::th(j, s)); };
        DiffPoly r(nv, n);
        for (int j = 1; j <= n; ++j) {
            r = r + Scalar(x1(i, j)) * TH(j, 2);
            for (int k = 1; k <= n; ++k) {
                r = r + Scalar(x2(i, k, j)) * (U(j, 1) * TH(k, 1));
                r = r + Scalar(z2(i, j, k)) * (U(k, 2) * TH(j, 0));
                for (int l = 1; l <= n; ++l)
                    r = r + Scalar(z3(i, j, k, l)) * (U(k, 1) * U(l, 1) * TH(j, 0));
            }
        }
        return r;
    }

    DiffPoly y_component(int i) const {
        auto U = [&](int j, int s) { return DiffPoly::var(nv, n, JetVar::u(j, s)); };
        DiffPoly r(nv, n);
        for (int j = 1; j <= n; ++j) {
            r = r + Scalar(y1(i, j)) * U(j, 2);
            for (int k = 1; k <= n; ++k) r = r + Scalar(y2(i, j, k)) * (U(j, 1) * U(k, 1));
        }
        return r;
    }

    ReducedOneForm assemble() const {
        ReducedOneForm w(nv, n);
        for (int i = 1; i <= n; ++i) {
            w.g[i - 1] = x_component(i);
            w.h[i - 1] = y_component(i);
        }
        return w;
    }

    static NormalFormCocycle extract(const ReducedOneForm& w) {
        NormalFormCocycle c = zero(w.nv, w.nd);
        const BaseScalar half = BaseScalar::constant(w.nv, w.nd, Rat(1, 2));
        auto base_of = [](const Scalar& s) {
            if (!s.is_base()) fail(ErrorKind::WrongShape, "coefficient leaves the base ring");
            return s.to_base();
        };
        for (int i = 1; i <= c.n; ++i) {
            for (const auto& t : w.g[i - 1].terms) {
                if (!t.logs.empty()) fail(ErrorKind::WrongShape, "logarithmic coefficient");
                BaseScalar cc = base_of(t.c);
                if (t.even.empty() && t.odd.size() == 1 && t.odd[0].second == 2) {
                    c.x1(i, t.odd[0].first) = c.x1(i, t.odd[0].first) + cc;
                } else if (t.even.size() == 1 && t.odd.size() == 1 && t.odd[0].second == 1 &&
                           std::get<1>(t.even[0]) == 1 && std::get<2>(t.even[0]) == 1) {
                    c.x2(i, t.odd[0].first, std::get<0>(t.even[0])) =
                        c.x2(i, t.odd[0].first, std::get<0>(t.even[0])) + cc;
                } else if (t.even.size() == 1 && t.odd.size() == 1 && t.odd[0].second == 0 &&
                           std::get<1>(t.even[0]) == 2 && std::get<2>(t.even[0]) == 1) {
                    c.z2(i, t.odd[0].first, std::get<0>(t.even[0])) =
                        c.z2(i, t.odd[0].first, std::get<0>(t.even[0])) + cc;
                } else if (t.even.size() == 1 && t.odd.size() == 1 && t.odd[0].second == 0 &&
                           std::get<1>(t.even[0]) == 1 && std::get<2>(t.even[0]) == 2) {
                    int k = std::get<0>(t.even[0]);
                    c.z3(i, t.odd[0].first, k, k) = c.z3(i, t.odd[0].first, k, k) + cc;
                } else if (t.even.size() == 2 && t.odd.size() == 1 && t.odd[0].second == 0 &&
                           std::get<1>(t.even[0]) == 1 && std::get<2>(t.even[0]) == 1 &&
                           std::get<1>(t.even[1]) == 1 && std::get<2>(t.even[1]) == 1) {
                    int k = std::get<0>(t.even[0]), l = std::get<0>(t.even[1]);
                    BaseScalar hh = half * cc;
                    c.z3(i, t.odd[0].first, k, l) = c.z3(i, t.odd[0].first, k, l) + hh;
                    c.z3(i, t.odd[0].first, l, k) = c.z3(i, t.odd[0].first, l, k) + hh;
                } else {
                    fail(ErrorKind::WrongShape, "unexpected monomial in a du coefficient");
                }
            }
            for (const auto& t : w.h[i - 1].terms) {
                if (!t.logs.empty()) fail(ErrorKind::WrongShape, "logarithmic coefficient");
                BaseScalar cc = base_of(t.c);
                if (!t.odd.empty()) fail(ErrorKind::WrongShape, "odd factor in a dth coefficient");
                if (t.even.size() == 1 && std::get<1>(t.even[0]) == 2 && std::get<2>(t.even[0]) == 1) {
                    c.y1(i, std::get<0>(t.even[0])) = c.y1(i, std::get<0>(t.even[0])) + cc;
                } else if (t.even.size() == 1 && std::get<1>(t.even[0]) == 1 &&
                           std::get<2>(t.even[0]) == 2) {
                    int j = std::get<0>(t.even[0]);
                    c.y2(i, j, j) = c.y2(i, j, j) + cc;
                } else if (t.even.size() == 2 && std::get<1>(t.even[0]) == 1 &&
                           std::get<2>(t.even[0]) == 1 && std::get<1>(t.even[1]) == 1 &&
                           std::get<2>(t.even[1]) == 1) {
                    int j = std::get<0>(t.even[0]), k = std::get<0>(t.even[1]);
                    BaseScalar hh = half * cc;
                    c.y2(i, j, k) = c.y2(i, j, k) + hh;
                    c.y2(i, k, j) = c.y2(i, k, j) + hh;
                } else {
                    fail(ErrorKind::WrongShape, "unexpected monomial in a dth coefficient");
                }
            }
        }
        return c;
    }
};

struct GaugeRecord {
    ReducedOneForm gamma, alpha, beta; // omega_out = omega + D~0 gamma + D~0 alpha + D~1 beta
};

struct NormalizeResult {
    NormalFormCocycle normal;
    ReducedOneForm omega;
    GaugeRecord gauge;
};

// Two-step gauge fixing. Adding D~0 of gamma = sum (Y1(i,j)/f^i) u^{j,1} du^i
// clears the u^{j,2} family; the remaining defects are cleared by D~0 alpha +
// D~1 beta with alpha_i = -u^i beta_i, whose only responses in the constrained
// families are 1/2 beta^(i)_i f^i on the (u^{i,1})^2 entry and
// beta^(i)_j (u^j - u^i) f^j on the off-diagonal th_j^2 entry.
inline NormalizeResult normalize_cocycle(const SemisimpleHydroPair& S, const ReducedOneForm& w) {
    if (!is_cocycle(S, w)) fail(ErrorKind::NotACocycle, "normal forms exist for cocycles only");
    const int n = S.n, nv = S.nv;
    auto U = [&](int i, int s) { return DiffPoly::var(nv, n, JetVar::u(i, s)); };
    auto uvar = [&](int i) { return BaseScalar::var(nv, n, i); };

    NormalFormCocycle in = NormalFormCocycle::extract(w);

    ReducedOneForm gamma(nv, n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            gamma.g[i - 1] = gamma.g[i - 1] + Scalar(in.y1(i, j) / S.f[i - 1]) * U(j, 1);
    ReducedOneForm mid = w + dtilde(S.H0, gamma);

    NormalFormCocycle md = NormalFormCocycle::extract(mid);
    ReducedOneForm beta(nv, n), alpha(nv, n);
    const BaseScalar minus_two = BaseScalar::constant(nv, n, Rat(-2));
    for (int i = 1; i <= n; ++i) {
        DiffPoly bi(nv, n);
        BaseScalar bii = minus_two * md.y2(i, i, i) / S.f[i - 1];
        bi = bi + Scalar(bii) * U(i, 1);
        for (int j = 1; j <= n; ++j) {
            if (j == i) continue;
            BaseScalar bij = -md.x1(i, j) / ((uvar(j) - uvar(i)) * S.f[j - 1]);
            bi = bi + Scalar(bij) * U(j, 1);
        }
        beta.g[i - 1] = bi;
        alpha.g[i - 1] = Scalar(-uvar(i)) * bi;
    }

    ReducedOneForm out = mid + dtilde(S.H0, alpha) + dtilde(S.H1, beta);
    NormalFormCocycle nf = NormalFormCocycle::extract(out);
    if (!nf.is_normal())
        fail(ErrorKind::Internal, "gauge fixing missed a constrained coefficient");
    return NormalizeResult{nf, out, GaugeRecord{gamma, alpha, beta}};
}

// ---------------------------------------------------------------------------
// Conformal classification.

struct ConformalData {
    std::vector<Rat> d;
    Rat lambda0, lambda1, mu;
};

struct CentralInvariantLaw {
    std::vector<Rat> m; // c_i = C_i (u^i)^{m_i} with free constants C_i
};

inline std::vector<Rat> conformal_check(const std::vector<BaseScalar>& f) {
    const int n = static_cast<int>(f.size());
    const int nv = f.empty() ? 0 : f[0].nv();
    std::vector<Rat> d;
    for (int i = 1; i <= n; ++i) {
        BaseScalar e(nv, n);
        for (int j = 1; j <= n; ++j)
            e = e + BaseScalar::var(nv, n, j) * f[i - 1].partial_u(j);
        BaseScalar q = e / f[i - 1];
        bool constant = true;
        for (int j = 1; j <= nv && constant; ++j)
            if (!q.partial_u(j).is_zero()) constant = false;
        if (!constant || !q.den.is_constant())
            fail(ErrorKind::NotHomogeneousScaling,
                 "entry " + std::to_string(i) + " has no constant scaling degree");
        d.push_back(q.is_zero() ? Rat(0)
                                : q.num.constant_value() / q.den.constant_value());
    }
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            if (i == j) continue;
            if ((d[i - 1] - d[j - 1]) != 0 && !f[j - 1].partial_u(i).is_zero())
                fail(ErrorKind::IrreducibilityViolated,
                     "(" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
    return d;
}

inline EvDerivation euler_field(const SemisimpleHydroPair& S, const ConformalData& cd) {
    if (cd.lambda1 == cd.lambda0)
        fail(ErrorKind::DegenerateScaling, "the two scaling weights coincide");
    if (static_cast<int>(cd.d.size()) != S.n)
        fail(ErrorKind::ValidationError, "one scaling degree per coordinate");
    const int n = S.n, nv = S.nv;
    const Rat span = cd.lambda1 - cd.lambda0;

    EvDerivation E(nv, n, 0);
    E.mu = cd.mu;
    for (int i = 1; i <= n; ++i) {
        E.u_img[i - 1] = span * DiffPoly::var(nv, n, JetVar::u(i, 0));
        E.th_img[i - 1] =
            (cd.lambda1 - span * cd.d[i - 1] - cd.mu) * DiffPoly::var(nv, n, JetVar::th(i, 0));
    }

    for (int s = 0; s <= 1; ++s)
        for (int i = 1; i <= n; ++i)
            for (bool odd : {false, true}) {
                DiffPoly v = DiffPoly::var(nv, n, odd ? JetVar::th(i, s) : JetVar::u(i, s));
                if (!(E.apply(v.dx()) - E.apply(v).dx() == cd.mu * v.dx()))
                    fail(ErrorKind::ConformalityFailed, "dilation identity fails on a generator");
            }
    const Rat lam[2] = {cd.lambda0, cd.lambda1};
    const EvDerivation* Ds[2] = {&S.D0, &S.D1};
    for (int k = 0; k < 2; ++k) {
        EvDerivation C = commutator(E, *Ds[k]);
        for (int i = 0; i < n; ++i)
            if (!(C.u_img[i] == lam[k] * Ds[k]->u_img[i]) ||
                !(C.th_img[i] == lam[k] * Ds[k]->th_img[i]))
                fail(ErrorKind::ConformalityFailed,
                     "structure " + std::to_string(k) + " is not rescaled by its weight");
    }
    return E;
}

inline CentralInvariantLaw conformal_central_invariants(const ConformalData& cd) {
    if (cd.lambda1 == cd.lambda0)
        fail(ErrorKind::DegenerateScaling, "the two scaling weights coincide");
    const Rat span = cd.lambda1 - cd.lambda0;
    CentralInvariantLaw law;
    for (const Rat& di : cd.d) law.m.push_back((span - 2 * cd.mu - span * di) / span);
    return law;
}

// Residual of the scaling equation for candidate index functions c_i(u^i):
// 3 (lambda1 - lambda0 - 2 mu - (lambda1 - lambda0) d^i) c_i
//   - 3 (lambda1 - lambda0) u^i c_i'. Zero exactly on C (u^i)^{m_i}.
inline IndexVector index_ode_check(const SemisimpleHydroPair& S, const ConformalData& cd,
                                   const std::vector<BaseScalar>& c) {
    if (static_cast<int>(c.size()) != S.n)
        fail(ErrorKind::ValidationError, "one candidate function per coordinate");
    const Rat span = cd.lambda1 - cd.lambda0;
    IndexVector res;
    for (int i = 1; i <= S.n; ++i) {
        Rat w = Rat(3) * (span - 2 * cd.mu - span * cd.d[i - 1]);
        BaseScalar euler = BaseScalar::var(S.nv, S.n, i) * c[i - 1].partial_u(i);
        res.push_back(BaseScalar::constant(S.nv, S.n, w) * c[i - 1] -
                      BaseScalar::constant(S.nv, S.n, Rat(3) * span) * euler);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Pencil operators.

// dhat_i = sum_{s>=1} th_i^{s+1} d/du^{i,s}, an odd derivation on the jet ring.
inline DiffPoly dhat(const DiffPoly& p, int i) {
    DiffPoly r(p.nv, p.nd);
    int top = p.max_order(false, i);
    for (int s = 1; s <= top; ++s) {
        DiffPoly pf = p.partial(JetVar::u(i, s));
        if (pf.is_zero()) continue;
        r = r + DiffPoly::var(p.nv, p.nd, JetVar::th(i, s + 1)) * pf;
    }
    return r;
}

namespace detail {

// Multiply each term by (-1)^{theta degree}; the Koszul factor an odd operator
// picks up when it passes a form coefficient.
inline DiffPoly theta_parity_twist(const DiffPoly& p) {
    DiffPoly r = p;
    for (auto& t : r.terms)
        if (t.odd.size() % 2 != 0) t.c = -t.c;
    return r;
}

} // namespace detail

// The de Rham extension of dhat_i: additionally du^{i,s} |-> dth_i^{s+1} for
// every s >= 0.
inline OneForm dhat(const OneForm& w, int i) {
    OneForm r(w.nv, w.nd);
    for (const auto& [k, g] : w.du) {
        r.add_du(k.first, k.second, dhat(g, i));
        if (k.first == i) r.add_dth(i, k.second + 1, detail::theta_parity_twist(g));
    }
    for (const auto& [k, h] : w.dth) r.add_dth(k.first, k.second, dhat(h, i));
    r.normalize();
    return r;
}

// On the jet ring both variants agree; on forms the plain variant acts on
// coefficients only, while deRham also swaps the du generators for dth ones.
enum class DhatVariant { plain, deRham };

inline DiffPoly dhat(const SemisimpleHydroPair& S, int i, const DiffPoly& p,
                     DhatVariant = DhatVariant::plain) {
    if (i < 1 || i > S.n) fail(ErrorKind::IndexOutOfRange, "coordinate " + std::to_string(i));
    return dhat(p, i);
}
inline OneForm dhat(const SemisimpleHydroPair& S, int i, const OneForm& w,
                    DhatVariant variant = DhatVariant::deRham) {
    if (i < 1 || i > S.n) fail(ErrorKind::IndexOutOfRange, "coordinate " + std::to_string(i));
    if (variant == DhatVariant::deRham) return dhat(w, i);
    OneForm r(w.nv, w.nd);
    for (const auto& [k, g] : w.du) r.add_du(k.first, k.second, dhat(g, i));
    for (const auto& [k, h] : w.dth) r.add_dth(k.first, k.second, dhat(h, i));
    r.normalize();
    return r;
}

namespace detail {

inline Scalar pencil_weight(const SemisimpleHydroPair& S, int i) {
    // (-lam + u^i) f^i
    LambdaScalar L{BaseScalar::var(S.nv, S.n, i) * S.f[i - 1]};
    L.coef.push_back(-S.f[i - 1]);
    L.normalize();
    return Scalar(L);
}

} // namespace detail

inline DiffPoly delta_minus_one(const SemisimpleHydroPair& S, const DiffPoly& p) {
    DiffPoly r(p.nv, p.nd);
    for (int i = 1; i <= S.n; ++i) r = r + detail::pencil_weight(S, i) * dhat(p, i);
    return r;
}

inline OneForm delta_minus_one(const SemisimpleHydroPair& S, const OneForm& w) {
    OneForm r(w.nv, w.nd);
    for (int i = 1; i <= S.n; ++i)
        r = r + DiffPoly::constant(w.nv, w.nd, detail::pencil_weight(S, i)) * dhat(w, i);
    return r;
}

// ---------------------------------------------------------------------------
// Rescaling and rotation coefficients.

enum class PsiDir { fwd, inv };

namespace detail {

inline Scalar root_power(const SemisimpleHydroPair& S, int i, int k) {
    // (s_i)^k in the quadratic tower, s_i^2 = f^i; negative k inverts.
    int m = k < 0 ? -k : k;
    BaseScalar pw = BaseScalar::constant(S.nv, S.n, Rat(1));
    for (int t = 0; t < m / 2; ++t) pw = pw * S.f[i - 1];
    Scalar r(pw);
    if (m % 2 != 0) r = r * Scalar(RootScalar::root(S.roots, i));
    if (k < 0) r = Scalar::constant(S.nv, S.n, Rat(1)) / r;
    return r;
}

} // namespace detail

inline DiffPoly psi_rescale(const SemisimpleHydroPair& S, const DiffPoly& p, PsiDir dir) {
    if (p.has_logs()) fail(ErrorKind::NotPolynomial, "rescaling is defined on the jet ring");
    const int sgn = dir == PsiDir::fwd ? 1 : -1;
    DiffPoly r(p.nv, p.nd);
    for (const auto& t : p.terms) {
        Term nt = t;
        for (int i = 1; i <= S.n; ++i) {
            int k = 0;
            for (const auto& [vi, s, e] : t.even)
                if (vi == i) k += s * e;
            for (const auto& [vi, s] : t.odd)
                if (vi == i) k += s + 1;
            if (k != 0) nt.c = nt.c * detail::root_power(S, i, sgn * k);
        }
        r.terms.push_back(std::move(nt));
    }
    r.normalize();
    return r;
}

inline OneForm psi_rescale(const SemisimpleHydroPair& S, const OneForm& w, PsiDir dir) {
    const int sgn = dir == PsiDir::fwd ? 1 : -1;
    OneForm r(w.nv, w.nd);
    for (const auto& [k, g] : w.du)
        r.add_du(k.first, k.second,
                 detail::root_power(S, k.first, sgn * k.second) * psi_rescale(S, g, dir));
    for (const auto& [k, h] : w.dth)
        r.add_dth(k.first, k.second,
                  detail::root_power(S, k.first, sgn * (k.second + 1)) * psi_rescale(S, h, dir));
    r.normalize();
    return r;
}

inline std::vector<std::vector<Scalar>> rotation_coeffs(const SemisimpleHydroPair& S) {
    // gamma_ij = -1/2 (f^i/f^j)^{1/2} (d_i f^j)/f^j = -1/2 s_i s_j d_i f^j / (f^j)^2
    std::vector<std::vector<Scalar>> g(S.n, std::vector<Scalar>());
    for (int i = 1; i <= S.n; ++i)
        for (int j = 1; j <= S.n; ++j) {
            if (i == j) {
                g[i - 1].push_back(Scalar::constant(S.nv, S.n, Rat(0)));
                continue;
            }
            BaseScalar w = BaseScalar::constant(S.nv, S.n, Rat(-1, 2)) *
                           S.f[j - 1].partial_u(i) / (S.f[j - 1] * S.f[j - 1]);
            Scalar entry = Scalar(RootScalar::root(S.roots, i)) *
                           Scalar(RootScalar::root(S.roots, j)) * Scalar(w);
            g[i - 1].push_back(entry);
        }
    return g;
}

// ---------------------------------------------------------------------------
// Closed-form expansion of the first structure differential on the
// coefficient-family representation; used as an independent oracle against
// the engine path. All unnamed indices are summed over 1..n.

inline std::pair<std::vector<DiffPoly>, std::vector<DiffPoly>>
dtilde0_closed_form(const SemisimpleHydroPair& S, const NormalFormCocycle& nf) {
    if (nf.n != S.n || nf.nv != S.nv)
        fail(ErrorKind::WrongShape, "coefficient families do not match the pair");
    nf.validate();
    const int n = S.n, nv = S.nv;
    auto U = [&](int j, int s) { return DiffPoly::var(nv, n, JetVar::u(j, s)); };
    auto TH = [&](int j, int s) { return DiffPoly::var(nv, n, JetVar::th(j, s)); };
    auto A = [&](int i, int j) { return S.a[i - 1][j - 1]; };
    auto B = [&](int i, int j) { return S.b[i - 1][j - 1]; };

    std::vector<DiffPoly> X, Y;
    for (int i = 1; i <= n; ++i) {
        X.push_back(nf.x_component(i));
        Y.push_back(nf.y_component(i));
    }

    std::vector<DiffPoly> M, N;
    for (int i = 1; i <= n; ++i) {
        DiffPoly m = S.D0.apply(X[i - 1]);
        for (int j = 1; j <= n; ++j) {
            m = m - Scalar(S.f[j - 1].partial_u(i)) * (X[j - 1] * TH(j, 1));
            m = m + (Scalar(A(i, j)) * (X[j - 1] * TH(j, 0))).dx();
            m = m + (Scalar(B(j, i)) * (X[j - 1] * TH(i, 0))).dx();
            m = m - (Scalar(B(j, i)) * (X[i - 1] * TH(j, 0))).dx();
            for (int k = 1; k <= n; ++k) {
                m = m - Scalar(A(j, k).partial_u(i)) * (X[k - 1] * U(j, 1) * TH(k, 0));
                m = m - Scalar(B(k, j).partial_u(i)) * (X[k - 1] * U(j, 1) * TH(j, 0));
                m = m + Scalar(B(j, k).partial_u(i)) * (X[k - 1] * U(k, 1) * TH(j, 0));
                m = m + Scalar(A(k, j).partial_u(i)) * (Y[k - 1] * TH(j, 0) * TH(j, 1));
                m = m + Scalar(B(j, k).partial_u(i)) * (Y[k - 1] * TH(k, 0) * TH(j, 1));
                m = m - Scalar(B(j, k).partial_u(i)) * (Y[k - 1] * TH(j, 0) * TH(k, 1));
                m = m - (Scalar(B(k, i).partial_u(j)) * (Y[j - 1] * TH(k, 0) * TH(i, 0))).dx();
                m = m + (Scalar(B(k, j).partial_u(i)) * (Y[j - 1] * TH(k, 0) * TH(j, 0))).dx();
                for (int l = 1; l <= n; ++l) {
                    m = m + Scalar(B(k, j).partial_u(i).partial_u(l)) *
                                (Y[l - 1] * U(j, 1) * TH(k, 0) * TH(j, 0));
                    m = m - Scalar(B(k, l).partial_u(i).partial_u(j)) *
                                (Y[l - 1] * U(j, 1) * TH(k, 0) * TH(l, 0));
                }
            }
        }
        M.push_back(m);

        DiffPoly nn = S.D0.apply(Y[i - 1]);
        nn = nn + (Scalar(S.f[i - 1]) * X[i - 1]).dx();
        for (int j = 1; j <= n; ++j) {
            nn = nn - Scalar(A(j, i)) * (X[i - 1] * U(j, 1));
            nn = nn - Scalar(B(j, i)) * (X[j - 1] * U(i, 1));
            nn = nn + Scalar(B(i, j)) * (X[j - 1] * U(j, 1));
            nn = nn - (Scalar(A(j, i)) * (Y[j - 1] * TH(i, 0))).dx();
            nn = nn - Scalar(A(j, i)) * (Y[j - 1] * TH(i, 1));
            nn = nn - (Scalar(B(i, j)) * (Y[j - 1] * TH(j, 0))).dx();
            nn = nn - Scalar(B(j, i)) * (Y[i - 1] * TH(j, 1));
            nn = nn + (Scalar(B(j, i)) * (Y[i - 1] * TH(j, 0))).dx();
            nn = nn + Scalar(B(i, j)) * (Y[j - 1] * TH(j, 1));
            for (int k = 1; k <= n; ++k) {
                nn = nn + Scalar(B(k, i).partial_u(j)) * (Y[j - 1] * U(i, 1) * TH(k, 0));
                nn = nn - Scalar(B(i, j).partial_u(k)) * (Y[k - 1] * U(j, 1) * TH(j, 0));
                nn = nn - Scalar(B(k, i).partial_u(j)) * (Y[i - 1] * U(j, 1) * TH(k, 0));
                nn = nn + Scalar(B(i, k).partial_u(j)) * (Y[k - 1] * U(j, 1) * TH(k, 0));
            }
        }
        N.push_back(nn);
    }
    return {M, N};
}

inline std::pair<std::vector<DiffPoly>, std::vector<DiffPoly>>
dtilde0_closed_form(const SemisimpleHydroPair& S, const ReducedOneForm& w) {
    return dtilde0_closed_form(S, NormalFormCocycle::extract(w));
}

} // namespace vbh
