#pragma once

#include <array>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "vbh/bihss.hpp"
#include "vbh/linalg.hpp"

namespace vbh {

// ---------------------------------------------------------------------------
// Vanishing windows
// ---------------------------------------------------------------------------

// The three index families behind the guaranteed-vanishing test, together
// with the two nonvanishing windows of the pencil complex. All five sets are
// generated directly from their defining ranges.
class BidegreeWindow {
public:
    int n = 1;
    std::set<Bidegree> I1, I2, I3;

    static BidegreeWindow make(int n) {
        if (n < 1) fail(ErrorKind::IndexOutOfRange, "bidegree window needs n >= 1");
        BidegreeWindow w;
        w.n = n;
        for (int j = 0; j <= 1; ++j)
            for (int i = j + 1; i <= j + n + 1; ++i) w.I1.insert(Bidegree{i, j});
        for (int j = 2; j <= n; ++j)
            for (int i = j; i <= j + n + 1; ++i) w.I2.insert(Bidegree{i, j});
        for (int j = n + 1; j <= n + 3; ++j)
            for (int i = j; i <= j + n; ++i) w.I3.insert(Bidegree{i, j});
        return w;
    }

    std::set<Bidegree> index_set() const {
        std::set<Bidegree> u = I1;
        u.insert(I2.begin(), I2.end());
        u.insert(I3.begin(), I3.end());
        return u;
    }

    bool in_index_set(int p, int d) const {
        Bidegree b{p, d};
        return I1.count(b) || I2.count(b) || I3.count(b);
    }

    bool case1(int p, int d) const { return d >= 0 && d <= n && p >= d + 1 && p <= d + n + 1; }
    bool case2(int p, int d) const { return d >= 2 && d <= n + 3 && p >= d && p <= d + n; }
};

inline bool vbh_guaranteed_zero(int n, int p, int d) {
    if (n < 1 || p < 0 || d < 0)
        fail(ErrorKind::IndexOutOfRange, "vbh_guaranteed_zero needs n >= 1 and p, d >= 0");
    if (d < 2) return false;
    BidegreeWindow w = BidegreeWindow::make(n);
    return !w.in_index_set(p, d) && !w.in_index_set(p + 1, d);
}

enum class OmegaLambdaWindow { case1, case2, outside };

inline const char* to_string(OmegaLambdaWindow w) {
    switch (w) {
        case OmegaLambdaWindow::case1: return "case1";
        case OmegaLambdaWindow::case2: return "case2";
        case OmegaLambdaWindow::outside: return "outside";
    }
    return "outside";
}

// Classify (p,d) against the two pencil-complex windows; bidegrees lying in
// both windows report the first one.
inline OmegaLambdaWindow omega_lambda_window(int n, int p, int d) {
    if (n < 1 || p < 0 || d < 0)
        fail(ErrorKind::IndexOutOfRange, "omega_lambda_window needs n >= 1 and p, d >= 0");
    BidegreeWindow w = BidegreeWindow::make(n);
    if (w.case1(p, d)) return OmegaLambdaWindow::case1;
    if (w.case2(p, d)) return OmegaLambdaWindow::case2;
    return OmegaLambdaWindow::outside;
}

// ---------------------------------------------------------------------------
// Monomial bidegree atlases
// ---------------------------------------------------------------------------

// Occupied bidegrees of one of the graded monomial spaces that control the
// spectral-sequence windows, enumerated exhaustively up to the cutoffs.
//
// Recognized space ids:
//   c-dtheta         theta-block coefficients times one dtheta generator
//   c-lambda-dtheta  same space with the pencil parameter adjoined
//   ci               theta block completed by the jets of one coordinate
//   ci-nt            the nontrivial part of ci (at least one jet factor)
//   mhat             monomials mixing jets of two different coordinates
//   hi-slice         ci times one du^{i,s} generator (s >= 0)
struct MonomialAtlas {
    std::string space;
    int n = 1;
    int p_max = 0;
    int d_max = 0;
    std::set<Bidegree> occupied;

    bool contains(int p, int d) const { return occupied.count(Bidegree{p, d}) > 0; }
};

namespace detail {

// A cloud is the set of (theta degree, x degree, state) triples reachable by
// monomials under construction; the state bits accumulate space-membership
// marks (e.g. "contains a jet factor").
using DegCloud = std::set<std::array<int, 3>>;

// Multiply the cloud by powers 0..max_mult of one generator of bidegree
// (dp, dd); max_mult < 0 means unbounded (the box prunes the expansion).
// Any positive power ORs `mark` into the state.
inline DegCloud cloud_mul(const DegCloud& in, int dp, int dd, int max_mult, int mark, int p_max,
                          int d_max) {
    DegCloud out;
    for (const auto& e : in) {
        int kcap = max_mult >= 0 ? max_mult : std::numeric_limits<int>::max();
        if (dp == 0 && dd == 0 && kcap > 1) kcap = 1;
        for (int k = 0; k <= kcap; ++k) {
            long p = e[0] + static_cast<long>(k) * dp;
            long d = e[1] + static_cast<long>(k) * dd;
            if (p > p_max || d > d_max) break;
            out.insert({static_cast<int>(p), static_cast<int>(d), k == 0 ? e[2] : (e[2] | mark)});
        }
    }
    return out;
}

// Pointwise product of two clouds with additive states capped at state_cap.
inline DegCloud cloud_combine(const DegCloud& a, const DegCloud& b, int state_cap, int p_max,
                              int d_max) {
    DegCloud out;
    for (const auto& x : a)
        for (const auto& y : b) {
            int p = x[0] + y[0], d = x[1] + y[1];
            if (p > p_max || d > d_max) continue;
            out.insert({p, d, std::min(state_cap, x[2] + y[2])});
        }
    return out;
}

// Monomials of the theta block: theta_j and theta_j^1 for every coordinate.
inline DegCloud theta_block_cloud(int n, int p_max, int d_max) {
    DegCloud cl{{0, 0, 0}};
    for (int j = 1; j <= n; ++j) {
        cl = cloud_mul(cl, 1, 0, 1, 0, p_max, d_max);
        cl = cloud_mul(cl, 1, 1, 1, 0, p_max, d_max);
    }
    return cl;
}

// Extend the theta block by the jets of a single coordinate: u-jets of every
// positive order and theta-jets of order >= 2, all marked as jet factors.
inline DegCloud coordinate_jet_cloud(const DegCloud& base, int p_max, int d_max) {
    DegCloud cl = base;
    for (int s = 1; s <= d_max; ++s) cl = cloud_mul(cl, 0, s, -1, 1, p_max, d_max);
    for (int t = 2; t <= d_max; ++t) cl = cloud_mul(cl, 1, t, 1, 1, p_max, d_max);
    return cl;
}

// All monomials in the variables of a single coordinate, with the state
// recording whether a jet factor (u-jet of order >= 1 or theta-jet of order
// >= 2) is present.
inline DegCloud single_coordinate_cloud(int p_max, int d_max) {
    DegCloud cl{{0, 0, 0}};
    for (int t = 0; t <= d_max; ++t) cl = cloud_mul(cl, 1, t, 1, t >= 2 ? 1 : 0, p_max, d_max);
    for (int s = 1; s <= d_max; ++s) cl = cloud_mul(cl, 0, s, -1, 1, p_max, d_max);
    return cl;
}

} // namespace detail

inline MonomialAtlas atlas(const std::string& space, int n, int p_max, int d_max) {
    if (n < 1 || p_max < 0 || d_max < 0)
        fail(ErrorKind::IndexOutOfRange, "atlas needs n >= 1 and cutoffs >= 0");
    MonomialAtlas A;
    A.space = space;
    A.n = n;
    A.p_max = p_max;
    A.d_max = d_max;
    auto box_insert = [&](int p, int d) {
        if (p >= 0 && d >= 0 && p <= p_max && d <= d_max) A.occupied.insert(Bidegree{p, d});
    };
    if (space == "c-dtheta" || space == "c-lambda-dtheta") {
        // theta block times one dtheta generator; the pencil parameter does
        // not carry bidegree, so both ids enumerate identically.
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b) box_insert(a + b + 1, b);
    } else if (space == "ci" || space == "ci-nt") {
        detail::DegCloud cl = detail::coordinate_jet_cloud(
            detail::theta_block_cloud(n, p_max, d_max), p_max, d_max);
        for (const auto& e : cl) {
            if (space == "ci-nt" && e[2] == 0) continue;
            box_insert(e[0], e[1]);
        }
    } else if (space == "mhat") {
        detail::DegCloud cl{{0, 0, 0}};
        detail::DegCloud coord = detail::single_coordinate_cloud(p_max, d_max);
        for (int j = 1; j <= n; ++j) cl = detail::cloud_combine(cl, coord, 2, p_max, d_max);
        for (const auto& e : cl)
            if (e[2] >= 2) box_insert(e[0], e[1]);
    } else if (space == "hi-slice") {
        detail::DegCloud cl = detail::coordinate_jet_cloud(
            detail::theta_block_cloud(n, p_max, d_max), p_max, d_max);
        for (int s = 0; s <= d_max; ++s)
            for (const auto& e : cl) box_insert(e[0], e[1] + s);
    } else {
        fail(ErrorKind::UnknownSpace, "unrecognized atlas space id '" + space + "'");
    }
    return A;
}

// ---------------------------------------------------------------------------
// Bounded-degree ansatz solver
// ---------------------------------------------------------------------------

// A finite-dimensional probe of the cohomology at one bidegree: the unknown
// one-form ranges over all reduced representatives at (p,d) whose
// coefficients are polynomial in the jets with u-coefficients of bounded
// total degree.
struct AnsatzProblem {
    Bidegree target;
    int udeg_bound = 3;
    ReducedOneForm rhs; // membership target for the coboundary mode
};

enum class AnsatzMode { kernel2, coboundary };

struct AnsatzReport {
    AnsatzMode mode = AnsatzMode::kernel2;
    Bidegree target;
    int udeg_bound = 0;
    int unknowns = 0;
    int equations = 0;
    std::vector<ReducedOneForm> kernel; // kernel2: basis of ker D0 (cap) ker D1
    bool coboundary = false;            // coboundary: membership verdict
    ReducedOneForm witness;             // coboundary: preimage under D0 D1 when found
    std::string scope;                  // the bound the verdict is valid under
};

namespace detail {

constexpr size_t kAnsatzMaxUnknowns = 1500;
constexpr size_t kAnsatzMaxRows = 20000;
constexpr size_t kAnsatzMaxEntries = 4000000;

// Even jet monomials (ascending generator order) of exact x-degree rem,
// appended to cur starting from generator index k.
inline void even_jet_monos(int n, int rem, size_t k,
                           const std::vector<std::pair<int, int>>& gens,
                           std::vector<std::tuple<int, int, int>>& cur,
                           std::vector<std::vector<std::tuple<int, int, int>>>& out) {
    if (rem == 0) {
        out.push_back(cur);
        return;
    }
    if (k == gens.size()) return;
    even_jet_monos(n, rem, k + 1, gens, cur, out);
    auto [i, s] = gens[k];
    for (int e = 1; s * e <= rem; ++e) {
        cur.push_back({i, s, e});
        even_jet_monos(n, rem - s * e, k + 1, gens, cur, out);
        cur.pop_back();
    }
}

// Odd jet monomials of exact length cnt and x-degree budget <= dx; each is
// paired with every even completion of the remaining x-degree.
inline void jet_monos(int n, int cnt, int dx,
                      std::vector<std::pair<std::vector<std::tuple<int, int, int>>,
                                            std::vector<std::pair<int, int>>>>& out) {
    std::vector<std::pair<int, int>> even_gens;
    for (int i = 1; i <= n; ++i)
        for (int s = 1; s <= dx; ++s) even_gens.push_back({i, s});
    std::vector<std::pair<int, int>> odd;
    std::function<void(int, int, int)> rec = [&](int i0, int s0, int used) {
        if (static_cast<int>(odd.size()) == cnt) {
            std::vector<std::vector<std::tuple<int, int, int>>> evens;
            std::vector<std::tuple<int, int, int>> cur;
            even_jet_monos(n, dx - used, 0, even_gens, cur, evens);
            for (auto& ev : evens) out.push_back({ev, odd});
            return;
        }
        for (int i = i0; i <= n; ++i)
            for (int s = (i == i0 ? s0 : 0); s <= dx - used; ++s) {
                odd.push_back({i, s});
                rec(i, s + 1, used + s);
                odd.pop_back();
            }
    };
    if (cnt >= 0) rec(1, 0, 0);
}

// Exponent vectors over the dynamic coordinates with total degree <= bound,
// padded to nv entries.
inline void u_monos(int nv, int nd, int bound, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(nv, 0);
    std::function<void(int, int)> rec = [&](int i, int rem) {
        if (i > nd) {
            out.push_back(cur);
            return;
        }
        for (int e = 0; e <= rem; ++e) {
            cur[i - 1] = e;
            rec(i + 1, rem - e);
        }
        cur[i - 1] = 0;
    };
    rec(1, bound);
}

// All single-term reduced representatives at the requested bidegree with
// polynomial jet dependence and u-coefficients of total degree <= udeg.
inline std::vector<ReducedOneForm> ansatz_basis(const SemisimpleHydroPair& S, Bidegree bd,
                                                int udeg) {
    std::vector<ReducedOneForm> out;
    if (bd.p < 0 || bd.d < 0) return out;
    std::vector<std::vector<int>> umono;
    u_monos(S.nv, S.n, std::max(udeg, 0), umono);
    auto emit = [&](bool is_h, int slot, int cnt) {
        if (cnt < 0) return;
        std::vector<std::pair<std::vector<std::tuple<int, int, int>>,
                              std::vector<std::pair<int, int>>>> jets;
        jet_monos(S.n, cnt, bd.d, jets);
        for (const auto& [even, odd] : jets)
            for (const auto& exp : umono) {
                UPoly m(S.nv, S.n);
                m.terms.emplace_back(exp, Rat(1));
                Term t;
                t.c = Scalar(BaseScalar::from_poly(m));
                t.even = even;
                t.odd = odd;
                ReducedOneForm w(S.nv, S.n);
                DiffPoly& dst = is_h ? w.h[slot - 1] : w.g[slot - 1];
                dst.terms.push_back(std::move(t));
                out.push_back(std::move(w));
            }
    };
    for (int i = 1; i <= S.n; ++i) emit(false, i, bd.p);
    for (int i = 1; i <= S.n; ++i) emit(true, i, bd.p - 1);
    if (out.size() > kAnsatzMaxUnknowns)
        fail(ErrorKind::SystemTooLarge,
             "ansatz has " + std::to_string(out.size()) + " unknowns (cap " +
                 std::to_string(kAnsatzMaxUnknowns) + ")");
    return out;
}

// Sparse accumulation of the linear system: rows are keyed by the monomial
// (operator tag, slot kind, slot index, jet factors, u-exponents) of the
// image forms.
struct AnsatzSystem {
    using RowKey = std::tuple<int, int, int, std::vector<std::tuple<int, int, int>>,
                              std::vector<std::pair<int, int>>, std::vector<int>>;
    std::map<RowKey, int> row_of;
    std::vector<std::tuple<int, int, Rat>> entries;

    void feed(const ReducedOneForm& w, int op_tag, int col) {
        auto slot = [&](int gh, int idx, const DiffPoly& a) {
            for (const Term& t : a.terms) {
                if (!t.logs.empty())
                    fail(ErrorKind::Internal, "log symbol in an ansatz image");
                BaseScalar b = t.c.to_base();
                if (!b.is_polynomial())
                    fail(ErrorKind::NotPolynomial, "ansatz image has a nonpolynomial coefficient");
                Rat den = b.den.constant_value();
                for (const auto& [e, q] : b.num.terms) {
                    RowKey key{op_tag, gh, idx, t.even, t.odd, e};
                    auto [it, fresh] = row_of.try_emplace(key, static_cast<int>(row_of.size()));
                    if (fresh && row_of.size() > kAnsatzMaxRows)
                        fail(ErrorKind::SystemTooLarge,
                             "ansatz system exceeds " + std::to_string(kAnsatzMaxRows) + " rows");
                    entries.emplace_back(it->second, col, q / den);
                }
            }
        };
        for (int i = 0; i < w.nd; ++i) slot(0, i, w.g[i]);
        for (int i = 0; i < w.nd; ++i) slot(1, i, w.h[i]);
    }

    QMat dense(int cols) const {
        size_t rows = row_of.size();
        if (rows * static_cast<size_t>(cols) > kAnsatzMaxEntries)
            fail(ErrorKind::SystemTooLarge, "ansatz matrix of " + std::to_string(rows) + "x" +
                                                std::to_string(cols) + " exceeds the entry cap");
        QMat m(rows, QVec(cols, Rat(0)));
        for (const auto& [r, c, v] : entries)
            if (c < cols) m[r][c] += v;
        return m;
    }

    // Dense matrix of the first `cols` columns with column index `cols`
    // holding the right-hand side (entries fed with col == cols).
    QVec rhs_column(int cols) const {
        QVec b(row_of.size(), Rat(0));
        for (const auto& [r, c, v] : entries)
            if (c == cols) b[r] += v;
        return b;
    }
};

inline ReducedOneForm combine(const SemisimpleHydroPair& S,
                              const std::vector<ReducedOneForm>& basis, const QVec& coef) {
    ReducedOneForm acc(S.nv, S.n);
    for (size_t k = 0; k < basis.size(); ++k)
        if (coef[k] != 0) acc = acc + coef[k] * basis[k];
    return acc;
}

} // namespace detail

// Probe the quotient at one bidegree within a finite ansatz. kernel2 returns
// a basis of the bounded representatives annihilated by both structures;
// coboundary decides whether rhs is the image under D0 D1 of a bounded
// representative two bidegrees down. Negative verdicts are only valid within
// the stated bound, and the report says so.
inline AnsatzReport ansatz_solve(const SemisimpleHydroPair& S, const AnsatzProblem& pb,
                                 AnsatzMode mode) {
    AnsatzReport rep;
    rep.mode = mode;
    rep.target = pb.target;
    rep.udeg_bound = pb.udeg_bound;
    rep.scope = "within coefficient u-degree <= " + std::to_string(pb.udeg_bound);
    rep.witness = ReducedOneForm(S.nv, S.n);

    if (mode == AnsatzMode::kernel2) {
        std::vector<ReducedOneForm> basis =
            detail::ansatz_basis(S, pb.target, pb.udeg_bound);
        rep.unknowns = static_cast<int>(basis.size());
        detail::AnsatzSystem sys;
        for (size_t k = 0; k < basis.size(); ++k) {
            sys.feed(dtilde(S.H0, basis[k]), 0, static_cast<int>(k));
            sys.feed(dtilde(S.H1, basis[k]), 1, static_cast<int>(k));
        }
        rep.equations = static_cast<int>(sys.row_of.size());
        QMat m = sys.dense(rep.unknowns);
        for (const QVec& v : nullspace(std::move(m), rep.unknowns)) {
            ReducedOneForm w = detail::combine(S, basis, v);
            if (!dtilde(S.H0, w).is_zero() || !dtilde(S.H1, w).is_zero())
                fail(ErrorKind::Internal, "kernel element fails the direct check");
            rep.kernel.push_back(std::move(w));
        }
        return rep;
    }

    // Membership of rhs in the image of D0 D1 from bidegree (p-2, d-2).
    if (!pb.rhs.is_zero()) {
        Bidegree got = pb.rhs.bidegree();
        if (!(got == pb.target))
            fail(ErrorKind::WrongBidegree, "coboundary target sits at " + got.str() +
                                               ", problem asks for " + pb.target.str());
    } else {
        rep.coboundary = true; // the zero class is trivially exact
        return rep;
    }
    Bidegree src{pb.target.p - 2, pb.target.d - 2};
    std::vector<ReducedOneForm> basis = detail::ansatz_basis(S, src, pb.udeg_bound);
    rep.unknowns = static_cast<int>(basis.size());
    detail::AnsatzSystem sys;
    for (size_t k = 0; k < basis.size(); ++k)
        sys.feed(dtilde(S.H0, dtilde(S.H1, basis[k])), 0, static_cast<int>(k));
    sys.feed(pb.rhs, 0, rep.unknowns);
    rep.equations = static_cast<int>(sys.row_of.size());
    QMat m = sys.dense(rep.unknowns);
    QVec b = sys.rhs_column(rep.unknowns);
    std::optional<QVec> x = solve(std::move(m), b);
    if (x) {
        rep.coboundary = true;
        rep.witness = detail::combine(S, basis, *x);
        if (!(dtilde(S.H0, dtilde(S.H1, rep.witness)) == pb.rhs))
            fail(ErrorKind::Internal, "coboundary witness fails the direct check");
    }
    return rep;
}

} // namespace vbh
