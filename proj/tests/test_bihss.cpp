#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <random>
#include <string>

#include "vbh/bihss.hpp"

using namespace vbh;

namespace {

template <typename F>
std::optional<ErrorKind> error_kind(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

DiffPoly u(int nv, int nd, int i, int s) { return DiffPoly::var(nv, nd, JetVar::u(i, s)); }
DiffPoly th(int nv, int nd, int i, int s) { return DiffPoly::var(nv, nd, JetVar::th(i, s)); }
BaseScalar bconst(int nv, int nd, const Rat& q) { return BaseScalar::constant(nv, nd, q); }
BaseScalar bvar(int nv, int nd, int i) { return BaseScalar::var(nv, nd, i); }

SemisimpleHydroPair kdv_pair() { return build_pair({bconst(1, 1, Rat(1))}); }

SemisimpleHydroPair pair2() { return build_pair({bvar(2, 2, 1), bconst(2, 2, Rat(1))}); }

std::vector<BaseScalar> rot_metric() {
    return {bvar(2, 2, 1) * bvar(2, 2, 2), bvar(2, 2, 2)};
}

BaseScalar random_base(std::mt19937_64& rng, int nv, int nd, int deg) {
    std::uniform_int_distribution<int> dc(-3, 3), di(1, nd), dl(0, deg);
    BaseScalar acc(nv, nd);
    for (int t = 0; t < 2; ++t) {
        BaseScalar m = bconst(nv, nd, Rat(dc(rng)));
        for (int k = dl(rng); k > 0; --k) m = m * bvar(nv, nd, di(rng));
        acc = acc + m;
    }
    return acc;
}

// A random element of the gauge space: a one-form with x-degree-1 even
// coefficients on the du slots only.
ReducedOneForm random_gauge(std::mt19937_64& rng, int nv, int nd) {
    std::uniform_int_distribution<int> dj(1, nd);
    ReducedOneForm a(nv, nd);
    for (int i = 1; i <= nd; ++i)
        a.g[i - 1] = Scalar(random_base(rng, nv, nd, 3)) * u(nv, nd, dj(rng), 1);
    return a;
}

NormalFormCocycle random_families(std::mt19937_64& rng, const SemisimpleHydroPair& S,
                                  bool normal_shape) {
    NormalFormCocycle c = NormalFormCocycle::zero(S.nv, S.n);
    auto rb = [&] { return random_base(rng, S.nv, S.n, 1); };
    for (int i = 1; i <= S.n; ++i) {
        for (int j = 1; j <= S.n; ++j) {
            if (!normal_shape || j == i) c.x1(i, j) = rb();
            if (!normal_shape) c.y1(i, j) = rb();
            for (int k = 1; k <= S.n; ++k) {
                c.x2(i, k, j) = rb();
                c.z2(i, j, k) = rb();
                if (k >= j) {
                    BaseScalar v = rb();
                    c.y2(i, j, k) = v;
                    c.y2(i, k, j) = v;
                }
                for (int l = k; l <= S.n; ++l) {
                    BaseScalar v = rb();
                    c.z3(i, j, k, l) = v;
                    c.z3(i, j, l, k) = v;
                }
            }
        }
        if (normal_shape) c.y2(i, i, i) = BaseScalar(S.nv, S.n);
    }
    return c;
}

} // namespace

TEST_CASE("pair assembly produces the canonical structures", "[bihss]") {
    auto K = kdv_pair();
    REQUIRE(K.P0() == functional_of(rat_of(1, 2) * th(1, 1, 1, 0) * th(1, 1, 1, 1)));
    REQUIRE(K.P1() ==
            functional_of(rat_of(1, 2) * u(1, 1, 1, 0) * th(1, 1, 1, 0) * th(1, 1, 1, 1)));
    REQUIRE(K.verified());

    auto S2 = pair2();
    REQUIRE(S2.verified());
    REQUIRE(S2.a[0][0] == bconst(2, 2, Rat(1, 2)));
    REQUIRE(S2.a[0][1].is_zero());
    REQUIRE(S2.a[1][0].is_zero());
    REQUIRE(S2.b[0][0] == bconst(2, 2, Rat(1, 2)));
    REQUIRE(S2.b[0][1].is_zero());
    REQUIRE(S2.b[1][0].is_zero());

    auto S3 = build_pair({bvar(3, 3, 1), bvar(3, 3, 2), bconst(3, 3, Rat(1))});
    REQUIRE(S3.verified());

    REQUIRE(error_kind([] { build_pair({BaseScalar(1, 1)}); }) == ErrorKind::ZeroMetricEntry);
    REQUIRE(error_kind([] { build_pair(rot_metric()); }) == ErrorKind::NotBihamiltonian);

    auto R = build_pair_unchecked(rot_metric());
    REQUIRE_FALSE(R.verified());
    ReducedOneForm probe(2, 2);
    probe.g[0] = th(2, 2, 1, 2);
    REQUIRE(error_kind([&] { dtilde(R.H0, probe); }) == ErrorKind::UnverifiedStructure);
}

TEST_CASE("metric extraction recovers the diagonal", "[bihss]") {
    auto K = kdv_pair();
    auto S2 = pair2();
    REQUIRE(extract_metric(K.P0(), 1) == std::vector<BaseScalar>{bconst(1, 1, Rat(1))});
    REQUIRE(extract_metric(K.P1(), 1) == std::vector<BaseScalar>{bvar(1, 1, 1)});
    REQUIRE(extract_metric(S2.P0(), 2) ==
            std::vector<BaseScalar>({bvar(2, 2, 1), bconst(2, 2, Rat(1))}));

    auto crossed = functional_of(rat_of(1, 2) * th(2, 2, 2, 0) * th(2, 2, 1, 1));
    REQUIRE(error_kind([&] { extract_metric(crossed, 2); }) == ErrorKind::ZeroMetricEntry);

    auto junk = functional_of(rat_of(1, 2) * th(1, 1, 1, 0) * th(1, 1, 1, 1) +
                              u(1, 1, 1, 1) * th(1, 1, 1, 0) * th(1, 1, 1, 1));
    REQUIRE(error_kind([&] { extract_metric(junk, 1); }) == ErrorKind::WrongShape);
}

TEST_CASE("index functions read off the top coefficients", "[bihss]") {
    auto K = kdv_pair();

    ReducedOneForm w(1, 1);
    w.g[0] = th(1, 1, 1, 2);
    auto ind = indices(K, w);
    REQUIRE(ind.size() == 1);
    REQUIRE(ind[0] == bconst(1, 1, Rat(1)));

    ReducedOneForm low(1, 1);
    low.g[0] = th(1, 1, 1, 1);
    REQUIRE(error_kind([&] { indices(K, low); }) == ErrorKind::WrongBidegree);

    ReducedOneForm mixed(1, 1);
    mixed.g[0] = th(1, 1, 1, 2) + th(1, 1, 1, 1);
    REQUIRE(error_kind([&] { indices(K, mixed); }) == ErrorKind::WrongBidegree);

    ReducedOneForm zero(1, 1);
    auto iz = indices(K, zero);
    REQUIRE(iz[0].is_zero());

    // indices of exact forms vanish
    ReducedOneForm alpha(1, 1);
    alpha.g[0] = u(1, 1, 1, 1);
    auto cob = indices(K, dtilde(K.H0, alpha));
    REQUIRE(cob[0].is_zero());

    auto S2 = pair2();
    ReducedOneForm alpha2(2, 2);
    alpha2.g[0] = u(2, 2, 2, 1);
    alpha2.g[1] = Scalar(bvar(2, 2, 1)) * u(2, 2, 1, 1);
    for (const auto& e : indices(S2, dtilde(S2.H0, alpha2))) REQUIRE(e.is_zero());
    for (const auto& e : indices(S2, dtilde(S2.H1, alpha2))) REQUIRE(e.is_zero());

    ReducedOneForm foreign(2, 2);
    foreign.g[0] = Scalar(bvar(2, 2, 2)) * th(2, 2, 1, 2);
    REQUIRE(error_kind([&] { indices(S2, foreign); }) == ErrorKind::NotSingleVariable);
}

TEST_CASE("tau classes carry index -3c", "[bihss]") {
    auto K = kdv_pair();
    auto tau = build_tau(K, {bconst(1, 1, Rat(1))});

    ReducedOneForm expect(1, 1);
    expect.g[0] = rat_of(-3, 2) * th(1, 1, 1, 2);
    expect.h[0] = rat_of(-3, 2) * u(1, 1, 1, 2);
    REQUIRE(tau == expect);
    REQUIRE(is_cocycle(K, tau));
    REQUIRE(indices(K, tau)[0] == bconst(1, 1, Rat(-3)));

    auto tz = build_tau(K, {BaseScalar(1, 1)});
    REQUIRE(tz.is_zero());

    auto S2 = pair2();
    REQUIRE(error_kind([&] { build_tau(S2, {bvar(2, 2, 2), BaseScalar(2, 2)}); }) ==
            ErrorKind::NotSingleVariable);

    BaseScalar u1 = bvar(2, 2, 1), u2 = bvar(2, 2, 2);
    std::vector<BaseScalar> c = {u1 * u1 + bconst(2, 2, Rat(3)) * u1,
                                 u2 * u2 - bconst(2, 2, Rat(1))};
    auto tau2 = build_tau(S2, c);
    REQUIRE(is_cocycle(S2, tau2));
    auto ind2 = indices(S2, tau2);
    const BaseScalar minus3 = bconst(2, 2, Rat(-3));
    REQUIRE(ind2[0] == minus3 * c[0]);
    REQUIRE(ind2[1] == minus3 * c[1]);
}

TEST_CASE("the cocycle predicate separates classes from junk", "[bihss]") {
    auto K = kdv_pair();
    ReducedOneForm w(1, 1);
    w.g[0] = u(1, 1, 1, 1) * th(1, 1, 1, 1);
    REQUIRE_FALSE(is_cocycle(K, w));

    ReducedOneForm low(1, 1);
    low.g[0] = th(1, 1, 1, 1);
    REQUIRE(error_kind([&] { is_cocycle(K, low); }) == ErrorKind::WrongBidegree);

    auto S2 = pair2();
    std::mt19937_64 rng(61);
    for (int t = 0; t < 5; ++t) {
        auto a = random_gauge(rng, 2, 2), b = random_gauge(rng, 2, 2);
        auto cob = dtilde(S2.H0, a) + dtilde(S2.H1, b);
        REQUIRE(is_cocycle(S2, cob));
        for (const auto& e : indices(S2, cob)) REQUIRE(e.is_zero());
    }
}

TEST_CASE("normalization fixes the gauge and is idempotent", "[bihss]") {
    auto K = kdv_pair();
    auto tau = build_tau(K, {bconst(1, 1, Rat(1))});
    auto nr = normalize_cocycle(K, tau);

    ReducedOneForm expect(1, 1);
    expect.g[0] = rat_of(-3) * th(1, 1, 1, 2);
    REQUIRE(nr.omega == expect);
    REQUIRE(nr.normal.is_normal());
    REQUIRE(nr.normal.assemble() == nr.omega);

    ReducedOneForm gamma_expect(1, 1);
    gamma_expect.g[0] = rat_of(-3, 2) * u(1, 1, 1, 1);
    REQUIRE(nr.gauge.gamma == gamma_expect);
    REQUIRE(nr.gauge.alpha.is_zero());
    REQUIRE(nr.gauge.beta.is_zero());
    REQUIRE(nr.omega == tau + dtilde(K.H0, nr.gauge.gamma) + dtilde(K.H0, nr.gauge.alpha) +
                            dtilde(K.H1, nr.gauge.beta));

    auto again = normalize_cocycle(K, nr.omega);
    REQUIRE(again.omega == nr.omega);
    REQUIRE(again.gauge.gamma.is_zero());
    REQUIRE(again.gauge.alpha.is_zero());
    REQUIRE(again.gauge.beta.is_zero());

    // seeding the u'' family is undone by the first gauge step
    ReducedOneForm seed(1, 1);
    seed.g[0] = rat_of(-1) * u(1, 1, 1, 1);
    auto seeded = nr.omega + dtilde(K.H0, seed);
    REQUIRE_FALSE(NormalFormCocycle::extract(seeded).y1(1, 1).is_zero());
    auto back = normalize_cocycle(K, seeded);
    REQUIRE(back.omega == nr.omega);

    REQUIRE(error_kind([&] {
        ReducedOneForm junk(1, 1);
        junk.g[0] = u(1, 1, 1, 1) * th(1, 1, 1, 1);
        normalize_cocycle(K, junk);
    }) == ErrorKind::NotACocycle);
}

TEST_CASE("normal forms are class invariants", "[bihss]") {
    auto S2 = pair2();
    BaseScalar u1 = bvar(2, 2, 1), u2 = bvar(2, 2, 2);
    auto tau2 = build_tau(S2, {u1, u2 * u2});
    auto nr = normalize_cocycle(S2, tau2);
    REQUIRE(nr.normal.is_normal());
    REQUIRE(nr.omega == tau2 + dtilde(S2.H0, nr.gauge.gamma) + dtilde(S2.H0, nr.gauge.alpha) +
                            dtilde(S2.H1, nr.gauge.beta));
    // indices survive gauge fixing
    auto i0 = indices(S2, tau2), i1 = indices(S2, nr.omega);
    REQUIRE(i0[0] == i1[0]);
    REQUIRE(i0[1] == i1[1]);

    std::mt19937_64 rng(62);
    for (int t = 0; t < 4; ++t) {
        auto a = random_gauge(rng, 2, 2), b = random_gauge(rng, 2, 2);
        auto moved = tau2 + dtilde(S2.H0, a) + dtilde(S2.H1, b);
        auto nr2 = normalize_cocycle(S2, moved);
        REQUIRE(nr2.omega == nr.omega);
    }

    // round trip of the coefficient families
    REQUIRE(NormalFormCocycle::extract(tau2).assemble() == tau2);

    auto bad = NormalFormCocycle::zero(2, 2);
    bad.y2(1, 1, 2) = bconst(2, 2, Rat(1));
    REQUIRE(error_kind([&] { bad.validate(); }) == ErrorKind::WrongShape);
}

TEST_CASE("scaling degrees and the Euler derivation", "[bihss]") {
    REQUIRE(conformal_check({bconst(1, 1, Rat(1))}) == std::vector<Rat>{Rat(0)});
    REQUIRE(conformal_check({bvar(2, 2, 1), bconst(2, 2, Rat(1))}) ==
            std::vector<Rat>({Rat(1), Rat(0)}));

    try {
        conformal_check({bvar(2, 2, 2), bconst(2, 2, Rat(1))});
        FAIL("expected a scaling failure");
    } catch (const Error& e) {
        REQUIRE(e.kind() == ErrorKind::IrreducibilityViolated);
        REQUIRE(std::string(e.what()).find("(2,1)") != std::string::npos);
    }
    REQUIRE(error_kind([] {
        conformal_check({bvar(1, 1, 1) + bconst(1, 1, Rat(1))});
    }) == ErrorKind::NotHomogeneousScaling);

    auto K = kdv_pair();
    ConformalData cd{{Rat(0)}, Rat(0), Rat(2), Rat(1)};
    auto E = euler_field(K, cd);
    REQUIRE(E.u_img[0] == rat_of(2) * u(1, 1, 1, 0));
    REQUIRE(E.th_img[0] == th(1, 1, 1, 0));
    for (int s = 0; s <= 3; ++s) {
        REQUIRE(E.apply(u(1, 1, 1, s)) == Rat(2 + s) * u(1, 1, 1, s));
        REQUIRE(E.apply(th(1, 1, 1, s)) == Rat(1 + s) * th(1, 1, 1, s));
    }

    auto S2 = pair2();
    ConformalData cd2{{Rat(1), Rat(0)}, Rat(1, 3), Rat(5, 2), Rat(-2, 7)};
    REQUIRE_NOTHROW(euler_field(S2, cd2));

    REQUIRE(error_kind([&] {
        euler_field(K, ConformalData{{Rat(0)}, Rat(1), Rat(1), Rat(0)});
    }) == ErrorKind::DegenerateScaling);
    REQUIRE(error_kind([&] {
        euler_field(K, ConformalData{{Rat(1)}, Rat(0), Rat(2), Rat(1)});
    }) == ErrorKind::ConformalityFailed);
}

TEST_CASE("central invariant laws and the scaling residual", "[bihss]") {
    auto m0 = conformal_central_invariants(ConformalData{{Rat(0)}, Rat(0), Rat(2), Rat(1)});
    REQUIRE(m0.m == std::vector<Rat>{Rat(0)});
    auto m13 = conformal_central_invariants(ConformalData{{Rat(0)}, Rat(0), Rat(3), Rat(1)});
    REQUIRE(m13.m == std::vector<Rat>{Rat(1, 3)});
    auto mc = conformal_central_invariants(ConformalData{{Rat(1, 3)}, Rat(0), Rat(3), Rat(1)});
    REQUIRE(mc.m == std::vector<Rat>{Rat(0)});
    REQUIRE(error_kind([] {
        conformal_central_invariants(ConformalData{{Rat(0)}, Rat(2), Rat(2), Rat(0)});
    }) == ErrorKind::DegenerateScaling);

    // one dynamic coordinate plus one free constant symbol
    auto K = build_pair({bconst(2, 1, Rat(1))});
    BaseScalar C = bvar(2, 1, 2), u1 = bvar(2, 1, 1);
    const Rat mus[3] = {Rat(1), Rat(0), Rat(-1)};
    const BaseScalar cands[3] = {C, C * u1, C * u1 * u1};
    for (int k = 0; k < 3; ++k) {
        ConformalData cd{{Rat(0)}, Rat(0), Rat(2), mus[k]};
        auto law = conformal_central_invariants(cd);
        REQUIRE(law.m == std::vector<Rat>{Rat(k)});
        auto res = index_ode_check(K, cd, {cands[k]});
        REQUIRE(res[0].is_zero());
    }
    ConformalData cd1{{Rat(0)}, Rat(0), Rat(2), Rat(0)};
    REQUIRE_FALSE(index_ode_check(K, cd1, {bconst(2, 1, Rat(1))})[0].is_zero());
    REQUIRE(index_ode_check(K, cd1, {BaseScalar(2, 1)})[0].is_zero());
}

TEST_CASE("pencil operators satisfy the stated pins and nilpotence", "[bihss]") {
    auto K = kdv_pair();

    REQUIRE(dhat(K, 1, u(1, 1, 1, 1)) == th(1, 1, 1, 2));
    REQUIRE(dhat(K, 1, u(1, 1, 1, 0)).is_zero());
    REQUIRE(error_kind([&] { dhat(K, 2, u(1, 1, 1, 0)); }) == ErrorKind::IndexOutOfRange);

    REQUIRE(delta_minus_one(K, u(1, 1, 1, 1)) ==
            Scalar(bvar(1, 1, 1)) * th(1, 1, 1, 2) - th(1, 1, 1, 2).times_lambda(1));

    OneForm du0(1, 1);
    du0.add_du(1, 0, DiffPoly::constant(1, 1, Rat(1)));
    OneForm dth1(1, 1);
    dth1.add_dth(1, 1, DiffPoly::constant(1, 1, Rat(1)));
    REQUIRE(delta_minus_one(K, du0) ==
            DiffPoly::var(1, 1, JetVar::u(1, 0)) * dth1 - dth1.times_lambda(1));

    auto S2 = pair2();
    std::mt19937_64 rng(63);
    std::uniform_int_distribution<int> di(1, 2), ds(0, 2), dc(-3, 3);
    auto rnd_poly = [&] {
        DiffPoly p(2, 2);
        for (int t = 0; t < 3; ++t) {
            DiffPoly m = DiffPoly::constant(2, 2, Rat(dc(rng)));
            m = m * u(2, 2, di(rng), ds(rng)) * u(2, 2, di(rng), ds(rng));
            if (t % 2 == 0) m = m * th(2, 2, di(rng), ds(rng));
            p = p + m;
        }
        return p;
    };
    for (int t = 0; t < 6; ++t) {
        DiffPoly p = rnd_poly();
        REQUIRE(delta_minus_one(S2, delta_minus_one(S2, p)).is_zero());
        REQUIRE(dhat(S2, 1, dhat(S2, 1, p)).is_zero());
        REQUIRE((dhat(S2, 1, dhat(S2, 2, p)) + dhat(S2, 2, dhat(S2, 1, p))).is_zero());

        OneForm w(2, 2);
        w.add_du(di(rng), ds(rng), rnd_poly());
        w.add_dth(di(rng), ds(rng), rnd_poly());
        REQUIRE(delta_minus_one(S2, delta_minus_one(S2, w)).is_zero());
        REQUIRE((dhat(S2, 1, dhat(S2, 2, w)) + dhat(S2, 2, dhat(S2, 1, w))).is_zero());
    }

    // the plain variant leaves the generators alone
    OneForm wp(2, 2);
    wp.add_du(1, 0, u(2, 2, 1, 1));
    OneForm plain = dhat(S2, 1, wp, DhatVariant::plain);
    OneForm expect_plain(2, 2);
    expect_plain.add_du(1, 0, th(2, 2, 1, 2));
    REQUIRE(plain == expect_plain);
    OneForm full = dhat(S2, 1, wp, DhatVariant::deRham);
    OneForm expect_full = expect_plain;
    expect_full.add_dth(1, 1, u(2, 2, 1, 1));
    REQUIRE(full == expect_full);
}

TEST_CASE("rescaling is the square-root substitution", "[bihss]") {
    auto S = build_pair({bvar(1, 1, 1)});
    REQUIRE(S.verified());

    REQUIRE(psi_rescale(S, u(1, 1, 1, 2), PsiDir::fwd) ==
            Scalar(bvar(1, 1, 1)) * u(1, 1, 1, 2));
    REQUIRE(psi_rescale(S, th(1, 1, 1, 0), PsiDir::fwd) ==
            Scalar(RootScalar::root(S.roots, 1)) * th(1, 1, 1, 0));

    OneForm w(1, 1);
    w.add_du(1, 1, DiffPoly::constant(1, 1, Rat(1)));
    OneForm expect(1, 1);
    expect.add_du(1, 1, DiffPoly::constant(1, 1, Scalar(RootScalar::root(S.roots, 1))));
    REQUIRE(psi_rescale(S, w, PsiDir::fwd) == expect);

    auto S2 = pair2();
    std::mt19937_64 rng(64);
    std::uniform_int_distribution<int> di(1, 2), ds(0, 2), dc(-3, 3);
    for (int t = 0; t < 6; ++t) {
        DiffPoly p = DiffPoly::constant(2, 2, Rat(dc(rng)));
        p = p * u(2, 2, di(rng), ds(rng)) * th(2, 2, di(rng), ds(rng)) +
            u(2, 2, di(rng), ds(rng)) * u(2, 2, di(rng), ds(rng));
        REQUIRE(psi_rescale(S2, psi_rescale(S2, p, PsiDir::fwd), PsiDir::inv) == p);

        OneForm f(2, 2);
        f.add_du(di(rng), ds(rng), p);
        f.add_dth(di(rng), ds(rng), u(2, 2, di(rng), ds(rng)));
        REQUIRE(psi_rescale(S2, psi_rescale(S2, f, PsiDir::inv), PsiDir::fwd) == f);
    }
}

TEST_CASE("rotation coefficients vanish for decoupled metrics", "[bihss]") {
    auto S2 = pair2();
    auto G = rotation_coeffs(S2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) REQUIRE(G[i][j].is_zero());

    auto R = build_pair_unchecked(rot_metric());
    auto GR = rotation_coeffs(R);
    REQUIRE(GR[0][0].is_zero());
    REQUIRE(GR[1][1].is_zero());
    REQUIRE(GR[0][1].is_zero());
    REQUIRE_FALSE(GR[1][0].is_zero());
    REQUIRE(GR[1][0].eval({Rat(4), Rat(9)}) == Rat(-1, 36));
}

TEST_CASE("closed-form expansion agrees with the engine", "[bihss]") {
    auto K = kdv_pair();
    auto zero = NormalFormCocycle::zero(1, 1);
    auto [MZ, NZ] = dtilde0_closed_form(K, zero);
    REQUIRE(MZ[0].is_zero());
    REQUIRE(NZ[0].is_zero());

    auto tau = build_tau(K, {bconst(1, 1, Rat(1))});
    auto eng = dtilde(K.H0, tau);
    auto [M1, N1] = dtilde0_closed_form(K, tau);
    REQUIRE(eng.g[0] == M1[0]);
    REQUIRE(eng.h[0] == N1[0]);

    auto S2 = pair2();
    std::mt19937_64 rng(65);
    for (int t = 0; t < 3; ++t) {
        for (bool normal_shape : {true, false}) {
            auto nf = random_families(rng, S2, normal_shape);
            auto w = nf.assemble();
            auto engine = dtilde(S2.H0, w);
            auto [M, N] = dtilde0_closed_form(S2, nf);
            for (int i = 0; i < 2; ++i) {
                REQUIRE(engine.g[i] == M[i]);
                REQUIRE(engine.h[i] == N[i]);
            }
        }
    }

    ReducedOneForm bad(1, 1);
    bad.g[0] = th(1, 1, 1, 2) * u(1, 1, 1, 1);
    REQUIRE(error_kind([&] { dtilde0_closed_form(K, bad); }) == ErrorKind::WrongShape);

    auto asym = NormalFormCocycle::zero(2, 2);
    asym.z3(1, 1, 1, 2) = bconst(2, 2, Rat(1));
    REQUIRE(error_kind([&] { dtilde0_closed_form(S2, asym); }) == ErrorKind::WrongShape);
}
