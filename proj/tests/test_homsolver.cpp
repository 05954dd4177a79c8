#include <catch2/catch_amalgamated.hpp>

#include "abmod/homsolver.hpp"
#include "support.hpp"

using namespace abmod;
using testsupport::Rng;

namespace {

constexpr int N = 12;

ABModule rank4_module(const Scalar& l, const Scalar& m, int prec = N) {
    BMatrix a(4, 4, prec);
    a.at(0, 0) = BSeries::monomial(l, 1, prec);
    a.at(0, 1) = BSeries::one(prec);
    a.at(1, 1) = BSeries::monomial(m, 1, prec);
    a.at(0, 2) = BSeries::one(prec);
    a.at(2, 2) = BSeries::monomial(-m, 1, prec);
    a.at(1, 3) = BSeries::one(prec);
    a.at(2, 3) = BSeries::constant(Scalar(-1), prec);
    a.at(3, 3) = BSeries::monomial(-l, 1, prec);
    return ABModule(a, {"e1", "e2", "e3", "e4"});
}

ABModule rank2_remark(const Scalar& l, const Scalar& alpha, int prec = N) {
    BMatrix a(2, 2, prec);
    a.at(0, 0) = BSeries::monomial(l, 1, prec);
    a.at(1, 1) = BSeries::monomial(l, 1, prec);
    BSeries c = BSeries::one(prec);
    c.set_coeff(1, alpha);
    a.at(0, 1) = c;
    return ABModule(a, {"x", "y"});
}

} // namespace

TEST_CASE("hom dimension between elementary modules") {
    // dim Hom(E_l, E_m) = 1 iff l - m is a non-negative integer, else 0;
    // the generator is b^{l-m}
    auto dim_of = [](const Scalar& l, const Scalar& m) {
        return solve_hom(elementary(l, N), elementary(m, N)).dim;
    };
    REQUIRE(dim_of(Scalar(1), Scalar(0)) == 1);
    REQUIRE(dim_of(Scalar(0), Scalar(1)) == 0);
    REQUIRE(dim_of(Scalar(0), Scalar(0)) == 1);
    REQUIRE(dim_of(Scalar(5), Scalar(1)) == 1);
    REQUIRE(dim_of(Scalar(1, 2), Scalar(-1, 2)) == 1);
    REQUIRE(dim_of(Scalar(1, 2), Scalar(1, 3)) == 0);
    REQUIRE(dim_of(Scalar::i(), Scalar(0)) == 0);
    REQUIRE(dim_of(Scalar(0), Scalar::i()) == 0);
    REQUIRE(dim_of(Scalar::i() + Scalar(2), Scalar::i()) == 1);
    REQUIRE(dim_of(Scalar(-1, 3), Scalar(-7, 3)) == 1);

    // generator of Hom(E_1, E_0) is c*b
    HomBasis h = solve_hom(elementary(Scalar(1), N), elementary(Scalar(0), N));
    REQUIRE(h.dim == 1);
    REQUIRE(h.stable);
    const BSeries& gen = h.morphisms[0].matrix().at(0, 0);
    REQUIRE(gen.valuation() == 1);
    BSeries normalized = gen.coeff(1).is_one() ? gen : (Scalar(1) / gen.coeff(1)) * gen;
    REQUIRE(normalized == b_series(N - 1));
}

TEST_CASE("solver output re-verifies by evaluation") {
    Rng rng(55);
    ABModule e = rank4_module(Scalar(1), Scalar(1, 3));
    HomBasis ends = solve_hom(e, e);
    REQUIRE(ends.dim >= 1);
    for (const auto& f : ends.morphisms) {
        REQUIRE(f.verify());
        REQUIRE(testsupport::morphism_evaluation_check(f, rng));
    }
}

TEST_CASE("solver agrees with the dense kernel oracle") {
    Rng rng(77);
    std::vector<ABModule> mods;
    mods.push_back(elementary(Scalar(0), 8));
    mods.push_back(elementary(Scalar(1), 8));
    mods.push_back(rank2_remark(Scalar(0), Scalar(1), 8));
    mods.push_back(direct_sum(elementary(Scalar(0), 8), elementary(Scalar(1), 8)));
    mods.push_back(base_change(rank2_remark(Scalar(1), Scalar(2), 8), testsupport::random_gauge(rng, 2, 8)));
    for (const auto& e : mods)
        for (const auto& f : mods) {
            if (e.precision() != f.precision()) continue;
            HomBasis h = solve_hom(e, f);
            REQUIRE(h.dim == testsupport::dense_hom_dimension(e, f));
        }
}

TEST_CASE("rank-4 module: hom space into the adjoint is one-dimensional") {
    ABModule e = rank4_module(Scalar(1), Scalar(1, 3));
    HomBasis h = solve_hom(e, adjoint(e));
    REQUIRE(h.dim == 1);
    REQUIRE(h.stable);
    const ABMorphism& gen = h.morphisms[0];
    REQUIRE(is_invertible(gen));

    // the generator is, up to one scalar, e1 -> ě4*, e2 -> -ě3*, e3 -> ě2*,
    // e4 -> -ě1*
    const BMatrix& m = gen.matrix();
    Scalar c = m.at(3, 0).coeff(0);
    REQUIRE(!c.is_zero());
    BMatrix expect(4, 4, m.precision());
    expect.at(3, 0) = BSeries::constant(c, m.precision());
    expect.at(2, 1) = BSeries::constant(-c, m.precision());
    expect.at(1, 2) = BSeries::constant(c, m.precision());
    expect.at(0, 3) = BSeries::constant(-c, m.precision());
    REQUIRE(m == expect);
}

TEST_CASE("composition") {
    ABModule e2 = elementary(Scalar(2), N), e1 = elementary(Scalar(1), N), e0 = elementary(Scalar(0), N);
    ABMorphism f = solve_hom(e2, e1).morphisms[0];
    ABMorphism g = solve_hom(e1, e0).morphisms[0];
    ABMorphism gf = compose(g, f);
    REQUIRE(gf.verify());
    // product of two valuation-1 generators is the b^2 generator of Hom(E_2, E_0)
    REQUIRE(gf.matrix().at(0, 0).valuation() == 2);
    ABMorphism h = solve_hom(e2, e0).morphisms[0];
    REQUIRE(h.matrix().at(0, 0).valuation() == 2);

    ABMorphism id = ABMorphism::identity(e2);
    REQUIRE(compose(f, id).matrix() == f.matrix());
    ABMorphism id1 = ABMorphism::identity(e1);
    REQUIRE(compose(id1, f).matrix() == f.matrix());
    REQUIRE_THROWS_AS(compose(f, g), DimensionMismatch);
}

TEST_CASE("invertibility and inverse morphisms") {
    ABModule e = rank2_remark(Scalar(0), Scalar(1));
    REQUIRE(is_invertible(ABMorphism::identity(e)));

    Rng rng(91);
    BMatrix t = testsupport::random_gauge(rng, 2, N);
    ABModule moved = base_change(e, t);
    ABMorphism iso(moved, e, t); // new coords -> old coords
    REQUIRE(iso.verify());
    REQUIRE(is_invertible(iso));
    ABMorphism back = inverse(iso);
    REQUIRE(back.verify());
    REQUIRE(compose(back, iso).matrix() == BMatrix::identity(2, N));

    BMatrix bm(1, 1, N);
    bm.at(0, 0) = b_series(N);
    ABModule e0 = elementary(Scalar(0), N);
    ABMorphism notinv(e0, e0, bm);
    REQUIRE_FALSE(is_invertible(notinv));
}

TEST_CASE("adjoint of a morphism") {
    ABModule e1 = elementary(Scalar(1), N), e0 = elementary(Scalar(0), N);
    ABMorphism f = solve_hom(e1, e0).morphisms[0];
    ABMorphism fa = adjoint_of_morphism(f);
    REQUIRE(fa.domain().a_matrix() == adjoint(e0).a_matrix());
    REQUIRE(fa.codomain().a_matrix() == adjoint(e1).a_matrix());
    REQUIRE(fa.verify());
    // (-b)^T on a 1x1 generator b
    REQUIRE(fa.matrix().at(0, 0) == -f.matrix().at(0, 0));

    // adjoint of identity, involution, and contravariance
    ABModule e = rank4_module(Scalar(1), Scalar(1, 3));
    ABMorphism id = ABMorphism::identity(e);
    REQUIRE(adjoint_of_morphism(id).matrix() == BMatrix::identity(4, N));
    HomBasis ends = solve_hom(e, e);
    for (const auto& g : ends.morphisms)
        REQUIRE(adjoint_of_morphism(adjoint_of_morphism(g)).matrix() == g.matrix());

    ABModule e2 = elementary(Scalar(2), N);
    ABMorphism u = solve_hom(e2, e1).morphisms[0];
    ABMorphism gu = compose(f, u);
    REQUIRE(adjoint_of_morphism(gu).matrix() ==
            compose(adjoint_of_morphism(u), adjoint_of_morphism(f)).matrix());
}

TEST_CASE("injective endomorphisms of regular modules are bijective") {
    // restated at precision: among computed End bases, det M(b) != 0 as a
    // series forces det M(0) != 0
    std::vector<ABModule> mods{elementary(Scalar(0), N), rank2_remark(Scalar(0), Scalar(1)),
                               rank4_module(Scalar(1), Scalar(1, 3))};
    Rng rng(101);
    for (const auto& e : mods) {
        HomBasis ends = solve_hom(e, e);
        std::vector<ABMorphism> probes = ends.morphisms;
        for (int t = 0; t < 25; ++t) {
            ABMorphism combo = Scalar(0) * ends.morphisms[0];
            for (const auto& m : ends.morphisms)
                combo = combo + testsupport::random_rational(rng, 3, 2) * m;
            probes.push_back(combo);
        }
        for (const auto& f : probes) {
            // det as a series: compute via QMatrix on each coefficient? use
            // the constant term vs full-series zero test on the det expansion
            // through permutations is costly; at these ranks use the matrix
            // inverse criterion: invertible iff det(0) != 0, and injectivity
            // at precision means some coefficient of det survives; here we
            // simply check: if f is not invertible then f has a kernel vector
            // visible at precision (det series vanishes identically).
            if (is_invertible(f)) continue;
            // build det series by fraction-free expansion over the series ring
            const BMatrix& m = f.matrix();
            int n = m.rows();
            std::vector<int> perm(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
            BSeries det = BSeries::zero(m.precision());
            // n <= 4 here, so permutation expansion is fine
            std::sort(perm.begin(), perm.end());
            do {
                int inv = 0;
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        if (perm[static_cast<size_t>(i)] > perm[static_cast<size_t>(j)]) ++inv;
                BSeries term = BSeries::one(m.precision());
                for (int i = 0; i < n; ++i) term = term * m.at(i, perm[static_cast<size_t>(i)]);
                det = (inv % 2 == 0) ? det + term : det - term;
            } while (std::next_permutation(perm.begin(), perm.end()));
            REQUIRE(det.is_zero());
        }
    }
}

TEST_CASE("isomorphism verdicts") {
    // the remark module and its conjugate are not isomorphic
    ABModule e = rank2_remark(Scalar(0), Scalar(1));
    IsoResult r = are_isomorphic(e, conjugate(e), 32, 7);
    REQUIRE(r.verdict == IsoVerdict::no);

    // base-changed module is isomorphic, with the gauge as a witness
    Rng rng(19);
    BMatrix t = testsupport::random_gauge(rng, 2, N);
    IsoResult r2 = are_isomorphic(e, base_change(e, t), 32, 7);
    REQUIRE(r2.verdict == IsoVerdict::yes);
    REQUIRE(r2.witness.has_value());
    REQUIRE(is_invertible(*r2.witness));

    // E_1 vs E_0: hom space exists but has no unit
    IsoResult r3 = are_isomorphic(elementary(Scalar(1), N), elementary(Scalar(0), N), 32, 7);
    REQUIRE(r3.verdict == IsoVerdict::no);
    REQUIRE(r3.hom_dim == 1);

    // different ranks are never isomorphic
    IsoResult r4 = are_isomorphic(e, elementary(Scalar(0), N), 8, 7);
    REQUIRE(r4.verdict == IsoVerdict::no);
}

TEST_CASE("stability flag and resonance bound") {
    // Hom(E_1, E_0): resonance at order 1, bound 3, so N = 12 is stable
    HomBasis h = solve_hom(elementary(Scalar(1), N), elementary(Scalar(0), N));
    REQUIRE(h.stable);
    // at tiny precision the flag degrades
    HomBasis tiny = solve_hom(elementary(Scalar(1), 3), elementary(Scalar(0), 3));
    REQUIRE_FALSE(tiny.stable);
}
