#pragma once

#include <random>
#include <sstream>

#include "blaurent.hpp"
#include "homsolver.hpp"
#include "snf.hpp"

namespace abmod {

// ---------------------------------------------------------------------------
// submodules
// ---------------------------------------------------------------------------

/// A sub-(a,b)-module given by generators inside an ambient module. `normal`
/// records that the quotient is b-torsion free (all SNF valuations of the
/// generator matrix vanish).
struct Submodule {
    ABModule ambient;
    std::vector<Element> generators;
    bool normal = false;

    BMatrix generator_matrix() const {
        int n = ambient.rank();
        int k = static_cast<int>(generators.size());
        int p = ambient.precision();
        for (const auto& g : generators)
            for (const auto& s : g) p = std::min(p, s.precision());
        BMatrix m(n, k, p);
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < n; ++i) m.at(i, j) = generators[static_cast<size_t>(j)][static_cast<size_t>(i)].truncated(p);
        return m;
    }

    int rank() const { return smith_normal_form(generator_matrix()).rank; }

    bool contains(const Element& x) const { return in_column_span(generator_matrix(), x); }

    /// a-stability: a(g) lies in the span for every generator.
    bool is_a_stable() const {
        BMatrix g = generator_matrix();
        SmithForm s = smith_normal_form(g);
        for (const auto& gen : generators) {
            Element ag = a_apply(ambient, gen);
            int p = g.precision();
            for (auto& c : ag) c = c.truncated(p);
            if (!snf_solve(s, ag)) return false;
        }
        return true;
    }
};

/// Rescales an element by a rational so that every coefficient is a
/// Gaussian integer and their collective content is one. Scaling by a
/// nonzero rational never changes the span, and it keeps the adapted bases
/// built from solver output from accumulating giant numerators.
inline void normalize_element_scale(Element& x) {
    mpz_class lcm = 1, gcd = 0;
    for (const auto& s : x)
        for (const auto& c : s.coeffs()) {
            mpz_class dr = c.re().get_den(), di = c.im().get_den();
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), dr.get_mpz_t());
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), di.get_mpz_t());
        }
    for (const auto& s : x)
        for (const auto& c : s.coeffs()) {
            mpz_class nr = c.re().get_num() * (lcm / c.re().get_den());
            mpz_class ni = c.im().get_num() * (lcm / c.im().get_den());
            mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(), nr.get_mpz_t());
            mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(), ni.get_mpz_t());
        }
    if (sgn(gcd) == 0) return;
    mpq_class scale(lcm, gcd);
    scale.canonicalize();
    Scalar factor{scale};
    for (auto& s : x) {
        BSeries scaled = factor * s;
        s = scaled;
    }
}

inline Submodule make_submodule(const ABModule& ambient, std::vector<Element> gens) {
    Submodule s{ambient, std::move(gens), false};
    SmithForm f = smith_normal_form(s.generator_matrix());
    s.normal = true;
    for (int t = 0; t < f.rank; ++t)
        if (f.valuations[static_cast<size_t>(t)] != 0) s.normal = false;
    return s;
}

// ---------------------------------------------------------------------------
// monomials and exponents
// ---------------------------------------------------------------------------

/// A primitive monomial: a(vec) = type * b * vec, with raw_valuation recording
/// how many powers of b were stripped from the solver solution.
struct Monomial {
    Element vec;
    Scalar type;
    int raw_valuation = 0;
};

/// Basis of solutions of a x = lambda b x mod b^{N-1} (the defining relation
/// of a monomial of type (lambda, 0)), each normalized to be primitive; the
/// type is shifted down by the stripped b-valuation since a(b^v x) =
/// (lambda) b (b^v x) forces a x = (lambda - v) b x.
inline std::vector<Monomial> monomials_of_type(const ABModule& e, const Scalar& lambda) {
    HomBasis h = solve_hom(elementary(lambda, e.precision()), e);
    std::vector<Monomial> out;
    for (const auto& f : h.morphisms) {
        Element x(static_cast<size_t>(e.rank()), BSeries());
        for (int i = 0; i < e.rank(); ++i) x[static_cast<size_t>(i)] = f.matrix().at(i, 0);
        int v = element_valuation(x);
        if (v >= x[0].precision()) continue; // zero at precision
        Monomial m;
        m.raw_valuation = v;
        m.type = lambda - Scalar(v);
        m.vec = x;
        for (auto& s : m.vec) s = s.shifted_down(v);
        out.push_back(std::move(m));
    }
    return out;
}

// ---------------------------------------------------------------------------
// regularity and saturation
// ---------------------------------------------------------------------------

enum class Regularity { regular, not_regular, inconclusive };

/// Lattice state b^{-offset} * span(columns of basis).
struct RegularityReport {
    Regularity verdict = Regularity::inconclusive;
    int steps = 0;
    int offset = 0;              // saturation lattice is b^{-offset} * span(basis)
    BMatrix basis;               // n x n series basis of the (scaled) lattice
    std::optional<ABModule> saturation; // simple-pole presentation, reduced precision
    int saturation_precision = 0;
    std::string note;
};

namespace structdetail {

/// Reduces an n x k generator matrix to an n-column lattice basis via SNF:
/// span(G) = span(U^{-1} D) with the zero columns dropped.
inline BMatrix lattice_basis(const BMatrix& g) {
    SmithForm s = smith_normal_form(g);
    BMatrix uinv = s.u.inverse();
    int n = g.rows();
    BMatrix basis(n, s.rank, g.precision());
    for (int t = 0; t < s.rank; ++t) {
        int v = s.valuations[static_cast<size_t>(t)];
        for (int i = 0; i < n; ++i) basis.at(i, t) = uinv.at(i, t).shifted(v).truncated(g.precision());
    }
    return basis;
}

inline bool span_contains_all(const BMatrix& big, const BMatrix& candidate) {
    SmithForm s = smith_normal_form(big);
    for (int j = 0; j < candidate.cols(); ++j) {
        std::vector<BSeries> col(static_cast<size_t>(candidate.rows()));
        for (int i = 0; i < candidate.rows(); ++i) col[static_cast<size_t>(i)] = candidate.at(i, j);
        if (!snf_solve(s, col)) return false;
    }
    return true;
}

} // namespace structdetail

/// Iterates L <- L + b^{-1} a L inside E[b^{-1}] until the lattice stabilizes
/// (then E is regular and the stabilized lattice is the simple-pole
/// saturation) or the valuations keep dropping past the step cap.
inline RegularityReport is_regular(const ABModule& e, int max_steps = -1) {
    RegularityReport rep;
    int n = e.rank(), prec = e.precision();
    if (max_steps < 0) max_steps = std::max(4, n * prec);
    int v = 0;
    BMatrix w = BMatrix::identity(n, prec);

    for (int step = 1; step <= max_steps; ++step) {
        // generators of b (L + b^{-1} a L) at offset v+1:
        // [b*W | A W + b^2 W' - v b W]
        BMatrix bw = w.shifted(1).truncated(prec);
        BMatrix aw = (e.a_matrix() * w + w.derivative().shifted(2).truncated(prec) -
                      Scalar(v) * bw)
                         .truncated(prec);
        BMatrix combined(n, 2 * n, prec);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                combined.at(i, j) = bw.at(i, j);
                combined.at(i, n + j) = aw.at(i, j);
            }
        BMatrix basis = structdetail::lattice_basis(combined);
        if (basis.cols() != n) {
            rep.verdict = Regularity::inconclusive;
            rep.note = "lattice dropped rank at precision";
            rep.steps = step;
            return rep;
        }
        int v2 = v + 1;
        // strip common powers of b to normalize the offset
        int minval = prec;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) minval = std::min(minval, basis.at(i, j).valuation());
        int strip = std::min(minval, v2);
        if (strip > 0) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    basis.at(i, j) = snfdetail::zero_lift(basis.at(i, j).shifted_down(strip), prec);
            v2 -= strip;
        }
        // stabilized when the new lattice is inside the previous one
        bool stabilized = v2 == v && structdetail::span_contains_all(w, basis);
        rep.steps = step;
        if (stabilized) {
            rep.verdict = Regularity::regular;
            rep.offset = v;
            rep.basis = w;
            break;
        }
        v = v2;
        w = basis;
        rep.offset = v;
        rep.basis = w;
    }

    if (rep.verdict != Regularity::regular) {
        rep.verdict = rep.offset > 0 ? Regularity::not_regular : Regularity::inconclusive;
        if (rep.verdict == Regularity::not_regular)
            rep.note = "valuations dropped " + std::to_string(rep.offset) + " orders without stabilizing";
        return rep;
    }

    // assemble the saturated presentation W^{-1}(A W + b^2 W') - v b I
    SmithForm s = smith_normal_form(rep.basis);
    BMatrix z = (e.a_matrix() * rep.basis + rep.basis.derivative().shifted(2).truncated(prec) -
                 Scalar(rep.offset) * rep.basis.shifted(1).truncated(prec))
                    .truncated(prec);
    BMatrix y = s.u * z;
    int lost = 0;
    for (int t = 0; t < n; ++t) lost = std::max(lost, s.valuations[static_cast<size_t>(t)]);
    int sat_prec = prec - lost;
    BMatrix scaled(n, n, sat_prec);
    bool ok = true;
    for (int t = 0; t < n; ++t) {
        int kv = s.valuations[static_cast<size_t>(t)];
        for (int j = 0; j < n; ++j) {
            if (y.at(t, j).valuation() < kv) ok = false;
            if (!ok) break;
            scaled.at(t, j) = snfdetail::zero_lift(y.at(t, j).shifted_down(kv), sat_prec).truncated(sat_prec);
        }
        if (!ok) break;
    }
    if (!ok) {
        rep.note = "saturation presentation not integral at precision";
        rep.verdict = Regularity::inconclusive;
        return rep;
    }
    BMatrix sat = (s.v.truncated(sat_prec) * scaled).truncated(sat_prec);
    rep.saturation_precision = sat_prec;
    rep.saturation = ABModule(sat);
    return rep;
}

// ---------------------------------------------------------------------------
// candidate exponents
// ---------------------------------------------------------------------------

struct ExponentClass {
    Scalar class_min;               // smallest exponent with a monomial in E
    std::vector<Scalar> exponents;  // all exponents with monomials, up to the horizon
};

struct ExponentReport {
    std::vector<ExponentClass> classes;
    bool complete = true;
};

namespace structdetail {

inline bool integer_difference(const Scalar& a, const Scalar& b) { return (a - b).is_integer(); }

/// Deterministic class ordering key: representative with real part in [0,1).
inline std::pair<mpq_class, mpq_class> class_key(const Scalar& s) {
    mpq_class re = s.re();
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), re.get_num().get_mpz_t(), re.get_den().get_mpz_t());
    return {re - mpq_class(fl), s.im()};
}

} // namespace structdetail

/// All Gaussian-rational lambda with a nonzero monomial in E, grouped into
/// classes mod Z with the minimal representative marked. Candidates are the
/// eigenvalues of the saturation's residue matrix shifted by non-negative
/// integers (rank-drop points of the simple-pole monomial pencil); each
/// candidate is confirmed by an exact solve in E itself.
inline ExponentReport candidate_exponents(const ABModule& e) {
    ExponentReport rep;
    if (e.rank() == 0) return rep;
    RegularityReport reg = is_regular(e);
    if (reg.verdict != Regularity::regular || !reg.saturation)
        throw Error("candidate_exponents: module is not certified regular");
    const ABModule& sat = *reg.saturation;
    if (sat.precision() < 2) throw Error("candidate_exponents: saturation lost too much precision");

    // residue matrix of the simple-pole presentation
    int n = e.rank();
    QMatrix residue(n, n, sat.a_matrix().coeff_matrix(1));
    auto roots = qroots::rational_roots(residue.char_poly());
    if (!roots.complete) throw Error("candidate_exponents: norm factorization capped out");
    if (roots.residual_degree > 0)
        throw NonRationalExponent("residue eigenvalues are not all Gaussian rational");

    // group the roots into classes mod Z
    std::vector<std::vector<Scalar>> classes;
    for (const auto& [root, mult] : roots.roots) {
        (void)mult;
        bool placed = false;
        for (auto& cls : classes)
            if (structdetail::integer_difference(cls[0], root)) {
                cls.push_back(root);
                placed = true;
                break;
            }
        if (!placed) classes.push_back({root});
    }

    int horizon = e.precision() - 2;
    for (auto& cls : classes) {
        Scalar lo = cls[0];
        for (const auto& r : cls) lo = std::min(lo, r);
        ExponentClass out;
        bool have_min = false;
        for (int j = 0; j <= horizon; ++j) {
            Scalar lam = lo + Scalar(j);
            // any nonzero solution counts (b^v x0 is a monomial of type
            // type(x0)+v); the class minimum is attained by primitive ones
            if (!monomials_of_type(e, lam).empty()) {
                if (!have_min) {
                    out.class_min = lam;
                    have_min = true;
                }
                out.exponents.push_back(lam);
            }
        }
        if (have_min) rep.classes.push_back(std::move(out));
    }
    std::sort(rep.classes.begin(), rep.classes.end(), [](const ExponentClass& a, const ExponentClass& b) {
        auto ka = structdetail::class_key(a.class_min), kb = structdetail::class_key(b.class_min);
        if (ka.first != kb.first) return ka.first < kb.first;
        return ka.second < kb.second;
    });
    return rep;
}

/// Span of all monomials at the minimal exponent of the first class (or of a
/// chosen exponent); normal by the minimality argument, isomorphic to a sum
/// of copies of E_{lambda_min}.
inline Submodule v_lambda_min_at(const ABModule& e, const Scalar& lambda_min) {
    auto monos = monomials_of_type(e, lambda_min);
    std::vector<Element> gens;
    for (auto& m : monos)
        if (m.raw_valuation == 0 && m.type == lambda_min) gens.push_back(m.vec);
    Submodule s = make_submodule(e, std::move(gens));
    return s;
}

inline Submodule v_lambda_min(const ABModule& e) {
    ExponentReport rep = candidate_exponents(e);
    if (rep.classes.empty()) throw Error("v_lambda_min: no monomials found");
    return v_lambda_min_at(e, rep.classes[0].class_min);
}

// ---------------------------------------------------------------------------
// quotients
// ---------------------------------------------------------------------------

struct Quotient {
    ABModule module;
    ABMorphism projection;
    BMatrix adapted_basis; // columns: submodule basis first, then complement
};

/// Quotient by a normal submodule: completes the generators to a basis via
/// SNF, reads the induced action off the lower-right block.
inline Quotient quotient(const ABModule& e, const Submodule& s) {
    BMatrix g = s.generator_matrix();
    SmithForm f = smith_normal_form(g);
    int r = f.rank;
    for (int t = 0; t < r; ++t)
        if (f.valuations[static_cast<size_t>(t)] != 0)
            throw NotNormal("quotient: generator matrix has positive SNF valuations");
    int n = e.rank();
    BMatrix t_basis = f.u.inverse().truncated(e.precision());
    ABModule moved = base_change(e, t_basis);
    // a-stability of the span shows up as a vanishing lower-left block
    for (int i = r; i < n; ++i)
        for (int j = 0; j < r; ++j)
            if (!moved.a_matrix().at(i, j).is_zero())
                throw Error("quotient: submodule is not a-stable at precision");
    BMatrix qa(n - r, n - r, moved.precision());
    for (int i = r; i < n; ++i)
        for (int j = r; j < n; ++j) qa.at(i - r, j - r) = moved.a_matrix().at(i, j);
    ABModule q(qa);
    // projection: last n-r rows of T^{-1} = rows of U
    BMatrix proj(n - r, n, moved.precision());
    for (int i = r; i < n; ++i)
        for (int j = 0; j < n; ++j) proj.at(i - r, j) = f.u.at(i, j).truncated(moved.precision());
    ABMorphism p(e, q, std::move(proj));
    p.verify();
    return Quotient{std::move(q), std::move(p), std::move(t_basis)};
}

// ---------------------------------------------------------------------------
// composition series
// ---------------------------------------------------------------------------

struct CompositionSeries {
    std::vector<Scalar> exponents; // in extraction order
    bool complete = true;
    std::string note;
};

/// Iteratively extracts a primitive monomial at a class-minimal exponent,
/// quotients by its span, and recurses; the exponents of the elementary
/// quotients come out in extraction order.
inline CompositionSeries composition_series(const ABModule& e) {
    CompositionSeries out;
    ABModule cur = e;
    while (cur.rank() > 0) {
        ExponentReport rep = candidate_exponents(cur);
        if (rep.classes.empty()) {
            out.complete = false;
            out.note = "no primitive monomial found at precision";
            return out;
        }
        const Scalar& lam = rep.classes[0].class_min;
        auto monos = monomials_of_type(cur, lam);
        const Monomial* pick = nullptr;
        for (const auto& m : monos)
            if (m.raw_valuation == 0 && m.type == lam) {
                pick = &m;
                break;
            }
        if (!pick) {
            out.complete = false;
            out.note = "class minimum did not yield a primitive monomial";
            return out;
        }
        Element gen = pick->vec;
        // canonical scale: constant term of the first unit coordinate = 1
        for (const auto& c : gen)
            if (c.valuation() == 0) {
                Scalar inv = Scalar(1) / c.coeff(0);
                gen = scale_element(BSeries::constant(inv, c.precision()), gen);
                break;
            }
        Submodule span = make_submodule(cur, {gen});
        Quotient q = quotient(cur, span);
        out.exponents.push_back(lam);
        cur = q.module;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fitting splitting
// ---------------------------------------------------------------------------

struct FittingSplit {
    Submodule image;  // phi bijective here
    Submodule kernel; // phi nilpotent here
    ABModule image_module;
    ABModule kernel_module;
    BMatrix basis; // [image basis | kernel basis], a direct-sum decomposition
    int power = 0; // first m with Ker phi^m = Ker phi^{m+1}
    bool certified = false;
};

/// E = Im(phi^m) (+) Ker(phi^m) for the first m where the kernel rank
/// stabilizes; verified exact (ranks add, joint basis unimodular, both parts
/// a-stable, phi invertible on the image and nilpotent on the kernel).
inline FittingSplit fitting_split(const ABModule& e, const ABMorphism& phi) {
    if (phi.domain() != e || phi.codomain() != e || phi.matrix().rows() != e.rank())
        throw NotEndomorphism("fitting_split: phi is not an endomorphism of E");
    int n = e.rank();
    int prec = phi.matrix().precision();

    BMatrix power = phi.matrix();
    int m = 1;
    for (; m <= n + 1; ++m) {
        SmithForm scur = smith_normal_form(power);
        BMatrix next = (power * phi.matrix()).truncated(prec);
        SmithForm snext = smith_normal_form(next);
        if (scur.rank == snext.rank) break;
        power = next;
    }
    SmithForm s = smith_normal_form(power);
    int r = s.rank;

    FittingSplit out;
    out.power = m;
    out.certified = true;
    // exact splitting shows pure unit/zero valuations
    for (int t = 0; t < std::min(n, static_cast<int>(s.valuations.size())); ++t) {
        int v = s.valuations[static_cast<size_t>(t)];
        if (v != 0 && v < power.precision()) out.certified = false;
    }

    BMatrix uinv = s.u.inverse();
    std::vector<Element> img_gens, ker_gens;
    for (int t = 0; t < r; ++t) {
        Element g(static_cast<size_t>(n), BSeries());
        for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = uinv.at(i, t).truncated(prec);
        normalize_element_scale(g);
        img_gens.push_back(std::move(g));
    }
    for (int t = r; t < n; ++t) {
        Element g(static_cast<size_t>(n), BSeries());
        for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = s.v.at(i, t).truncated(prec);
        normalize_element_scale(g);
        ker_gens.push_back(std::move(g));
    }
    out.image = make_submodule(e, img_gens);
    out.kernel = make_submodule(e, ker_gens);

    BMatrix basis(n, n, prec);
    for (int t = 0; t < r; ++t)
        for (int i = 0; i < n; ++i) basis.at(i, t) = img_gens[static_cast<size_t>(t)][static_cast<size_t>(i)];
    for (int t = r; t < n; ++t)
        for (int i = 0; i < n; ++i) basis.at(i, t) = ker_gens[static_cast<size_t>(t - r)][static_cast<size_t>(i)];
    out.basis = basis;

    QMatrix b0(n, n, basis.constant_term());
    if (b0.det().is_zero()) {
        out.certified = false;
        return out;
    }

    ABModule et(e.a_matrix().truncated(prec), e.labels());
    ABModule moved = base_change(et, basis);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            bool off = (i < r) != (j < r);
            if (off && !moved.a_matrix().at(i, j).is_zero()) out.certified = false;
        }
    BMatrix ia(r, r, moved.precision()), ka(n - r, n - r, moved.precision());
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) ia.at(i, j) = moved.a_matrix().at(i, j);
    for (int i = r; i < n; ++i)
        for (int j = r; j < n; ++j) ka.at(i - r, j - r) = moved.a_matrix().at(i, j);
    out.image_module = ABModule(ia);
    out.kernel_module = ABModule(ka);

    // phi in the adapted basis: invertible block on the image, nilpotent on
    // the kernel
    BMatrix conj = (basis.inverse() * phi.matrix() * basis).truncated(prec);
    QMatrix top(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) top.at(i, j) = conj.at(i, j).coeff(0);
    if (r > 0 && top.det().is_zero()) out.certified = false;
    if (n - r > 0) {
        BMatrix bot(n - r, n - r, prec);
        for (int i = r; i < n; ++i)
            for (int j = r; j < n; ++j) bot.at(i - r, j - r) = conj.at(i, j);
        BMatrix pw = BMatrix::identity(n - r, prec);
        for (int k = 0; k < n - r; ++k) pw = (pw * bot).truncated(prec);
        if (!pw.is_zero()) out.certified = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Krull-Schmidt decomposition
// ---------------------------------------------------------------------------

struct DecompositionReport {
    std::vector<std::pair<ABModule, int>> factors; // representative, multiplicity
    std::vector<ABModule> parts;                   // pieces in witness order
    BMatrix witness; // base_change(E, witness) is the block sum of the parts
    bool certified = false;
    bool inconclusive = false;
    int effective_precision = 0;
    std::string note;
};

namespace structdetail {

/// Independent basis (as coefficient vectors over the given spanning set)
/// of the constant-term algebra span.
inline std::vector<QMatrix> independent_span(const std::vector<QMatrix>& mats) {
    if (mats.empty()) return {};
    int n = mats[0].rows();
    QMatrix stack(n * n, static_cast<int>(mats.size()));
    for (size_t k = 0; k < mats.size(); ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) stack.at(i * n + j, static_cast<int>(k)) = mats[k].at(i, j);
    std::vector<int> piv = stack.rref();
    std::vector<QMatrix> out;
    for (int c : piv) out.push_back(mats[static_cast<size_t>(c)]);
    return out;
}

/// Spectral idempotent from a splitting element: when the characteristic
/// polynomial factors as (t-mu)^m * g with g(mu) != 0 and both factors
/// proper, Bezout gives e = (v g)(x) with e^2 = e, e != 0, I.
inline std::optional<QMatrix> spectral_idempotent(const QMatrix& x) {
    auto chi = x.char_poly();
    auto roots = qroots::rational_roots(chi);
    if (!roots.complete || roots.roots.empty()) return std::nullopt;
    int n = x.rows();
    for (const auto& [mu, mult] : roots.roots) {
        if (mult >= n) continue; // g would be constant
        qpoly::Poly g1{Scalar(1)};
        qpoly::Poly lin{-mu, Scalar(1)};
        for (int k = 0; k < mult; ++k) g1 = qpoly::mul(g1, lin);
        auto [g2, rem] = qpoly::divmod(chi, g1);
        if (!qpoly::is_zero(rem)) continue;
        auto [g, u, v] = qpoly::xgcd(g1, g2);
        if (qpoly::degree(g) != 0) continue; // factors share a root over Q(i)
        // e = v*g2 evaluated at x (v from u*g1 + v*g2 = 1)
        qpoly::Poly ep = qpoly::mul(v, g2);
        QMatrix e(n, n);
        QMatrix pw = QMatrix::identity(n);
        for (size_t k = 0; k < ep.size(); ++k) {
            if (!ep[k].is_zero()) e = e + ep[k] * pw;
            pw = pw * x;
        }
        if (e.is_zero() || e == QMatrix::identity(n)) continue;
        if (!(e * e == e)) continue;
        return e;
    }
    return std::nullopt;
}

struct KSWorker {
    int trials;
    unsigned long seed;
    bool certified = true;
    bool inconclusive = false;
    std::string note;

    /// Spectral route: a candidate whose characteristic polynomial has a
    /// Q(i) root of proper multiplicity yields an idempotent, which is
    /// expressed in the End basis and lifted b-adically (cubic Newton
    /// e <- 3e^2 - 2e^3). Returns the split endomorphism, or nothing.
    std::optional<ABMorphism> idempotent_endo(const ABModule& e, const HomBasis& ends,
                                              const std::vector<QMatrix>& consts,
                                              const std::vector<QMatrix>& basis0, std::mt19937_64& rng,
                                              int combos) {
        int n = e.rank();
        std::optional<QMatrix> idem;
        std::uniform_int_distribution<int> small(-4, 4);
        std::vector<QMatrix> candidates = basis0;
        for (int t = 0; t < combos; ++t) {
            QMatrix combo(n, n);
            for (const auto& b : basis0) combo = combo + Scalar(small(rng)) * b;
            candidates.push_back(combo);
        }
        for (const auto& x : candidates) {
            idem = spectral_idempotent(x);
            if (idem) break;
        }
        if (!idem) return std::nullopt;

        // express vec(idem) in the span of the constant terms
        QMatrix aug(n * n, static_cast<int>(consts.size()) + 1);
        for (size_t k = 0; k < consts.size(); ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) aug.at(i * n + j, static_cast<int>(k)) = consts[k].at(i, j);
        for (int i = 0; i < n * n; ++i) aug.at(i, static_cast<int>(consts.size())) = idem->at(i / n, i % n);
        std::vector<int> piv = aug.rref();
        for (size_t r = 0; r < piv.size(); ++r)
            if (piv[r] == static_cast<int>(consts.size())) return std::nullopt;
        std::vector<Scalar> coeff(consts.size());
        for (size_t r = 0; r < piv.size(); ++r)
            coeff[static_cast<size_t>(piv[r])] = aug.at(static_cast<int>(r), static_cast<int>(consts.size()));

        ABMorphism ehat = Scalar(0) * ends.morphisms[0];
        for (size_t k = 0; k < coeff.size(); ++k)
            if (!coeff[k].is_zero()) ehat = ehat + coeff[k] * ends.morphisms[k];
        int iters = 2;
        for (int p = 1; p < e.precision(); p *= 2) ++iters;
        for (int it = 0; it < iters; ++it) {
            BMatrix m2 = (ehat.matrix() * ehat.matrix()).truncated(ehat.matrix().precision());
            BMatrix m3 = (m2 * ehat.matrix()).truncated(ehat.matrix().precision());
            ehat = ABMorphism(e, e, Scalar(3) * m2 - Scalar(2) * m3);
        }
        if (!(ehat.matrix() * ehat.matrix() - ehat.matrix()).is_zero()) return std::nullopt;
        return ehat;
    }

    /// Fallback for isotypic algebras, where generic elements have
    /// irrational spectra and no characteristic polynomial splits over Q(i):
    /// a singular non-nilpotent endomorphism splits the module through the
    /// Fitting lemma directly. Such elements are found exactly as kernel
    /// elements of the orbit map x -> x w for random w.
    std::optional<ABMorphism> singular_endo(const ABModule& e, const HomBasis& ends,
                                            const std::vector<QMatrix>& consts, std::mt19937_64& rng) {
        int n = e.rank();
        int d = static_cast<int>(consts.size());
        std::uniform_int_distribution<int> small(-6, 6);
        for (int attempt = 0; attempt < trials; ++attempt) {
            std::vector<Scalar> w(static_cast<size_t>(n));
            for (auto& c : w) c = Scalar(small(rng));
            // orbit matrix: column k = consts[k] * w
            QMatrix orbit(n, d);
            for (int k = 0; k < d; ++k)
                for (int i = 0; i < n; ++i) {
                    Scalar acc;
                    for (int j = 0; j < n; ++j) acc += consts[static_cast<size_t>(k)].at(i, j) * w[static_cast<size_t>(j)];
                    orbit.at(i, k) = acc;
                }
            QMatrix ker = orbit.kernel();
            if (ker.cols() == 0) continue;
            for (int draw = 0; draw < 4; ++draw) {
                std::vector<Scalar> coeff(static_cast<size_t>(d));
                for (int k = 0; k < d; ++k) {
                    Scalar c;
                    for (int kc = 0; kc < ker.cols(); ++kc) c += Scalar(small(rng)) * ker.at(k, kc);
                    coeff[static_cast<size_t>(k)] = c;
                }
                // primitive-integer rescale keeps later arithmetic small
                {
                    Element wrap(coeff.size(), BSeries());
                    for (size_t k = 0; k < coeff.size(); ++k) wrap[k] = BSeries::constant(coeff[k], 1);
                    normalize_element_scale(wrap);
                    for (size_t k = 0; k < coeff.size(); ++k) coeff[k] = wrap[k].coeff(0);
                }
                QMatrix x(n, n);
                for (int k = 0; k < d; ++k)
                    if (!coeff[static_cast<size_t>(k)].is_zero())
                        x = x + coeff[static_cast<size_t>(k)] * consts[static_cast<size_t>(k)];
                if (x.is_zero() || homdetail::is_nilpotent(x)) continue;
                ABMorphism phi = Scalar(0) * ends.morphisms[0];
                for (int k = 0; k < d; ++k)
                    if (!coeff[static_cast<size_t>(k)].is_zero())
                        phi = phi + coeff[static_cast<size_t>(k)] * ends.morphisms[static_cast<size_t>(k)];
                return phi;
            }
        }
        return std::nullopt;
    }

    /// Returns the indecomposable parts and the base change exhibiting them.
    std::pair<std::vector<ABModule>, BMatrix> split(const ABModule& e) {
        int n = e.rank();
        if (n == 0) return {{}, BMatrix(0, 0, e.precision())};
        HomBasis ends = solve_hom(e, e);
        if (!ends.stable) certified = false;

        std::vector<QMatrix> consts;
        for (const auto& m : ends.morphisms) consts.emplace_back(n, n, m.matrix().constant_term());
        std::vector<QMatrix> basis0 = independent_span(consts);

        // radical of the constant-term algebra = kernel of the trace form
        int dim = static_cast<int>(basis0.size());
        QMatrix gram(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                gram.at(i, j) = (basis0[static_cast<size_t>(i)] * basis0[static_cast<size_t>(j)]).trace();
        int rad_dim = gram.kernel().cols();
        int ss_dim = dim - rad_dim;

        if (ss_dim <= 1) {
            // local algebra: indecomposable
            return {{e}, BMatrix::identity(n, e.precision())};
        }

        std::mt19937_64 rng(seed);
        std::optional<ABMorphism> splitter = idempotent_endo(e, ends, consts, basis0, rng, 0);
        if (!splitter) splitter = singular_endo(e, ends, consts, rng);
        if (!splitter) splitter = idempotent_endo(e, ends, consts, basis0, rng, trials);
        if (!splitter) {
            inconclusive = true;
            note = "no splitting endomorphism found; returning the unsplit module";
            return {{e}, BMatrix::identity(n, e.precision())};
        }

        FittingSplit fs = fitting_split(e, *splitter);
        if (fs.image_module.rank() == 0 || fs.kernel_module.rank() == 0) {
            inconclusive = true;
            note = "splitting endomorphism produced a trivial fitting decomposition";
            return {{e}, BMatrix::identity(n, e.precision())};
        }
        if (!fs.certified) certified = false;
        auto [parts_i, wit_i] = split(fs.image_module);
        auto [parts_k, wit_k] = split(fs.kernel_module);
        // combined witness: fitting basis, then the block-diagonal refinements
        int prec2 = std::min(wit_i.precision(), wit_k.precision());
        prec2 = std::min(prec2, fs.basis.precision());
        BMatrix refine = BMatrix::block_diag(wit_i, wit_k).truncated(prec2);
        BMatrix total = (fs.basis.truncated(prec2) * refine).truncated(prec2);
        std::vector<ABModule> parts = parts_i;
        for (auto& p : parts_k) parts.push_back(p);
        return {parts, total};
    }
};

inline std::string module_sort_key(const ABModule& e) {
    std::ostringstream os;
    os << e.rank() << "|" << e.a_matrix().str();
    return os.str();
}

} // namespace structdetail

/// Decomposes a regular module into indecomposables: End(E) is computed
/// exactly, its constant-term algebra is split through the radical (trace
/// form) and a spectral idempotent, the idempotent lifts b-adically, and
/// the Fitting splitting recurses. Factors are grouped by are_isomorphic.
inline DecompositionReport krull_schmidt(const ABModule& e, int trials = 32, unsigned long seed = 1) {
    structdetail::KSWorker worker{trials, seed};
    auto [parts, witness] = worker.split(e);

    DecompositionReport rep;
    rep.certified = worker.certified && !worker.inconclusive;
    rep.inconclusive = worker.inconclusive;
    rep.note = worker.note;

    int prec = witness.precision();
    for (const auto& p : parts) prec = std::min(prec, p.precision());
    rep.effective_precision = prec;

    // deterministic part order: sort by (rank, matrix text), rebuilding the
    // witness column order accordingly
    std::vector<int> order(parts.size());
    for (size_t i = 0; i < parts.size(); ++i) order[i] = static_cast<int>(i);
    std::vector<std::string> keys;
    for (const auto& p : parts) keys.push_back(structdetail::module_sort_key(p));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return keys[static_cast<size_t>(a)] < keys[static_cast<size_t>(b)]; });

    std::vector<int> offsets(parts.size() + 1, 0);
    for (size_t i = 0; i < parts.size(); ++i)
        offsets[i + 1] = offsets[i] + parts[i].rank();
    BMatrix permuted(e.rank(), e.rank(), prec);
    int col = 0;
    std::vector<ABModule> sorted_parts;
    for (int oi : order) {
        const ABModule& p = parts[static_cast<size_t>(oi)];
        sorted_parts.push_back(ABModule(p.a_matrix().truncated(prec), p.labels()));
        for (int j = 0; j < p.rank(); ++j, ++col)
            for (int i = 0; i < e.rank(); ++i)
                permuted.at(i, col) = witness.at(i, offsets[static_cast<size_t>(oi)] + j).truncated(prec);
    }
    rep.parts = std::move(sorted_parts);
    rep.witness = std::move(permuted);

    // verify the witness exhibits the block sum
    if (e.rank() > 0) {
        ABModule et(e.a_matrix().truncated(prec), e.labels());
        ABModule moved = base_change(et, rep.witness);
        BMatrix expect(0, 0, prec);
        bool first = true;
        for (const auto& p : rep.parts) {
            expect = first ? p.a_matrix() : BMatrix::block_diag(expect, p.a_matrix());
            first = false;
        }
        if (!(moved.a_matrix() == expect)) {
            rep.certified = false;
            rep.note += (rep.note.empty() ? "" : "; ") + std::string("witness verification failed");
        }
    }

    // group isomorphic parts
    std::vector<bool> used(rep.parts.size(), false);
    for (size_t i = 0; i < rep.parts.size(); ++i) {
        if (used[i]) continue;
        int mult = 1;
        used[i] = true;
        for (size_t j = i + 1; j < rep.parts.size(); ++j) {
            if (used[j] || rep.parts[j].rank() != rep.parts[i].rank()) continue;
            IsoResult iso = are_isomorphic(rep.parts[i], rep.parts[j], trials, seed);
            if (iso.verdict == IsoVerdict::yes) {
                used[j] = true;
                ++mult;
            } else if (iso.verdict == IsoVerdict::inconclusive) {
                rep.inconclusive = true;
            }
        }
        rep.factors.emplace_back(rep.parts[i], mult);
    }
    return rep;
}

} // namespace abmod
