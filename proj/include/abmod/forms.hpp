#pragma once

#include "structure.hpp"

namespace abmod {

/// A sesquilinear form on E: an (a,b)-bilinear pairing E x (conjugate E) ->
/// E_0 stored through its matrix P_ij(b) = value on (e_i, ě_j), as a series
/// coefficient of e_0. Compatibility with the a-structures is the closed-form
/// identity b^2 P' = A(b)^T P - P A(-b), equivalent (by transposition) to
/// P^T being a morphism matrix E -> adjoint(E).
struct SesquilinearForm {
    ABModule module;
    BMatrix pairing;

    int check_precision() const {
        return std::min(pairing.precision(), module.precision()) - 1;
    }

    BMatrix compatibility_residual() const {
        const BMatrix& a = module.a_matrix();
        BMatrix lhs = pairing.derivative().shifted(2);
        BMatrix rhs = a.transpose() * pairing - pairing * a.conj_b();
        return (lhs - rhs).truncated(check_precision());
    }

    bool is_compatible() const { return compatibility_residual().is_zero(); }
};

/// Pairing value Phi(x, y) as the coefficient series of e_0; x in E
/// coordinates, y in conjugate-module coordinates.
inline BSeries form_evaluate(const SesquilinearForm& h, const Element& x, const Element& y) {
    std::vector<BSeries> py = h.pairing.apply(y);
    BSeries out = BSeries::zero(h.pairing.precision());
    for (size_t i = 0; i < x.size(); ++i) out = out + x[i] * py[i];
    return out;
}

/// The morphism E -> adjoint(E) attached to a compatible form; the dual-basis
/// identification transposes the pairing matrix.
inline ABMorphism curry(const SesquilinearForm& h) {
    if (!h.is_compatible()) throw NotCompatible();
    ABMorphism f(h.module, adjoint(h.module), h.pairing.transpose());
    if (!f.verify()) throw NotCompatible("curried form fails the intertwining equation");
    return f;
}

/// Inverse of curry: reads the pairing off a morphism into the adjoint.
inline SesquilinearForm uncurry(const ABMorphism& f) {
    if (!(f.codomain() == adjoint(f.domain())))
        throw WrongCodomain("uncurry: codomain is not the adjoint of the domain");
    SesquilinearForm h{f.domain(), f.matrix().transpose()};
    return h;
}

inline bool is_nondegenerate(const SesquilinearForm& h) {
    QMatrix p0(h.pairing.rows(), h.pairing.cols(), h.pairing.constant_term());
    return !p0.det().is_zero();
}

enum class HermitianType { hermitian, antihermitian, neither };

inline const char* to_string(HermitianType t) {
    switch (t) {
        case HermitianType::hermitian: return "hermitian";
        case HermitianType::antihermitian: return "antihermitian";
        default: return "neither";
    }
}

/// hermitian iff P(b) = P(-b)^T, antihermitian iff P(b) = -P(-b)^T. The
/// convention is pinned by two anchors: the generator pairing on E_0 is
/// hermitian and the rank-4 antidiagonal isomorphism is antihermitian.
inline HermitianType hermitian_type(const SesquilinearForm& h) {
    BMatrix sigma = h.pairing.conj_b().transpose();
    if (h.pairing == sigma) return HermitianType::hermitian;
    if (h.pairing == (-sigma)) return HermitianType::antihermitian;
    return HermitianType::neither;
}

// ---------------------------------------------------------------------------
// existence of hermitian / anti-hermitian forms
// ---------------------------------------------------------------------------

enum class FormKind { hermitian, antihermitian, both, neither };

inline const char* to_string(FormKind k) {
    switch (k) {
        case FormKind::hermitian: return "hermitian";
        case FormKind::antihermitian: return "antihermitian";
        case FormKind::both: return "both";
        default: return "neither";
    }
}

struct FormVerdict {
    FormKind kind = FormKind::neither;
    std::optional<SesquilinearForm> hermitian_witness;
    std::optional<SesquilinearForm> antihermitian_witness;
    int space_dim = 0;       // dimension of the compatible pairing space
    bool certain = true;     // false when a randomized emptiness answer was used
};

namespace formdetail {

/// Basis of the compatible-pairing space: transposes of Hom(E, adjoint E).
inline std::vector<BMatrix> pairing_space(const ABModule& e) {
    HomBasis h = solve_hom(e, adjoint(e));
    std::vector<BMatrix> out;
    for (const auto& m : h.morphisms) out.push_back(m.matrix().transpose());
    return out;
}

/// Splits a list of pairings into independent bases of the (+1)- and
/// (-1)-eigenspaces of P -> P(-b)^T.
inline std::pair<std::vector<BMatrix>, std::vector<BMatrix>> eigen_split(const std::vector<BMatrix>& ps) {
    std::vector<BMatrix> plus, minus;
    for (const auto& p : ps) {
        BMatrix sp = p.conj_b().transpose();
        BMatrix half = Scalar(1, 2) * (p + sp);
        BMatrix anti = Scalar(1, 2) * (p - sp);
        if (!half.is_zero()) plus.push_back(half);
        if (!anti.is_zero()) minus.push_back(anti);
    }
    // prune to linearly independent sets over the scalar field (coefficients
    // of all orders stacked)
    auto prune = [](std::vector<BMatrix>& v) {
        if (v.empty()) return;
        int rows = v[0].rows() * v[0].cols() * v[0].precision();
        QMatrix stack(rows, static_cast<int>(v.size()));
        for (size_t k = 0; k < v.size(); ++k) {
            int r = 0;
            for (int q = 0; q < v[k].precision(); ++q) {
                auto cm = v[k].coeff_matrix(q);
                for (const auto& c : cm) stack.at(r++, static_cast<int>(k)) = c;
            }
        }
        std::vector<int> piv = stack.rref();
        std::vector<BMatrix> keep;
        for (int c : piv) keep.push_back(v[static_cast<size_t>(c)]);
        v = std::move(keep);
    };
    prune(plus);
    prune(minus);
    return {plus, minus};
}

/// Nondegenerate combination within a subspace of pairings, or certainty of
/// its absence (see homsolver's search).
inline std::pair<std::optional<SesquilinearForm>, bool> find_witness(const ABModule& e,
                                                                     const std::vector<BMatrix>& space,
                                                                     int trials, unsigned long seed) {
    if (space.empty()) return {std::nullopt, true};
    std::vector<QMatrix> consts;
    for (const auto& p : space) consts.emplace_back(p.rows(), p.cols(), p.constant_term());
    auto search = homdetail::find_nondegenerate(consts, trials, seed);
    if (!search.combo) return {std::nullopt, search.certain};
    BMatrix combo = (*search.combo)[0] * space[0];
    for (size_t i = 1; i < space.size(); ++i) combo = combo + (*search.combo)[i] * space[i];
    return {SesquilinearForm{e, combo}, true};
}

} // namespace formdetail

/// Decides which of hermitian / anti-hermitian nondegenerate forms E admits,
/// by splitting the compatible-pairing space into symmetric and antisymmetric
/// eigenspaces of P -> P(-b)^T and searching each for a nondegenerate
/// element. Throws NotSelfAdjoint when no nondegenerate pairing exists at
/// all.
inline FormVerdict hermitianize(const ABModule& e, int trials = 32, unsigned long seed = 1) {
    std::vector<BMatrix> space = formdetail::pairing_space(e);
    FormVerdict v;
    v.space_dim = static_cast<int>(space.size());
    auto [full_witness, full_certain] = formdetail::find_witness(e, space, trials, seed);
    if (!full_witness) {
        if (full_certain) throw NotSelfAdjoint();
        v.certain = false;
        return v;
    }

    auto [plus, minus] = formdetail::eigen_split(space);
    auto [hw, hc] = formdetail::find_witness(e, plus, trials, seed);
    auto [aw, ac] = formdetail::find_witness(e, minus, trials, seed + 1);
    v.certain = hc && ac;
    if (hw) {
        if (hermitian_type(*hw) != HermitianType::hermitian)
            throw Error("hermitianize: symmetric witness failed the parity check");
        v.hermitian_witness = hw;
    }
    if (aw) {
        if (hermitian_type(*aw) != HermitianType::antihermitian)
            throw Error("hermitianize: antisymmetric witness failed the parity check");
        v.antihermitian_witness = aw;
    }
    if (hw && aw)
        v.kind = FormKind::both;
    else if (hw)
        v.kind = FormKind::hermitian;
    else if (aw)
        v.kind = FormKind::antihermitian;
    else
        v.kind = FormKind::neither;
    return v;
}

/// The swap pairing on G (+) adjoint(G): (x, y) -> (y, x), a nondegenerate
/// hermitian form.
inline SesquilinearForm hyperbolic_form(const ABModule& g) {
    ABModule s = direct_sum(g, adjoint(g));
    int n = g.rank(), prec = s.precision();
    BMatrix swap(2 * n, 2 * n, prec);
    for (int i = 0; i < n; ++i) {
        swap.at(i, n + i) = BSeries::one(prec);
        swap.at(n + i, i) = BSeries::one(prec);
    }
    // the swap morphism (x,y) -> (y,x) into adjoint(G (+) adjoint G) =
    // adjoint(G) (+) G; pairing = transpose of that matrix (symmetric here)
    SesquilinearForm h{s, swap};
    if (!h.is_compatible()) throw Error("hyperbolic_form: compatibility failed");
    if (!is_nondegenerate(h)) throw Error("hyperbolic_form: degenerate swap pairing");
    if (hermitian_type(h) != HermitianType::hermitian)
        throw Error("hyperbolic_form: swap pairing is not hermitian");
    return h;
}

// ---------------------------------------------------------------------------
// classification of self-adjoint modules
// ---------------------------------------------------------------------------

struct SelfAdjointFactor {
    ABModule module;
    int multiplicity = 0;
    FormVerdict verdict; // hermitianize on the factor
};

struct PairedFactor {
    ABModule module;
    ABModule adjoint_partner;
    int multiplicity = 0;
};

struct ClassificationReport {
    std::vector<SelfAdjointFactor> self_adjoint;
    std::vector<PairedFactor> paired;
    bool multiplicities_consistent = true;
    bool certified = false;
    bool inconclusive = false;
    std::string note;
};

/// Krull-Schmidt first, then matches every factor class against the adjoints
/// of all classes: self-adjoint factors F_i with multiplicities, non
/// self-adjoint ones paired (G_i, adjoint G_i) with equal multiplicities.
inline ClassificationReport classify_self_adjoint(const ABModule& e, int trials = 32,
                                                  unsigned long seed = 1) {
    DecompositionReport dec = krull_schmidt(e, trials, seed);
    ClassificationReport rep;
    rep.certified = dec.certified;
    rep.inconclusive = dec.inconclusive;
    rep.note = dec.note;

    int nf = static_cast<int>(dec.factors.size());
    std::vector<bool> used(static_cast<size_t>(nf), false);
    for (int i = 0; i < nf; ++i) {
        if (used[static_cast<size_t>(i)]) continue;
        const ABModule& fi = dec.factors[static_cast<size_t>(i)].first;
        int mi = dec.factors[static_cast<size_t>(i)].second;
        ABModule fad(adjoint(fi).a_matrix().truncated(fi.precision()));
        IsoResult self = are_isomorphic(fi, fad, trials, seed);
        if (self.verdict == IsoVerdict::yes) {
            used[static_cast<size_t>(i)] = true;
            SelfAdjointFactor f{fi, mi, FormVerdict{}};
            try {
                f.verdict = hermitianize(fi, trials, seed);
            } catch (const NotSelfAdjoint&) {
                rep.note += (rep.note.empty() ? "" : "; ") +
                            std::string("factor declared self-adjoint but no nondegenerate form found");
                rep.certified = false;
            }
            rep.self_adjoint.push_back(std::move(f));
            continue;
        }
        if (self.verdict == IsoVerdict::inconclusive) rep.inconclusive = true;
        // find the adjoint partner among the remaining classes
        bool paired = false;
        for (int j = i + 1; j < nf && !paired; ++j) {
            if (used[static_cast<size_t>(j)]) continue;
            const ABModule& fj = dec.factors[static_cast<size_t>(j)].first;
            if (fj.rank() != fi.rank()) continue;
            ABModule fjt(fj.a_matrix().truncated(fad.precision()));
            ABModule fadt(fad.a_matrix().truncated(fjt.precision()));
            IsoResult iso = are_isomorphic(fjt, fadt, trials, seed);
            if (iso.verdict == IsoVerdict::yes) {
                used[static_cast<size_t>(i)] = used[static_cast<size_t>(j)] = true;
                PairedFactor p{fi, fj, mi};
                if (dec.factors[static_cast<size_t>(j)].second != mi) {
                    rep.multiplicities_consistent = false;
                    rep.certified = false;
                }
                rep.paired.push_back(std::move(p));
                paired = true;
            } else if (iso.verdict == IsoVerdict::inconclusive) {
                rep.inconclusive = true;
            }
        }
        if (!paired) {
            used[static_cast<size_t>(i)] = true;
            rep.multiplicities_consistent = false;
            rep.note += (rep.note.empty() ? "" : "; ") +
                        std::string("factor with no adjoint partner: module is not self-adjoint");
        }
    }
    return rep;
}

} // namespace abmod
