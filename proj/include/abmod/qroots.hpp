#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <vector>

#include "qpoly.hpp"

namespace abmod {

/// Exact root extraction over Q(i): integer roots for resonance bounds and
/// full Gaussian-rational roots for exponent pencils and splitting elements.
/// Everything is certified by the rational root theorem over Z[i]; the only
/// escape hatch is integer factorization, which reports `complete = false`
/// when the trial-division cap is exceeded (never hit by sane inputs).
namespace qroots {

struct GaussInt {
    mpz_class re, im;

    GaussInt() : re(0), im(0) {}
    GaussInt(mpz_class r, mpz_class i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    mpz_class norm() const { return re * re + im * im; }
    GaussInt conj() const { return {re, -im}; }

    friend GaussInt operator*(const GaussInt& a, const GaussInt& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussInt operator-(const GaussInt& a, const GaussInt& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend bool operator==(const GaussInt& a, const GaussInt& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator<(const GaussInt& a, const GaussInt& b) {
        int c = cmp(a.re, b.re);
        if (c != 0) return c < 0;
        return cmp(a.im, b.im) < 0;
    }
};

/// Exact quotient a/b in Z[i] when b divides a; nullopt otherwise.
inline std::optional<GaussInt> exact_div(const GaussInt& a, const GaussInt& b) {
    mpz_class n = b.norm();
    if (sgn(n) == 0) return std::nullopt;
    GaussInt t = a * b.conj();
    if (!mpz_divisible_p(t.re.get_mpz_t(), n.get_mpz_t())) return std::nullopt;
    if (!mpz_divisible_p(t.im.get_mpz_t(), n.get_mpz_t())) return std::nullopt;
    return GaussInt{t.re / n, t.im / n};
}

/// Euclidean gcd in Z[i] (rounded division, norms strictly decrease).
inline GaussInt gauss_gcd(GaussInt a, GaussInt b) {
    auto round_div = [](const GaussInt& x, const GaussInt& y) {
        mpz_class n = y.norm();
        GaussInt t = x * y.conj();
        auto rnd = [&](const mpz_class& v) {
            mpz_class q, r;
            mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
            if (2 * r >= n) q += 1;
            return q;
        };
        return GaussInt{rnd(t.re), rnd(t.im)};
    };
    while (!b.is_zero()) {
        GaussInt q = round_div(a, b);
        GaussInt r = a - q * b;
        a = b;
        b = r;
    }
    return a;
}

/// Trial division up to the cap, then a Miller-Rabin test on the cofactor;
/// `complete` is false only when a composite (or unproven) cofactor remains.
inline std::pair<std::map<mpz_class, int>, bool> factor_int(mpz_class n, unsigned long cap = 100000UL) {
    std::map<mpz_class, int> f;
    if (sgn(n) < 0) n = -n;
    if (n <= 1) return {f, true};
    for (mpz_class p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (p.fits_ulong_p() && p.get_ui() > cap) break;
        while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
            ++f[p];
            n /= p;
        }
    }
    if (n > 1) {
        int verdict = mpz_probab_prime_p(n.get_mpz_t(), 40);
        if (verdict == 0) return {f, false}; // composite cofactor beyond the cap
        ++f[n];
    }
    return {f, true};
}

/// Gaussian primes above a rational prime p, as (prime, exponent-per-norm).
/// For p = 2: (1+i) with N = 2. For p = 3 mod 4: p itself with N = p^2.
/// For p = 1 mod 4: pi and conj(pi) with N = p.
inline std::vector<GaussInt> gauss_primes_above(const mpz_class& p) {
    if (p == 2) return {GaussInt{1, 1}};
    if (mpz_class(p % 4) == 3) return {GaussInt{p, 0}};
    // find s with s^2 = -1 mod p
    mpz_class e = (p - 1) / 4;
    for (mpz_class a = 2; a < p; ++a) {
        mpz_class s;
        mpz_powm(s.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        mpz_class s2 = (s * s) % p;
        if (s2 == p - 1) {
            GaussInt pi = gauss_gcd(GaussInt{p, 0}, GaussInt{s, 1});
            return {pi, pi.conj()};
        }
    }
    return {GaussInt{p, 0}}; // unreachable for prime p = 1 mod 4
}

/// All divisors of z in Z[i] up to units, each multiplied by all four units.
/// `complete` is false when the norm could not be fully factored.
inline std::pair<std::vector<GaussInt>, bool> gauss_divisors(const GaussInt& z) {
    std::vector<GaussInt> divs{GaussInt{1, 0}};
    if (z.is_zero()) return {divs, true};
    auto [nf, complete] = factor_int(z.norm());
    // factor z itself over the Gaussian primes above each rational prime
    std::vector<std::pair<GaussInt, int>> gfact;
    GaussInt rem = z;
    for (const auto& [p, e] : nf) {
        (void)e;
        for (const GaussInt& pi : gauss_primes_above(p)) {
            int mult = 0;
            while (true) {
                auto q = exact_div(rem, pi);
                if (!q) break;
                rem = *q;
                ++mult;
            }
            if (mult > 0) gfact.emplace_back(pi, mult);
        }
    }
    double projected = 1.0;
    for (const auto& [pi, mult] : gfact) projected *= mult + 1;
    if (projected > 100000.0) return {divs, false}; // divisor lattice too large

    for (const auto& [pi, mult] : gfact) {
        std::vector<GaussInt> next;
        GaussInt pw{1, 0};
        for (int k = 0; k <= mult; ++k) {
            for (const auto& d : divs) next.push_back(d * pw);
            pw = pw * pi;
        }
        divs = std::move(next);
    }
    std::vector<GaussInt> all;
    for (const auto& d : divs)
        for (const GaussInt& u : {GaussInt{1, 0}, GaussInt{-1, 0}, GaussInt{0, 1}, GaussInt{0, -1}})
            all.push_back(d * u);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end(), [](const GaussInt& a, const GaussInt& b) { return a == b; }),
              all.end());
    return {all, complete};
}

struct RootReport {
    std::vector<std::pair<Scalar, int>> roots; // (root, multiplicity)
    bool complete = true;   // factorization succeeded; root list is certified
    int residual_degree = 0; // degree left after removing all Q(i)-linear factors
};

/// All Gaussian-rational roots of p with multiplicities. When complete,
/// residual_degree > 0 certifies that the remaining factor has no Q(i) root.
inline RootReport rational_roots(const qpoly::Poly& input) {
    RootReport rep;
    qpoly::Poly p(input);
    qpoly::trim(p);
    if (qpoly::degree(p) <= 0) return rep;

    // clear rational denominators -> Z[i] coefficients
    mpz_class lcm = 1;
    for (const auto& c : p) {
        mpz_class dr = c.re().get_den(), di = c.im().get_den();
        mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), dr.get_mpz_t());
        mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), di.get_mpz_t());
    }
    std::vector<GaussInt> zi;
    for (const auto& c : p) {
        mpq_class r = c.re() * lcm, i = c.im() * lcm;
        zi.emplace_back(r.get_num(), i.get_num());
    }

    // strip x^v
    int v = 0;
    while (v < static_cast<int>(zi.size()) && zi[static_cast<size_t>(v)].is_zero()) ++v;
    if (v > 0) {
        rep.roots.emplace_back(Scalar(0), v);
        zi.erase(zi.begin(), zi.begin() + v);
    }
    int d = static_cast<int>(zi.size()) - 1;
    if (d <= 0) return rep;

    // divide out the Z[i]-content; roots are unchanged
    GaussInt content = zi[0];
    for (size_t k = 1; k < zi.size() && !(content.norm() == 1); ++k) content = gauss_gcd(content, zi[k]);
    if (!(content.norm() == 1))
        for (auto& c : zi) c = *exact_div(c, content);

    qpoly::Poly prim(zi.size());
    for (size_t k = 0; k < zi.size(); ++k)
        prim[k] = Scalar(mpq_class(zi[k].re), mpq_class(zi[k].im));

    // rational root theorem over Z[i]: roots p/q with p | c_0 and q | c_d
    auto [num_divs, c0_complete] = gauss_divisors(zi[0]);
    auto [den_divs, cd_complete] = gauss_divisors(zi.back());
    rep.complete = c0_complete && cd_complete;
    if (static_cast<double>(num_divs.size()) * static_cast<double>(den_divs.size()) > 400000.0) {
        rep.complete = false; // candidate set too large to sweep; report honestly
        return rep;
    }

    std::vector<Scalar> candidates;
    for (const auto& p : num_divs)
        for (const auto& q : den_divs) {
            if (q.is_zero()) continue;
            candidates.push_back(Scalar(mpq_class(p.re), mpq_class(p.im)) /
                                 Scalar(mpq_class(q.re), mpq_class(q.im)));
        }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    qpoly::Poly work = prim;
    for (const auto& cand : candidates) {
        if (!qpoly::eval(prim, cand).is_zero()) continue;
        int mult = 0;
        qpoly::Poly lin{-cand, Scalar(1)};
        while (true) {
            auto [q, r] = qpoly::divmod(work, lin);
            if (!qpoly::is_zero(r)) break;
            work = q;
            ++mult;
        }
        if (mult > 0) rep.roots.emplace_back(cand, mult);
    }
    rep.residual_degree = qpoly::degree(work);
    if (rep.residual_degree < 0) rep.residual_degree = 0;
    std::sort(rep.roots.begin(), rep.roots.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return rep;
}

/// Non-negative integer roots of p; complete unless factorization capped out.
inline std::pair<std::vector<long>, bool> nonneg_integer_roots(const qpoly::Poly& p) {
    RootReport rep = rational_roots(p);
    std::vector<long> out;
    for (const auto& [r, m] : rep.roots) {
        (void)m;
        auto k = r.as_long();
        if (k && *k >= 0) out.push_back(*k);
    }
    std::sort(out.begin(), out.end());
    return {out, rep.complete};
}

} // namespace qroots

} // namespace abmod
