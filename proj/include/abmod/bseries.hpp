#pragma once

#include <algorithm>
#include <cassert>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace abmod {

/// Truncated formal power series in b over Gaussian rationals.
///
/// A value with precision N represents a coset S(b) + O(b^N): exactly N
/// coefficients are stored and every one of them is exact. Generic ring
/// operations propagate the smaller precision of their inputs; the only
/// precision-raising operation is shifted(k), which multiplies by the exact
/// monomial b^k.
class BSeries {
public:
    BSeries() : prec_(0) {}

    explicit BSeries(int precision) : c_(static_cast<size_t>(std::max(precision, 0))), prec_(std::max(precision, 0)) {}

    BSeries(std::vector<Scalar> coeffs, int precision) : c_(std::move(coeffs)), prec_(std::max(precision, 0)) {
        c_.resize(static_cast<size_t>(prec_));
    }

    static BSeries zero(int precision) { return BSeries(precision); }

    static BSeries constant(const Scalar& value, int precision) {
        BSeries s(precision);
        if (precision > 0) s.c_[0] = value;
        return s;
    }

    static BSeries one(int precision) { return constant(Scalar(1), precision); }

    /// The monomial c * b^k, truncated to the given precision.
    static BSeries monomial(const Scalar& c, int k, int precision) {
        BSeries s(precision);
        if (k >= 0 && k < precision) s.c_[static_cast<size_t>(k)] = c;
        return s;
    }

    int precision() const { return prec_; }
    const std::vector<Scalar>& coeffs() const { return c_; }

    /// Coefficient of b^k; zero beyond the stored range (reads past the
    /// precision are the caller's responsibility to avoid).
    const Scalar& coeff(int k) const {
        static const Scalar kZero;
        if (k < 0 || k >= prec_) return kZero;
        return c_[static_cast<size_t>(k)];
    }

    void set_coeff(int k, const Scalar& v) {
        if (k >= 0 && k < prec_) c_[static_cast<size_t>(k)] = v;
    }

    bool is_zero() const {
        for (const auto& x : c_)
            if (!x.is_zero()) return false;
        return true;
    }

    bool is_unit() const { return prec_ > 0 && !c_[0].is_zero(); }

    /// b-adic valuation; prec_ means "zero at this precision".
    int valuation() const {
        for (int k = 0; k < prec_; ++k)
            if (!c_[static_cast<size_t>(k)].is_zero()) return k;
        return prec_;
    }

    /// Reduces precision; asking for more than is known returns the value
    /// unchanged (never fabricates coefficients).
    BSeries truncated(int precision) const {
        precision = std::max(precision, 0);
        if (precision >= prec_) return *this;
        std::vector<Scalar> v(c_.begin(), c_.begin() + static_cast<size_t>(precision));
        return BSeries(std::move(v), precision);
    }

    BSeries operator-() const {
        BSeries r(*this);
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend BSeries operator+(const BSeries& a, const BSeries& b) {
        int p = std::min(a.prec_, b.prec_);
        BSeries r(p);
        for (int k = 0; k < p; ++k) r.c_[static_cast<size_t>(k)] = a.c_[static_cast<size_t>(k)] + b.c_[static_cast<size_t>(k)];
        return r;
    }

    friend BSeries operator-(const BSeries& a, const BSeries& b) {
        int p = std::min(a.prec_, b.prec_);
        BSeries r(p);
        for (int k = 0; k < p; ++k) r.c_[static_cast<size_t>(k)] = a.c_[static_cast<size_t>(k)] - b.c_[static_cast<size_t>(k)];
        return r;
    }

    /// Cauchy product, truncated at the smaller input precision.
    friend BSeries operator*(const BSeries& a, const BSeries& b) {
        int p = std::min(a.prec_, b.prec_);
        BSeries r(p);
        for (int k = 0; k < p; ++k) {
            Scalar s;
            for (int j = 0; j <= k; ++j) {
                const Scalar& x = a.c_[static_cast<size_t>(j)];
                if (x.is_zero()) continue;
                const Scalar& y = b.c_[static_cast<size_t>(k - j)];
                if (y.is_zero()) continue;
                s += x * y;
            }
            r.c_[static_cast<size_t>(k)] = s;
        }
        return r;
    }

    friend BSeries operator*(const Scalar& a, const BSeries& b) {
        BSeries r(b);
        for (auto& x : r.c_) x = a * x;
        return r;
    }

    /// Multiplication by the exact monomial b^k (k >= 0): precision grows by k.
    BSeries shifted(int k) const {
        assert(k >= 0);
        BSeries r(prec_ + k);
        for (int j = 0; j < prec_; ++j) r.c_[static_cast<size_t>(j + k)] = c_[static_cast<size_t>(j)];
        return r;
    }

    /// Exact division by b^k. Requires valuation >= k on the stored range;
    /// precision drops by k.
    BSeries shifted_down(int k) const {
        assert(k >= 0);
        if (k == 0) return *this;
        for (int j = 0; j < std::min(k, prec_); ++j)
            if (!c_[static_cast<size_t>(j)].is_zero()) throw Error("shifted_down: valuation too small");
        int p = std::max(prec_ - k, 0);
        BSeries r(p);
        for (int j = 0; j < p; ++j) r.c_[static_cast<size_t>(j)] = c_[static_cast<size_t>(j + k)];
        return r;
    }

    /// Formal d/db; result precision drops by one.
    BSeries derivative() const {
        int p = std::max(prec_ - 1, 0);
        BSeries r(p);
        for (int k = 0; k < p; ++k) r.c_[static_cast<size_t>(k)] = Scalar(k + 1) * c_[static_cast<size_t>(k + 1)];
        return r;
    }

    /// S(b) -> S(-b): flips the sign of every odd coefficient. An involution
    /// and a ring morphism.
    BSeries conj_b() const {
        BSeries r(*this);
        for (int k = 1; k < prec_; k += 2) r.c_[static_cast<size_t>(k)] = -r.c_[static_cast<size_t>(k)];
        return r;
    }

    /// Multiplicative inverse mod b^N. Throws NotAUnit when coeff(0) == 0.
    BSeries inverse() const {
        if (!is_unit()) throw NotAUnit();
        BSeries r(prec_);
        Scalar c0inv = Scalar(1) / c_[0];
        r.c_[0] = c0inv;
        for (int k = 1; k < prec_; ++k) {
            Scalar s;
            for (int j = 1; j <= k; ++j) {
                const Scalar& a = c_[static_cast<size_t>(j)];
                if (a.is_zero()) continue;
                s += a * r.c_[static_cast<size_t>(k - j)];
            }
            r.c_[static_cast<size_t>(k)] = -c0inv * s;
        }
        return r;
    }

    /// Coefficient-wise equality on the common range; the precision at which
    /// the comparison was meaningful comes along with the verdict.
    struct Comparison {
        bool equal;
        int precision;
    };
    static Comparison compare(const BSeries& a, const BSeries& b) {
        int p = std::min(a.prec_, b.prec_);
        for (int k = 0; k < p; ++k)
            if (a.c_[static_cast<size_t>(k)] != b.c_[static_cast<size_t>(k)]) return {false, p};
        return {true, p};
    }

    /// Equality at the smaller precision.
    friend bool operator==(const BSeries& a, const BSeries& b) { return compare(a, b).equal; }
    friend bool operator!=(const BSeries& a, const BSeries& b) { return !(a == b); }

    /// Human form: "1 + 2*b - b^3 + O(b^5)".
    std::string str() const {
        std::string out;
        for (int k = 0; k < prec_; ++k) {
            const Scalar& x = c_[static_cast<size_t>(k)];
            if (x.is_zero()) continue;
            std::string term;
            std::string xs = x.str();
            bool neg = !xs.empty() && xs[0] == '-' && xs.find('+', 1) == std::string::npos &&
                       xs.find('-', 1) == std::string::npos;
            if (out.empty()) {
                term = xs;
            } else if (neg) {
                term = " - " + xs.substr(1);
            } else {
                term = " + " + (xs.find('+') != std::string::npos || xs.find('-', 1) != std::string::npos
                                    ? "(" + xs + ")"
                                    : xs);
            }
            if (k > 0) {
                // strip a bare "1"/"-1" coefficient in front of b^k
                if (term == "1" || term == " + 1")
                    term = out.empty() ? "" : " + ";
                else if (term == " - 1")
                    term = " - ";
                else if (term == "-1")
                    term = "-";
                else
                    term += "*";
                term += "b";
                if (k > 1) term += "^" + std::to_string(k);
            }
            out += term;
        }
        if (out.empty()) out = "0";
        out += " + O(b^" + std::to_string(prec_) + ")";
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const BSeries& s) { return os << s.str(); }

private:
    std::vector<Scalar> c_;
    int prec_;
};

/// The series b at a given precision.
inline BSeries b_series(int precision) { return BSeries::monomial(Scalar(1), 1, precision); }

} // namespace abmod
