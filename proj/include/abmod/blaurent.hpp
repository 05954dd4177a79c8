#pragma once

#include <algorithm>
#include <ostream>

#include "bseries.hpp"

namespace abmod {

/// Truncated Laurent series b^v * S(b) with integer valuation offset v
/// (possibly negative) and a normalized body: body.coeff(0) != 0 unless the
/// value is zero. Used by the saturation machinery, which works inside
/// E[b^{-1}].
class BLaurent {
public:
    BLaurent() : off_(0) {}

    BLaurent(int offset, BSeries body) : off_(offset), body_(std::move(body)) { normalize(); }

    static BLaurent from_series(const BSeries& s) { return BLaurent(0, s); }

    static BLaurent zero(int precision) { return BLaurent(0, BSeries::zero(precision)); }

    int offset() const { return off_; }
    const BSeries& body() const { return body_; }
    bool is_zero() const { return body_.is_zero(); }

    /// Valuation of the value (offset of the first nonzero coefficient).
    int valuation() const { return is_zero() ? off_ + body_.precision() : off_; }

    /// Absolute precision: coefficients of b^k are known for k < this bound.
    int abs_precision() const { return off_ + body_.precision(); }

    BLaurent operator-() const { return BLaurent(off_, -body_); }

    friend BLaurent operator+(const BLaurent& a, const BLaurent& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        int off = std::min(a.off_, b.off_);
        int absp = std::min(a.abs_precision(), b.abs_precision());
        BSeries sa = a.body_.shifted(a.off_ - off).truncated(absp - off);
        BSeries sb = b.body_.shifted(b.off_ - off).truncated(absp - off);
        return BLaurent(off, sa + sb);
    }

    friend BLaurent operator-(const BLaurent& a, const BLaurent& b) { return a + (-b); }

    friend BLaurent operator*(const BLaurent& a, const BLaurent& b) {
        return BLaurent(a.off_ + b.off_, a.body_ * b.body_);
    }

    /// Multiplication by the exact monomial b^k (k may be negative).
    BLaurent shifted(int k) const { return BLaurent(off_ + k, body_); }

    /// Formal d/db of b^v*S(b) = v*b^{v-1}*S + b^v*S'.
    BLaurent derivative() const {
        if (is_zero()) return BLaurent(off_ - 1, BSeries::zero(body_.precision()));
        BSeries term = Scalar(off_) * body_.truncated(body_.precision() - 1) + body_.derivative();
        return BLaurent(off_ - 1, term);
    }

    BLaurent inverse() const {
        if (is_zero()) throw NotAUnit("cannot invert the zero Laurent series");
        return BLaurent(-off_, body_.inverse());
    }

    friend bool operator==(const BLaurent& a, const BLaurent& b) {
        if (a.is_zero() && b.is_zero()) return true;
        if (a.is_zero() != b.is_zero()) {
            // compare the nonzero side against zero on the common window
            const BLaurent& nz = a.is_zero() ? b : a;
            return nz.body_.is_zero();
        }
        if (a.off_ != b.off_) return false;
        return a.body_ == b.body_;
    }
    friend bool operator!=(const BLaurent& a, const BLaurent& b) { return !(a == b); }

    std::string str() const {
        if (off_ == 0) return body_.str();
        return "b^(" + std::to_string(off_) + ")*(" + body_.str() + ")";
    }

    friend std::ostream& operator<<(std::ostream& os, const BLaurent& s) { return os << s.str(); }

private:
    void normalize() {
        int v = body_.valuation();
        if (v == 0) return;
        if (v >= body_.precision()) return; // zero at precision; keep as is
        body_ = body_.shifted_down(v);
        off_ += v;
    }

    int off_;
    BSeries body_;
};

} // namespace abmod
