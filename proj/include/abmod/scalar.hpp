#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "errors.hpp"

namespace abmod {

/// Exact Gaussian rational a + b*i with arbitrary-precision rational parts.
/// Values are always stored canonically reduced (mpq_class keeps them so),
/// hence equality is structural and all field axioms hold exactly.
class Scalar {
public:
    Scalar() : re_(0), im_(0) {}
    Scalar(long n) : re_(n), im_(0) {}
    Scalar(long num, long den) : re_(mpq_class(num, den)), im_(0) { re_.canonicalize(); }
    explicit Scalar(mpq_class re) : re_(std::move(re)), im_(0) {}
    Scalar(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {}

    static Scalar i() { return Scalar(mpq_class(0), mpq_class(1)); }
    static Scalar make(long renum, long reden, long imnum, long imden) {
        mpq_class r(renum, reden), i(imnum, imden);
        r.canonicalize();
        i.canonicalize();
        return Scalar(r, i);
    }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

    /// True when the value lies in Z (real with denominator 1).
    bool is_integer() const { return is_real() && re_.get_den() == 1; }

    /// Integer value if is_integer() and it fits in a long.
    std::optional<long> as_long() const {
        if (!is_integer() || !re_.get_num().fits_slong_p()) return std::nullopt;
        return re_.get_num().get_si();
    }

    Scalar operator-() const { return Scalar(-re_, -im_); }

    Scalar& operator+=(const Scalar& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    Scalar& operator-=(const Scalar& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    Scalar& operator*=(const Scalar& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    Scalar& operator/=(const Scalar& o) {
        if (o.is_zero()) throw Error("division of Scalar by zero");
        mpq_class n = o.re_ * o.re_ + o.im_ * o.im_;
        mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
        mpq_class i = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    /// Lexicographic (re, im) order; used only to make outputs deterministic.
    friend bool operator<(const Scalar& a, const Scalar& b) {
        int c = cmp(a.re_, b.re_);
        if (c != 0) return c < 0;
        return cmp(a.im_, b.im_) < 0;
    }

    Scalar conj() const { return Scalar(re_, -im_); }

    /// |a+bi|^2 = a^2 + b^2, an exact rational.
    mpq_class norm() const { return re_ * re_ + im_ * im_; }

    /// Text form: "0", "5", "-2/3", "i", "-i", "3*i", "1/2+3/4*i", "1/2-3/4*i".
    std::string str() const {
        if (is_zero()) return "0";
        std::string out;
        if (sgn(re_) != 0) out += re_.get_str();
        if (sgn(im_) != 0) {
            if (!out.empty() && sgn(im_) > 0) out += "+";
            if (im_ == 1)
                out += "i";
            else if (im_ == -1)
                out += "-i";
            else
                out += im_.get_str() + "*i";
        }
        return out;
    }

    /// Parses the text form above (integers, fractions, optional imaginary part).
    /// Returns nullopt on malformed input.
    static std::optional<Scalar> parse(const std::string& s);

    friend std::ostream& operator<<(std::ostream& os, const Scalar& x) { return os << x.str(); }

private:
    mpq_class re_;
    mpq_class im_;
};

namespace detail {

// One signed rational token: [+|-] digits [/ digits]. Advances pos past it.
inline std::optional<mpq_class> parse_rat(const std::string& s, size_t& pos) {
    size_t p = pos;
    std::string tok;
    if (p < s.size() && (s[p] == '+' || s[p] == '-')) {
        if (s[p] == '-') tok += '-';
        ++p;
    }
    size_t digits = 0;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) tok += s[p++], ++digits;
    if (digits == 0) return std::nullopt;
    if (p < s.size() && s[p] == '/') {
        tok += s[p++];
        size_t den = 0;
        while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) tok += s[p++], ++den;
        if (den == 0) return std::nullopt;
    }
    mpq_class q;
    if (q.set_str(tok, 10) != 0) return std::nullopt;
    if (sgn(q.get_den()) == 0) return std::nullopt;
    q.canonicalize();
    pos = p;
    return q;
}

} // namespace detail

inline std::optional<Scalar> Scalar::parse(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) return std::nullopt;

    size_t pos = 0;
    mpq_class re(0), im(0);

    auto read_part = [&](bool first) -> bool {
        // Each part is either a rational, "rat*i", or a bare (signed) "i".
        size_t save = pos;
        int sign = 1;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            if (s[pos] == '-') sign = -1;
            if (!first && pos == save) {} // sign consumed below by parse_rat or bare i
        }
        // bare i with optional sign
        size_t p = pos;
        int bare_sign = 1;
        if (p < s.size() && (s[p] == '+' || s[p] == '-')) {
            bare_sign = (s[p] == '-') ? -1 : 1;
            ++p;
        }
        if (p < s.size() && s[p] == 'i' && p + 1 == s.size()) {
            im += bare_sign;
            pos = p + 1;
            return true;
        }
        auto q = detail::parse_rat(s, pos);
        if (!q) return false;
        if (pos < s.size() && (s[pos] == '*' || s[pos] == 'i')) {
            if (s[pos] == '*') {
                ++pos;
                if (pos >= s.size() || s[pos] != 'i') return false;
            }
            ++pos; // consume 'i'
            im += *q;
        } else {
            re += *q;
        }
        (void)sign;
        return true;
    };

    if (!read_part(true)) return std::nullopt;
    if (pos < s.size()) {
        if (s[pos] != '+' && s[pos] != '-') return std::nullopt;
        if (!read_part(false)) return std::nullopt;
    }
    if (pos != s.size()) return std::nullopt;
    return Scalar(re, im);
}

} // namespace abmod
