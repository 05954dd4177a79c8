#pragma once

#include <cassert>
#include <string>
#include <vector>

#include "bseries.hpp"

namespace abmod {

/// Dense matrix of truncated series, row-major, all entries at one precision.
class BMatrix {
public:
    BMatrix() : rows_(0), cols_(0), prec_(0) {}

    BMatrix(int rows, int cols, int precision)
        : rows_(rows), cols_(cols), prec_(precision),
          e_(static_cast<size_t>(rows) * static_cast<size_t>(cols), BSeries::zero(precision)) {}

    static BMatrix identity(int n, int precision) {
        BMatrix m(n, n, precision);
        for (int i = 0; i < n; ++i) m.at(i, i) = BSeries::one(precision);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int precision() const { return prec_; }

    BSeries& at(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return e_[static_cast<size_t>(i) * cols_ + j];
    }
    const BSeries& at(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return e_[static_cast<size_t>(i) * cols_ + j];
    }

    /// Re-truncate every entry to one precision (never extends).
    BMatrix truncated(int precision) const {
        precision = std::min(precision, prec_);
        BMatrix m(rows_, cols_, precision);
        for (size_t k = 0; k < e_.size(); ++k) m.e_[k] = e_[k].truncated(precision);
        return m;
    }

    void set(int i, int j, const BSeries& s) { at(i, j) = s.truncated(prec_); }

    bool is_zero() const {
        for (const auto& s : e_)
            if (!s.is_zero()) return false;
        return true;
    }

    BMatrix operator-() const {
        BMatrix m(*this);
        for (auto& s : m.e_) s = -s;
        return m;
    }

    friend BMatrix operator+(const BMatrix& a, const BMatrix& b) {
        assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
        BMatrix m(a.rows_, a.cols_, std::min(a.prec_, b.prec_));
        for (size_t k = 0; k < m.e_.size(); ++k) m.e_[k] = (a.e_[k] + b.e_[k]).truncated(m.prec_);
        return m;
    }

    friend BMatrix operator-(const BMatrix& a, const BMatrix& b) { return a + (-b); }

    friend BMatrix operator*(const BMatrix& a, const BMatrix& b) {
        assert(a.cols_ == b.rows_);
        BMatrix m(a.rows_, b.cols_, std::min(a.prec_, b.prec_));
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < b.cols_; ++j) {
                BSeries s = BSeries::zero(m.prec_);
                for (int k = 0; k < a.cols_; ++k) {
                    if (a.at(i, k).is_zero() || b.at(k, j).is_zero()) continue;
                    s = s + a.at(i, k) * b.at(k, j);
                }
                m.at(i, j) = s;
            }
        return m;
    }

    friend BMatrix operator*(const BSeries& c, const BMatrix& a) {
        BMatrix m(a.rows_, a.cols_, std::min(c.precision(), a.prec_));
        for (size_t k = 0; k < m.e_.size(); ++k) m.e_[k] = (c * a.e_[k]).truncated(m.prec_);
        return m;
    }

    friend BMatrix operator*(const Scalar& c, const BMatrix& a) {
        BMatrix m(a);
        for (auto& s : m.e_) s = c * s;
        return m;
    }

    std::vector<BSeries> apply(const std::vector<BSeries>& v) const {
        assert(static_cast<int>(v.size()) == cols_);
        int p = prec_;
        for (const auto& s : v) p = std::min(p, s.precision());
        std::vector<BSeries> out(static_cast<size_t>(rows_), BSeries::zero(p));
        for (int i = 0; i < rows_; ++i) {
            BSeries s = BSeries::zero(p);
            for (int j = 0; j < cols_; ++j) {
                if (at(i, j).is_zero() || v[static_cast<size_t>(j)].is_zero()) continue;
                s = s + at(i, j) * v[static_cast<size_t>(j)];
            }
            out[static_cast<size_t>(i)] = s;
        }
        return out;
    }

    BMatrix transpose() const {
        BMatrix m(cols_, rows_, prec_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
        return m;
    }

    /// Entrywise S(b) -> S(-b).
    BMatrix conj_b() const {
        BMatrix m(*this);
        for (auto& s : m.e_) s = s.conj_b();
        return m;
    }

    /// Entrywise formal derivative; precision drops by one.
    BMatrix derivative() const {
        BMatrix m(rows_, cols_, std::max(prec_ - 1, 0));
        for (size_t k = 0; k < e_.size(); ++k) m.e_[k] = e_[k].derivative();
        return m;
    }

    /// Entrywise multiplication by the exact monomial b^k; precision grows.
    BMatrix shifted(int k) const {
        BMatrix m(rows_, cols_, prec_ + k);
        for (size_t t = 0; t < e_.size(); ++t) m.e_[t] = e_[t].shifted(k);
        return m;
    }

    /// Constant-term matrix as scalars.
    std::vector<Scalar> constant_term() const {
        std::vector<Scalar> v(e_.size());
        for (size_t k = 0; k < e_.size(); ++k) v[k] = e_[k].coeff(0);
        return v;
    }

    /// Coefficient matrix of b^k as scalars.
    std::vector<Scalar> coeff_matrix(int k) const {
        std::vector<Scalar> v(e_.size());
        for (size_t t = 0; t < e_.size(); ++t) v[t] = e_[t].coeff(k);
        return v;
    }

    /// Kronecker product over the series ring, row-major pairing
    /// ((i,j),(k,l)) -> (i*b.rows+j, k*b.cols+l).
    static BMatrix kronecker(const BMatrix& a, const BMatrix& b) {
        BMatrix m(a.rows_ * b.rows_, a.cols_ * b.cols_, std::min(a.prec_, b.prec_));
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                if (a.at(i, k).is_zero()) continue;
                for (int j = 0; j < b.rows_; ++j)
                    for (int l = 0; l < b.cols_; ++l) {
                        if (b.at(j, l).is_zero()) continue;
                        m.at(i * b.rows_ + j, k * b.cols_ + l) = (a.at(i, k) * b.at(j, l)).truncated(m.prec_);
                    }
            }
        return m;
    }

    static BMatrix block_diag(const BMatrix& a, const BMatrix& b) {
        BMatrix m(a.rows_ + b.rows_, a.cols_ + b.cols_, std::min(a.prec_, b.prec_));
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < a.cols_; ++j) m.at(i, j) = a.at(i, j).truncated(m.precision());
        for (int i = 0; i < b.rows_; ++i)
            for (int j = 0; j < b.cols_; ++j) m.at(a.rows_ + i, a.cols_ + j) = b.at(i, j).truncated(m.precision());
        return m;
    }

    /// Inverse of a square matrix whose constant term is invertible, computed
    /// order by order: X_k = -C0^{-1} * sum_{j=1..k} M_j X_{k-j}, X_0 = C0^{-1}.
    BMatrix inverse() const;

    friend bool operator==(const BMatrix& a, const BMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
        for (size_t k = 0; k < a.e_.size(); ++k)
            if (!(a.e_[k] == b.e_[k])) return false;
        return true;
    }
    friend bool operator!=(const BMatrix& a, const BMatrix& b) { return !(a == b); }

    std::string str() const {
        std::string out;
        for (int i = 0; i < rows_; ++i) {
            out += "[ ";
            for (int j = 0; j < cols_; ++j) {
                out += at(i, j).str();
                if (j + 1 < cols_) out += " , ";
            }
            out += " ]\n";
        }
        return out;
    }

private:
    int rows_, cols_, prec_;
    std::vector<BSeries> e_;
};

} // namespace abmod

#include "qlinalg.hpp"

namespace abmod {

inline BMatrix BMatrix::inverse() const {
    if (rows_ != cols_) throw NotInvertible("inverse of a non-square matrix");
    int n = rows_;
    QMatrix c0(n, n, constant_term());
    QMatrix c0inv = c0.inverse(); // throws NotInvertible when det(0) == 0
    // X_0 = C0^{-1}; X_k = -C0^{-1} * sum_{j=1..k} M_j X_{k-j}
    std::vector<QMatrix> mk(static_cast<size_t>(prec_), QMatrix(n, n));
    for (int k = 0; k < prec_; ++k) mk[static_cast<size_t>(k)] = QMatrix(n, n, coeff_matrix(k));
    std::vector<QMatrix> x(static_cast<size_t>(prec_), QMatrix(n, n));
    x[0] = c0inv;
    for (int k = 1; k < prec_; ++k) {
        QMatrix acc(n, n);
        for (int j = 1; j <= k; ++j) acc = acc + mk[static_cast<size_t>(j)] * x[static_cast<size_t>(k - j)];
        x[static_cast<size_t>(k)] = Scalar(-1) * (c0inv * acc);
    }
    BMatrix inv(n, n, prec_);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<Scalar> cs(static_cast<size_t>(prec_));
            for (int k = 0; k < prec_; ++k) cs[static_cast<size_t>(k)] = x[static_cast<size_t>(k)].at(i, j);
            inv.at(i, j) = BSeries(std::move(cs), prec_);
        }
    return inv;
}

} // namespace abmod
