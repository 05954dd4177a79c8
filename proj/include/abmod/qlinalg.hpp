#pragma once

#include <cassert>
#include <vector>

#include "scalar.hpp"

namespace abmod {

/// Dense matrix over the exact scalar field. The workhorse for kernel and
/// rank computations; everything here is plain Gaussian elimination with
/// exact arithmetic.
class QMatrix {
public:
    QMatrix() : rows_(0), cols_(0) {}
    QMatrix(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<size_t>(rows) * cols) {}
    QMatrix(int rows, int cols, std::vector<Scalar> entries)
        : rows_(rows), cols_(cols), e_(std::move(entries)) {
        assert(static_cast<int>(e_.size()) == rows_ * cols_);
    }

    static QMatrix identity(int n) {
        QMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Scalar& at(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
    const Scalar& at(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }

    bool is_zero() const {
        for (const auto& x : e_)
            if (!x.is_zero()) return false;
        return true;
    }

    QMatrix operator-() const {
        QMatrix m(*this);
        for (auto& x : m.e_) x = -x;
        return m;
    }

    friend QMatrix operator+(const QMatrix& a, const QMatrix& b) {
        assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
        QMatrix m(a.rows_, a.cols_);
        for (size_t k = 0; k < m.e_.size(); ++k) m.e_[k] = a.e_[k] + b.e_[k];
        return m;
    }
    friend QMatrix operator-(const QMatrix& a, const QMatrix& b) { return a + (-b); }

    friend QMatrix operator*(const QMatrix& a, const QMatrix& b) {
        assert(a.cols_ == b.rows_);
        QMatrix m(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const Scalar& x = a.at(i, k);
                if (x.is_zero()) continue;
                for (int j = 0; j < b.cols_; ++j) {
                    const Scalar& y = b.at(k, j);
                    if (y.is_zero()) continue;
                    m.at(i, j) += x * y;
                }
            }
        return m;
    }

    friend QMatrix operator*(const Scalar& c, const QMatrix& a) {
        QMatrix m(a);
        for (auto& x : m.e_) x = c * x;
        return m;
    }

    friend bool operator==(const QMatrix& a, const QMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
    }

    QMatrix transpose() const {
        QMatrix m(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
        return m;
    }

    Scalar trace() const {
        Scalar t;
        for (int i = 0; i < std::min(rows_, cols_); ++i) t += at(i, i);
        return t;
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    std::vector<int> rref() {
        std::vector<int> pivots;
        int r = 0;
        for (int c = 0; c < cols_ && r < rows_; ++c) {
            int p = -1;
            for (int i = r; i < rows_; ++i)
                if (!at(i, c).is_zero()) {
                    p = i;
                    break;
                }
            if (p < 0) continue;
            if (p != r)
                for (int j = 0; j < cols_; ++j) std::swap(at(p, j), at(r, j));
            Scalar inv = Scalar(1) / at(r, c);
            for (int j = c; j < cols_; ++j) at(r, j) = inv * at(r, j);
            for (int i = 0; i < rows_; ++i) {
                if (i == r || at(i, c).is_zero()) continue;
                Scalar f = at(i, c);
                for (int j = c; j < cols_; ++j) at(i, j) -= f * at(r, j);
            }
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    int rank() const {
        QMatrix m(*this);
        return static_cast<int>(m.rref().size());
    }

    /// Basis of the right kernel, one column per basis vector.
    QMatrix kernel() const {
        QMatrix m(*this);
        std::vector<int> pivots = m.rref();
        std::vector<bool> is_pivot(static_cast<size_t>(cols_), false);
        for (int c : pivots) is_pivot[static_cast<size_t>(c)] = true;
        int free_count = cols_ - static_cast<int>(pivots.size());
        QMatrix ker(cols_, free_count);
        int fc = 0;
        for (int c = 0; c < cols_; ++c) {
            if (is_pivot[static_cast<size_t>(c)]) continue;
            ker.at(c, fc) = Scalar(1);
            for (size_t pi = 0; pi < pivots.size(); ++pi) ker.at(pivots[pi], fc) = -m.at(static_cast<int>(pi), c);
            ++fc;
        }
        return ker;
    }

    Scalar det() const {
        assert(rows_ == cols_);
        QMatrix m(*this);
        Scalar d(1);
        for (int c = 0; c < cols_; ++c) {
            int p = -1;
            for (int i = c; i < rows_; ++i)
                if (!m.at(i, c).is_zero()) {
                    p = i;
                    break;
                }
            if (p < 0) return Scalar(0);
            if (p != c) {
                for (int j = 0; j < cols_; ++j) std::swap(m.at(p, j), m.at(c, j));
                d = -d;
            }
            d *= m.at(c, c);
            Scalar inv = Scalar(1) / m.at(c, c);
            for (int i = c + 1; i < rows_; ++i) {
                if (m.at(i, c).is_zero()) continue;
                Scalar f = inv * m.at(i, c);
                for (int j = c; j < cols_; ++j) m.at(i, j) -= f * m.at(c, j);
            }
        }
        return d;
    }

    /// Inverse of a square invertible matrix; throws NotInvertible otherwise.
    QMatrix inverse() const {
        assert(rows_ == cols_);
        QMatrix aug(rows_, 2 * cols_);
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, cols_ + i) = Scalar(1);
        }
        std::vector<int> piv = aug.rref();
        // all pivots must land in the left block
        for (int i = 0; i < rows_; ++i)
            if (static_cast<int>(piv.size()) <= i || piv[static_cast<size_t>(i)] != i)
                throw NotInvertible("QMatrix::inverse: singular matrix");
        QMatrix inv(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) inv.at(i, j) = aug.at(i, cols_ + j);
        return inv;
    }

    /// Monic characteristic polynomial by the Faddeev-LeVerrier recursion,
    /// coefficients returned lowest degree first (size n+1).
    std::vector<Scalar> char_poly() const {
        assert(rows_ == cols_);
        int n = rows_;
        std::vector<Scalar> c(static_cast<size_t>(n + 1));
        c[static_cast<size_t>(n)] = Scalar(1);
        QMatrix m(n, n); // M_0 = 0
        for (int k = 1; k <= n; ++k) {
            // M_k = A*M_{k-1} + c_{n-k+1} * I
            m = (*this) * m;
            for (int i = 0; i < n; ++i) m.at(i, i) += c[static_cast<size_t>(n - k + 1)];
            Scalar t = ((*this) * m).trace();
            c[static_cast<size_t>(n - k)] = -(Scalar(1) / Scalar(k)) * t;
        }
        return c;
    }

private:
    int rows_, cols_;
    std::vector<Scalar> e_;
};

} // namespace abmod
