#include "startrace/linalg.hpp"

#include "startrace/errors.hpp"

#include <utility>

namespace startrace {

RationalMatrix::RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionMismatch("ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RationalMatrix RationalMatrix::diagonal(const std::vector<Rational>& d) {
    RationalMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Rational RationalMatrix::determinant() const {
    if (rows_ != cols_) throw DimensionMismatch("determinant of a non-square matrix");
    RationalMatrix a = *this;
    Rational det = 1;
    const std::size_t n = rows_;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        while (pivot < n && a(pivot, c) == 0) ++pivot;
        if (pivot == n) return Rational(0);
        if (pivot != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(pivot, j));
            det = -det;
        }
        det *= a(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a(r, c) == 0) continue;
            Rational f = a(r, c) / a(c, c);
            for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
        }
    }
    return det;
}

RationalMatrix RationalMatrix::inverse() const {
    if (rows_ != cols_) throw DimensionMismatch("inverse of a non-square matrix");
    const std::size_t n = rows_;
    RationalMatrix a = *this;
    RationalMatrix inv = identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        while (pivot < n && a(pivot, c) == 0) ++pivot;
        if (pivot == n) throw PreconditionViolation("matrix is singular");
        if (pivot != c)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(c, j), a(pivot, j));
                std::swap(inv(c, j), inv(pivot, j));
            }
        Rational d = a(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            a(c, j) /= d;
            inv(c, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a(r, c) == 0) continue;
            Rational f = a(r, c);
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

bool RationalMatrix::is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
}

bool RationalMatrix::is_positive_definite() const {
    if (!is_symmetric()) return false;
    for (std::size_t k = 1; k <= rows_; ++k) {
        RationalMatrix minor(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) minor(i, j) = (*this)(i, j);
        if (minor.determinant() <= 0) return false;
    }
    return true;
}

bool RationalMatrix::is_scalar_multiple_of_identity(Rational* lambda) const {
    if (rows_ != cols_ || rows_ == 0) return false;
    const Rational& d = (*this)(0, 0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if ((*this)(i, j) != (i == j ? d : Rational(0))) return false;
    if (lambda) *lambda = d;
    return true;
}

std::vector<Rational> RationalMatrix::apply(const std::vector<Rational>& v) const {
    if (v.size() != cols_) throw DimensionMismatch("matrix-vector size mismatch");
    std::vector<Rational> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product size mismatch");
    RationalMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

RationalMatrix operator*(const Rational& s, const RationalMatrix& a) {
    RationalMatrix c = a;
    for (auto& x : c.data_) x *= s;
    return c;
}

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("matrix sum size mismatch");
    RationalMatrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
    return c;
}

std::string RationalMatrix::to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < rows_; ++i) {
        out += i ? ", [" : "[";
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) out += ", ";
            out += (*this)(i, j).str();
        }
        out += "]";
    }
    return out + "]";
}

}  // namespace startrace
