#pragma once

#include "startrace/rational.hpp"

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace startrace {

/// Dense square-or-rectangular matrix over the rationals, row-major.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

    static RationalMatrix identity(std::size_t n);
    static RationalMatrix diagonal(const std::vector<Rational>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    RationalMatrix transpose() const;
    Rational determinant() const;
    /// Throws PreconditionViolation when singular.
    RationalMatrix inverse() const;
    bool is_symmetric() const;
    /// Sylvester criterion on leading principal minors.
    bool is_positive_definite() const;
    /// Returns lambda when this == lambda * Id, nothing otherwise.
    bool is_scalar_multiple_of_identity(Rational* lambda = nullptr) const;

    std::vector<Rational> apply(const std::vector<Rational>& v) const;

    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator*(const Rational& s, const RationalMatrix& a);
    friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b);
    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) = default;

    std::string to_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

}  // namespace startrace
