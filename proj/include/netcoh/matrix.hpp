#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace netcoh {

/// Dense row-major matrix of doubles. Sizes here are desk-scale, so no
/// sparse storage.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix square(std::size_t n, double fill = 0.0) { return Matrix(n, n, fill); }
    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool isSquare() const noexcept { return rows_ == cols_; }

    double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double sum() const;
    std::vector<double> rowSums() const;
    std::vector<double> colSums() const;
    double maxAbs() const;
    Matrix transposed() const;

    bool operator==(const Matrix &) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix &lhs, const Matrix &rhs);
Matrix operator-(const Matrix &lhs, const Matrix &rhs);

/// x·M for a row vector x.
std::vector<double> leftMultiply(std::span<const double> x, const Matrix &m);
/// M·x for a column vector x.
std::vector<double> rightMultiply(const Matrix &m, std::span<const double> x);

/// max |a_ij - b_ij|; dimensions must agree.
double maxAbsDiff(const Matrix &a, const Matrix &b);
double maxAbsDiff(std::span<const double> a, std::span<const double> b);

} // namespace netcoh
