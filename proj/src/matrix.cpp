#include <netcoh/distribution.hpp>
#include <netcoh/matrix.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace netcoh {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

double Matrix::sum() const {
    double s = 0.0;
    for (double v : data_)
        s += v;
    return s;
}

std::vector<double> Matrix::rowSums() const {
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            out[i] += (*this)(i, j);
    return out;
}

std::vector<double> Matrix::colSums() const {
    std::vector<double> out(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            out[j] += (*this)(i, j);
    return out;
}

double Matrix::maxAbs() const {
    double m = 0.0;
    for (double v : data_)
        m = std::max(m, std::abs(v));
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

Matrix operator*(const Matrix &lhs, const Matrix &rhs) {
    if (lhs.cols() != rhs.rows())
        throw std::invalid_argument("matrix product: dimension mismatch");
    Matrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const double a = lhs(i, k);
            if (a == 0.0)
                continue;
            for (std::size_t j = 0; j < rhs.cols(); ++j)
                out(i, j) += a * rhs(k, j);
        }
    return out;
}

Matrix operator-(const Matrix &lhs, const Matrix &rhs) {
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols())
        throw std::invalid_argument("matrix difference: dimension mismatch");
    Matrix out = lhs;
    auto o = out.data();
    auto r = rhs.data();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] -= r[i];
    return out;
}

std::vector<double> leftMultiply(std::span<const double> x, const Matrix &m) {
    assert(x.size() == m.rows());
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (x[i] == 0.0)
            continue;
        const auto row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j)
            out[j] += x[i] * row[j];
    }
    return out;
}

std::vector<double> rightMultiply(const Matrix &m, std::span<const double> x) {
    assert(x.size() == m.cols());
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j)
            s += row[j] * x[j];
        out[i] = s;
    }
    return out;
}

double maxAbsDiff(const Matrix &a, const Matrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("maxAbsDiff: dimension mismatch");
    return maxAbsDiff(a.data(), b.data());
}

double maxAbsDiff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("maxAbsDiff: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double entropyBits(const std::vector<double> &p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0)
            h -= v * std::log2(v);
    return h;
}

} // namespace netcoh
