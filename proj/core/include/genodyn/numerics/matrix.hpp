#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace genodyn::numerics {

using Vector = std::vector<double>;

/// Dense row-major real matrix. Systems in this toolkit are tiny (a few
/// tens of rows), so there is no blocking or sparsity anywhere.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double max_abs() const;
    Vector mul(const Vector& x) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

double norm_inf(std::span<const double> v);
double dist_inf(std::span<const double> a, std::span<const double> b);

} // namespace genodyn::numerics
