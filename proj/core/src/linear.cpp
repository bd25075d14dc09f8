#include "genodyn/numerics/linear.hpp"

#include <cmath>
#include <numeric>

namespace genodyn::numerics {

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

Vector Matrix::mul(const Vector& x) const {
    Vector y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dist_inf(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

LuDecomposition::LuDecomposition(Matrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    min_pivot_ = n ? std::numeric_limits<double>::infinity() : 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
            std::swap(perm_[k], perm_[p]);
            sign_ = -sign_;
        }
        min_pivot_ = std::min(min_pivot_, best);
        if (best == 0.0) continue; // leave zero column; determinant() reports 0
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu_(i, k) / lu_(k, k);
            lu_(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

double LuDecomposition::determinant() const {
    double d = sign_;
    for (std::size_t i = 0; i < size(); ++i) d *= lu_(i, i);
    return d;
}

Vector LuDecomposition::solve(const Vector& b) const {
    const std::size_t n = size();
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 1; i < n; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * x[j];
        x[ii] = s / lu_(ii, ii);
    }
    return x;
}

Vector solve_linear(const Matrix& a, const Vector& b) {
    LuDecomposition lu(a);
    const double tol = 1e-12 * std::max(1.0, a.max_abs());
    if (lu.min_pivot() <= tol) {
        throw SingularMatrixError(
            "solve_linear: matrix singular to tolerance (pivot " +
                std::to_string(lu.min_pivot()) + ")",
            lu.min_pivot());
    }
    return lu.solve(b);
}

double determinant(const Matrix& a) {
    return LuDecomposition(a).determinant();
}

} // namespace genodyn::numerics
