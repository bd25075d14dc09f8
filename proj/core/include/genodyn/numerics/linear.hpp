#pragma once

#include "genodyn/numerics/matrix.hpp"

#include <stdexcept>

namespace genodyn::numerics {

class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, double pivot)
        : std::runtime_error(what), pivot_(pivot) {}
    /// Magnitude of the offending pivot.
    double pivot() const { return pivot_; }

private:
    double pivot_;
};

/// LU factorization with partial pivoting. Never throws; callers decide
/// what a small pivot means for them.
class LuDecomposition {
public:
    explicit LuDecomposition(Matrix a);

    std::size_t size() const { return lu_.rows(); }
    double min_pivot() const { return min_pivot_; }
    double determinant() const;

    /// Back-substitution; check min_pivot() first if singularity matters.
    Vector solve(const Vector& b) const;

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
    int sign_ = 1;
    double min_pivot_ = 0.0;
};

/// Solves Ax = b. Throws SingularMatrixError when a pivot falls below
/// 1e-12 times the largest entry of A.
Vector solve_linear(const Matrix& a, const Vector& b);

double determinant(const Matrix& a);

} // namespace genodyn::numerics
