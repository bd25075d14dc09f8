#pragma once

#include "genodyn/numerics/matrix.hpp"

#include <complex>
#include <stdexcept>
#include <vector>

namespace genodyn::numerics {

class EigenConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eigenvalues of a real matrix, sorted by descending real part with ties
/// broken by ascending imaginary part. Complex values occur in conjugate
/// pairs; the ordering is a total deterministic one so downstream reports
/// are reproducible byte for byte.
struct Spectrum {
    std::vector<std::complex<double>> eigenvalues;

    double max_real() const;
    std::complex<double> product() const;
    /// True when every nonreal eigenvalue has its conjugate present
    /// within `tol` (absolute).
    bool conjugate_paired(double tol = 1e-10) const;
};

Spectrum make_spectrum(std::vector<std::complex<double>> values);

/// All eigenvalues via balancing, Householder reduction to Hessenberg
/// form and the implicitly shifted double QR iteration with deflation.
/// Throws EigenConvergenceError if an eigenvalue fails to deflate.
Spectrum eigenvalues(const Matrix& a);

} // namespace genodyn::numerics
