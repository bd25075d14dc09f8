#include "genodyn/numerics/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace genodyn::numerics {

namespace {

double sign_like(double magnitude, double sign_of) {
    return sign_of >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Diagonal similarity scaling by powers of two (exact in floating point),
// equalizing row and column norms so the QR sweep sees a well-scaled matrix.
void balance(Matrix& a) {
    const std::size_t n = a.rows();
    const double radix = 2.0, sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= ginv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Householder reduction to upper Hessenberg form (eigenvalues only, no
// accumulation of the transform).
void hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    Vector v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) scale += std::abs(a(i, k));
        if (scale == 0.0) continue;

        double h = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k) / scale;
            h += v[i] * v[i];
        }
        double g = -sign_like(std::sqrt(h), v[k + 1]);
        h -= v[k + 1] * g;
        v[k + 1] -= g;
        if (h == 0.0) continue;

        // A <- P A with P = I - v v^T / h
        for (std::size_t j = 0; j < n; ++j) {
            double f = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) f += v[i] * a(i, j);
            f /= h;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= f * v[i];
        }
        // A <- A P
        for (std::size_t i = 0; i < n; ++i) {
            double f = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) f += a(i, j) * v[j];
            f /= h;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * v[j];
        }
        a(k + 1, k) = scale * g;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
// Classic EISPACK hqr scheme with deflation of 1x1 and 2x2 trailing blocks.
void hqr(Matrix& a, std::vector<std::complex<double>>& out) {
    const std::size_t n = a.rows();
    const double eps = std::numeric_limits<double>::epsilon();
    out.clear();
    if (n == 0) return;

    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i > 0 ? i - 1 : 0); j < n; ++j) anorm += std::abs(a(i, j));
    if (anorm == 0.0) {
        out.assign(n, {0.0, 0.0});
        return;
    }

    long nn = static_cast<long>(n) - 1;
    double t = 0.0;
    auto A = [&](long i, long j) -> double& { return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); };

    while (nn >= 0) {
        int its = 0;
        long l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(A(l, l - 1)) <= eps * s) {
                    A(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 0) l = 0;
            double x = A(nn, nn);
            if (l == nn) {
                out.emplace_back(x + t, 0.0);
                --nn;
            } else {
                double y = A(nn - 1, nn - 1);
                double w = A(nn, nn - 1) * A(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_like(z, p);
                        double r1 = x + z;
                        double r2 = (z != 0.0) ? x - w / z : x + z;
                        out.emplace_back(r1, 0.0);
                        out.emplace_back(r2, 0.0);
                    } else {
                        out.emplace_back(x + p, z);
                        out.emplace_back(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if (its == 50) {
                        throw EigenConvergenceError(
                            "eigenvalues: QR iteration failed to converge (n=" +
                            std::to_string(n) + ", block end " + std::to_string(nn) + ")");
                    }
                    if (its > 0 && its % 10 == 0) {
                        t += x;
                        for (long i = 0; i <= nn; ++i) A(i, i) -= x;
                        double s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;

                    long m;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (m = nn - 2; m >= l; --m) {
                        z = A(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / A(m + 1, m) + A(m, m + 1);
                        q = A(m + 1, m + 1) - z - rr - ss;
                        r = A(m + 2, m + 1);
                        double scale = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= scale;
                        q /= scale;
                        r /= scale;
                        if (m == l) break;
                        const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) *
                            (std::abs(A(m - 1, m - 1)) + std::abs(z) + std::abs(A(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    if (m < l) m = l;
                    for (long i = m + 2; i <= nn; ++i) {
                        A(i, i - 2) = 0.0;
                        if (i != m + 2) A(i, i - 3) = 0.0;
                    }
                    for (long k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = A(k, k - 1);
                            q = A(k + 1, k - 1);
                            r = (k != nn - 1) ? A(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s = sign_like(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) A(k, k - 1) = -A(k, k - 1);
                        } else {
                            A(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (long j = k; j <= nn; ++j) {
                            double pp = A(k, j) + q * A(k + 1, j);
                            if (k != nn - 1) {
                                pp += r * A(k + 2, j);
                                A(k + 2, j) -= pp * z;
                            }
                            A(k + 1, j) -= pp * y;
                            A(k, j) -= pp * x;
                        }
                        const long mmin = nn < k + 3 ? nn : k + 3;
                        for (long i = l; i <= mmin; ++i) {
                            double pp = x * A(i, k) + y * A(i, k + 1);
                            if (k != nn - 1) {
                                pp += z * A(i, k + 2);
                                A(i, k + 2) -= pp * r;
                            }
                            A(i, k + 1) -= pp * q;
                            A(i, k) -= pp;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
}

} // namespace

double Spectrum::max_real() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& z : eigenvalues) m = std::max(m, z.real());
    return m;
}

std::complex<double> Spectrum::product() const {
    std::complex<double> p{1.0, 0.0};
    for (const auto& z : eigenvalues) p *= z;
    return p;
}

bool Spectrum::conjugate_paired(double tol) const {
    for (const auto& z : eigenvalues) {
        if (std::abs(z.imag()) <= tol) continue;
        bool found = false;
        for (const auto& w : eigenvalues) {
            if (std::abs(w.real() - z.real()) <= tol && std::abs(w.imag() + z.imag()) <= tol) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

Spectrum make_spectrum(std::vector<std::complex<double>> values) {
    std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
    return Spectrum{std::move(values)};
}

Spectrum eigenvalues(const Matrix& a) {
    if (!a.square()) throw std::invalid_argument("eigenvalues: matrix must be square");
    const std::size_t n = a.rows();
    if (n == 0) return Spectrum{};
    if (n == 1) return make_spectrum({{a(0, 0), 0.0}});

    Matrix h = a;
    balance(h);
    hessenberg(h);
    std::vector<std::complex<double>> vals;
    vals.reserve(n);
    hqr(h, vals);
    return make_spectrum(std::move(vals));
}

} // namespace genodyn::numerics
