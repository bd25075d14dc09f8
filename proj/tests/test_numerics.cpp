#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "helpers.hpp"

#include "genodyn/bifurc.hpp"
#include "genodyn/field.hpp"
#include "genodyn/numerics/eigen.hpp"
#include "genodyn/numerics/integrate.hpp"
#include "genodyn/numerics/linear.hpp"
#include "genodyn/numerics/newton.hpp"

#include <cmath>
#include <random>

using namespace genodyn;
using numerics::Matrix;
using numerics::Vector;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

} // namespace

TEST_CASE("rotation block has eigenvalues +-i") {
    auto s = numerics::eigenvalues(from_rows({{0, 1}, {-1, 0}}));
    REQUIRE(s.eigenvalues.size() == 2);
    CHECK(std::abs(s.eigenvalues[0] - std::complex<double>(0, -1)) < 1e-12);
    CHECK(std::abs(s.eigenvalues[1] - std::complex<double>(0, 1)) < 1e-12);
}

TEST_CASE("toggle Jacobian at the critical exponent has eigenvalues {0, -2}") {
    auto s = numerics::eigenvalues(from_rows({{-1, -1}, {-1, -1}}));
    REQUIRE(s.eigenvalues.size() == 2);
    CHECK(std::abs(s.eigenvalues[0]) < 1e-12);
    CHECK(std::abs(s.eigenvalues[1] - std::complex<double>(-2, 0)) < 1e-12);
}

TEST_CASE("cyclic 3x3 with unit rates and gain -8 has eigenvalues {-3, +-i sqrt3}") {
    auto s = numerics::eigenvalues(from_rows({{-1, 0, -2}, {-2, -1, 0}, {0, -2, -1}}));
    REQUIRE(s.eigenvalues.size() == 3);
    const double r3 = std::sqrt(3.0);
    CHECK(std::abs(s.eigenvalues[0] - std::complex<double>(0, -r3)) < 1e-10);
    CHECK(std::abs(s.eigenvalues[1] - std::complex<double>(0, r3)) < 1e-10);
    CHECK(std::abs(s.eigenvalues[2] - std::complex<double>(-3, 0)) < 1e-10);
}

TEST_CASE("companion matrices of known-root polynomials: error below 1e-8") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    double worst = 0.0;
    for (int trial = 0; trial < 400; ++trial) {
        const int deg = 2 + static_cast<int>(rng() % 7); // up to 8
        std::vector<std::complex<double>> roots;
        // keep roots separated: clustered roots are ill-conditioned through
        // the companion coefficients and say nothing about solver quality
        auto separated = [&](std::complex<double> z) {
            for (const auto& r : roots)
                if (std::abs(r - z) < 0.05) return false;
            return true;
        };
        while (static_cast<int>(roots.size()) < deg) {
            if (deg - static_cast<int>(roots.size()) >= 2 && (rng() % 2)) {
                const std::complex<double> z(U(rng), std::abs(U(rng)) + 0.1);
                if (!separated(z) || !separated(std::conj(z))) continue;
                roots.push_back(z);
                roots.push_back(std::conj(z));
            } else {
                const std::complex<double> z(U(rng), 0.0);
                if (!separated(z)) continue;
                roots.push_back(z);
            }
        }
        std::vector<std::complex<double>> coef(deg + 1, 0.0);
        coef[0] = 1.0;
        int d = 0;
        for (const auto& r : roots) {
            ++d;
            for (int k = d; k >= 1; --k) coef[k] = coef[k - 1] - r * coef[k];
            coef[0] = -r * coef[0];
        }
        Matrix comp(deg, deg);
        for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -coef[i].real();
        const auto s = numerics::eigenvalues(comp);
        for (const auto& r : roots) {
            double best = 1e9;
            for (const auto& z : s.eigenvalues) best = std::min(best, std::abs(z - r));
            worst = std::max(worst, best);
        }
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("random spectra: conjugate pairing and determinant consistency") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng() % 9; // up to 10
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = U(rng);
        const auto s = numerics::eigenvalues(m);
        REQUIRE(s.eigenvalues.size() == n);
        CHECK(s.conjugate_paired(1e-10));
        const double det = numerics::determinant(m);
        CHECK(std::abs(s.product().real() - det) <= 1e-8 * std::max(1.0, std::abs(det)));
        CHECK(std::abs(s.product().imag()) <= 1e-8 * std::max(1.0, std::abs(det)));
    }
}

TEST_CASE("spectrum ordering is total and deterministic") {
    auto s = numerics::make_spectrum({{1, 1}, {1, -1}, {2, 0}, {-1, 0}});
    CHECK(s.eigenvalues[0] == std::complex<double>(2, 0));
    CHECK(s.eigenvalues[1] == std::complex<double>(1, -1));
    CHECK(s.eigenvalues[2] == std::complex<double>(1, 1));
    CHECK(s.eigenvalues[3] == std::complex<double>(-1, 0));
}

TEST_CASE("solve_linear basics and the singular toggle Jacobian") {
    CHECK(numerics::solve_linear(Matrix::identity(3), {1, 2, 3}) == Vector{1, 2, 3});
    const auto x = numerics::solve_linear(from_rows({{2, 0}, {0, 4}}), {2, 8});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));

    // toggle Jacobian at m=2 is exactly singular
    try {
        (void)numerics::solve_linear(from_rows({{-1, -1}, {-1, -1}}), {1, 1});
        FAIL("expected SingularMatrixError");
    } catch (const numerics::SingularMatrixError& e) {
        CHECK(e.pivot() == doctest::Approx(0.0));
    }
}

TEST_CASE("solve_linear residual bound on random well-conditioned systems") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 15;
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a(i, j) = U(rng);
            a(i, i) += 4.0; // keep it comfortably nonsingular
        }
        Vector b(n);
        for (auto& v : b) v = U(rng);
        const auto x = numerics::solve_linear(a, b);
        const auto ax = a.mul(x);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(ax[i] - b[i]));
        CHECK(res <= 1e-10 * (a.max_abs() * numerics::norm_inf(x) + numerics::norm_inf(b)));
    }
}

TEST_CASE("newton finds the symmetric toggle equilibrium") {
    auto net = testutil::load("toggle.grn");
    auto binding = field::ParamBinding::defaults(net); // m = 1
    const field::FieldSystem sys(net, binding);
    const auto r = numerics::newton([&](const Vector& x) { return sys.eval(x); },
                                    [&](const Vector& x) { return sys.jacobian_at(x); },
                                    {0.5, 1.5}, {});
    REQUIRE(r.ok());
    CHECK(std::abs(r.x[0] - 1.0) < 1e-10);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-10);
    CHECK(r.residual <= 1e-12);
    CHECK(r.trace.size() >= 2);
}

TEST_CASE("newton at zero exponents lands on beta/(2a) to machine accuracy") {
    auto net = testutil::load("c1.grn");
    auto binding = field::ParamBinding::defaults(net).with("m", 0.0);
    const field::FieldSystem sys(net, binding);
    for (const Vector& start : {Vector{0.3, 5.0, 9.0}, Vector{8.0, 0.1, 2.0}}) {
        const auto r = numerics::newton([&](const Vector& x) { return sys.eval(x); },
                                        [&](const Vector& x) { return sys.jacobian_at(x); },
                                        start, {});
        REQUIRE(r.ok());
        for (double v : r.x) CHECK(std::abs(v - 1.0) <= 1e-12);
    }
}

TEST_CASE("newton agrees with the scalar bisection oracle on the asymmetric toggle root") {
    // reduction: x = 2/(1+y^3), y = 2/(1+x^3) => g(x) = x - 2/(1+(2/(1+x^3))^3) = 0
    auto g = [](double x) {
        const double y = 2.0 / (1.0 + x * x * x);
        return x - 2.0 / (1.0 + y * y * y);
    };
    double lo = 1.2, hi = 2.0;
    REQUIRE(g(lo) < 0.0);
    REQUIRE(g(hi) > 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((g(mid) < 0.0) ? lo : hi) = mid;
    }
    const double x_star = 0.5 * (lo + hi);
    const double y_star = 2.0 / (1.0 + x_star * x_star * x_star);

    auto net = testutil::load("toggle.grn");
    auto binding = field::ParamBinding::defaults(net).with("m", 3.0);
    const field::FieldSystem sys(net, binding);
    const auto r = numerics::newton([&](const Vector& x) { return sys.eval(x); },
                                    [&](const Vector& x) { return sys.jacobian_at(x); },
                                    {1.8, 0.2}, {});
    REQUIRE(r.ok());
    CHECK(r.x[0] == doctest::Approx(x_star).epsilon(1e-10));
    CHECK(r.x[1] == doctest::Approx(y_star).epsilon(1e-10));
    CHECK(r.x[0] > 1.0);
    CHECK(r.x[1] < 1.0);
}

TEST_CASE("newton reports singular Jacobians and box escapes") {
    // f(x) = x^2 + 1 with a flat Jacobian at the start
    auto f = [](const Vector& x) { return Vector{x[0] * x[0] + 1.0}; };
    auto j = [](const Vector& x) {
        Matrix m(1, 1);
        m(0, 0) = 2.0 * x[0];
        return m;
    };
    const auto r = numerics::newton(f, j, {0.0}, {});
    CHECK(r.status == numerics::NewtonResult::Status::singular_jacobian);

    // runaway iteration leaves the box
    auto esc = [](const Vector& x) { return Vector{std::exp(-x[0]) + 1.0}; };
    auto jesc = [](const Vector& x) {
        Matrix m(1, 1);
        m(0, 0) = -std::exp(-x[0]);
        return m;
    };
    numerics::NewtonOptions opts;
    opts.box = numerics::Box{{0.0}, {10.0}};
    const auto r2 = numerics::newton(esc, jesc, {5.0}, opts);
    CHECK_FALSE(r2.ok());
    CHECK_FALSE(r2.trace.empty());
}

TEST_CASE("integrator hits e^{-1} within 1e-8") {
    numerics::Rhs f = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = -x[0];
    };
    const auto traj = numerics::integrate(f, {1.0}, 0.0, 1.0, {});
    CHECK(std::abs(traj.back_state()[0] - std::exp(-1.0)) <= 1e-8);
    CHECK(traj.accepted > 0);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == 1.0);
}

TEST_CASE("pitchfork normal form decays to the origin for negative mu") {
    auto nf = bifurc::normal_form(bifurc::BifurcationKind::pitchfork, -1.0);
    const auto traj = numerics::integrate(nf.rhs, {0.5}, 0.0, 40.0, {});
    CHECK(std::abs(traj.back_state()[0]) < 1e-9);
}

TEST_CASE("oscillator normal form settles onto a closed orbit for mu = 0.5") {
    auto nf = bifurc::normal_form(bifurc::BifurcationKind::hopf, 0.5);
    numerics::IntegrateOptions opts;
    opts.max_step = 0.05;
    const auto traj = numerics::integrate(nf.rhs, {0.1, 0.0}, 0.0, 400.0, opts);
    // one revolution later the tail state recurs (up to the scan granularity)
    const auto a = traj.state_at(390.0);
    double best = 1e9;
    for (double dt = 5.5; dt < 7.5; dt += 0.0005) {
        best = std::min(best, numerics::dist_inf(a, traj.state_at(390.0 - dt)));
    }
    CHECK(best < 1e-3);
    // and the amplitude is macroscopic, not decayed
    CHECK(numerics::norm_inf(traj.state_at(395.0)) > 0.3);
}

TEST_CASE("fixed-step error halves as an order-5 method") {
    numerics::Rhs f = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = -x[0];
    };
    numerics::IntegrateOptions c1, c2;
    c1.fixed_step = 0.05;
    c2.fixed_step = 0.025;
    const double e1 =
        std::abs(numerics::integrate(f, {1.0}, 0.0, 1.0, c1).back_state()[0] - std::exp(-1.0));
    const double e2 =
        std::abs(numerics::integrate(f, {1.0}, 0.0, 1.0, c2).back_state()[0] - std::exp(-1.0));
    const double ratio = e1 / e2;
    CHECK(ratio > 24.0);
    CHECK(ratio < 44.0);
}

TEST_CASE("tightening tolerance tightens the answer") {
    numerics::Rhs f = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = -x[0];
    };
    numerics::IntegrateOptions loose, tight;
    loose.rtol = 1e-6;
    loose.atol = 1e-8;
    tight.rtol = 1e-10;
    tight.atol = 1e-12;
    const double el =
        std::abs(numerics::integrate(f, {1.0}, 0.0, 1.0, loose).back_state()[0] - std::exp(-1.0));
    const double et =
        std::abs(numerics::integrate(f, {1.0}, 0.0, 1.0, tight).back_state()[0] - std::exp(-1.0));
    CHECK(et < el);
    CHECK(et <= 1e-10);
}

TEST_CASE("dense output tracks the solution between steps") {
    numerics::Rhs f = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = -x[0];
    };
    numerics::IntegrateOptions opts;
    opts.sample_dt = 0.01;
    const auto traj = numerics::integrate(f, {1.0}, 0.0, 2.0, opts);
    CHECK(traj.times.size() == 201);
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        CHECK(std::abs(traj.states[i][0] - std::exp(-traj.times[i])) <= 1e-8);
}

TEST_CASE("a finite-time blow-up raises a positioned integration error") {
    numerics::Rhs f = [](double t, std::span<const double>, std::span<double> dx) {
        dx[0] = 1.0 / (1.0000001 - t);
    };
    try {
        (void)numerics::integrate(f, {0.0}, 0.0, 2.0, {});
        FAIL("expected IntegrationError");
    } catch (const numerics::IntegrationError& e) {
        CHECK(e.time() > 0.9);
        CHECK(e.time() < 1.1);
    }
}

TEST_CASE("eigensolver corner cases: tiny, diagonal, defective, empty") {
    Matrix one(1, 1);
    one(0, 0) = 4.5;
    CHECK(numerics::eigenvalues(one).eigenvalues[0] == std::complex<double>(4.5, 0.0));

    Matrix diag(3, 3);
    diag(0, 0) = -2.0;
    diag(1, 1) = 0.5;
    diag(2, 2) = 3.0;
    const auto sd = numerics::eigenvalues(diag);
    CHECK(sd.eigenvalues[0] == std::complex<double>(3.0, 0.0));
    CHECK(sd.eigenvalues[2] == std::complex<double>(-2.0, 0.0));

    // defective Jordan block: double eigenvalue at zero
    Matrix jordan(2, 2);
    jordan(0, 1) = 1.0;
    const auto sj = numerics::eigenvalues(jordan);
    CHECK(std::abs(sj.eigenvalues[0]) < 1e-12);
    CHECK(std::abs(sj.eigenvalues[1]) < 1e-12);

    CHECK(numerics::eigenvalues(Matrix(0, 0)).eigenvalues.empty());
    CHECK(numerics::eigenvalues(Matrix(3, 3)).eigenvalues.size() == 3);
}

TEST_CASE("eigensolver holds 1e-10 absolute accuracy at n=64 with a known spectrum") {
    // block-diagonal truth (well-separated reals and rotation pairs) under a
    // random orthogonal similarity built from Householder reflections
    const std::size_t n = 64;
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> U(-1.0, 1.0);

    std::vector<std::complex<double>> truth;
    Matrix a(n, n);
    std::size_t i = 0;
    int sign = 1;
    while (i < n) {
        if (n - i >= 2 && (rng() % 2)) {
            const double re = 0.07 * static_cast<double>(i) * sign;
            const double im = 0.5 + 0.05 * static_cast<double>(i);
            a(i, i) = re;
            a(i, i + 1) = im;
            a(i + 1, i) = -im;
            a(i + 1, i + 1) = re;
            truth.emplace_back(re, im);
            truth.emplace_back(re, -im);
            i += 2;
        } else {
            const double v = 0.11 * static_cast<double>(i + 1) * sign;
            a(i, i) = v;
            truth.emplace_back(v, 0.0);
            ++i;
        }
        sign = -sign;
    }
    for (int sweep = 0; sweep < 4; ++sweep) {
        Vector v(n);
        double norm2 = 0.0;
        for (auto& x : v) {
            x = U(rng);
            norm2 += x * x;
        }
        for (auto& x : v) x /= std::sqrt(norm2);
        // A <- H A H with H = I - 2 v v^T
        auto reflect_rows = [&](Matrix& m) {
            for (std::size_t col = 0; col < n; ++col) {
                double dot = 0.0;
                for (std::size_t row = 0; row < n; ++row) dot += v[row] * m(row, col);
                for (std::size_t row = 0; row < n; ++row) m(row, col) -= 2.0 * dot * v[row];
            }
        };
        auto reflect_cols = [&](Matrix& m) {
            for (std::size_t row = 0; row < n; ++row) {
                double dot = 0.0;
                for (std::size_t col = 0; col < n; ++col) dot += v[col] * m(row, col);
                for (std::size_t col = 0; col < n; ++col) m(row, col) -= 2.0 * dot * v[col];
            }
        };
        reflect_rows(a);
        reflect_cols(a);
    }

    const auto s = numerics::eigenvalues(a);
    REQUIRE(s.eigenvalues.size() == n);
    for (const auto& t : truth) {
        double best = 1e9;
        for (const auto& z : s.eigenvalues) best = std::min(best, std::abs(z - t));
        CHECK(best <= 1e-10);
    }
}
