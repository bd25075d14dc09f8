#pragma once

#include "genodyn/orbits.hpp"

#include <optional>
#include <string>

namespace genodyn::bifurc {

class ContinuationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateCrossingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BranchPoint {
    double mu;
    numerics::Vector x;
    numerics::Spectrum spectrum;
    double det_j;
    double max_re;
};

/// An equilibrium branch over one parameter. Carries enough provenance
/// (network, base binding, parameter id) for crossing refinement to
/// re-evaluate the branch at arbitrary parameter values.
struct Branch {
    graph::Network net;
    field::ParamBinding base;
    std::string param;
    double from = 0.0, to = 0.0;
    std::vector<BranchPoint> points;
    bool stalled = false;
    double stall_mu = 0.0;
};

struct ContinueOptions {
    int steps = 200;
    double newton_tol = 1e-12;
    int max_step_halvings = 16; // smallest step is (to-from)/2^16
    double x_jump_rel = 0.2;    // of the largest expression bound
    double re_jump_abs = 0.25;  // leading-real-part jump that forces a retry
    orbits::FindOptions start_search;
};

/// Natural-parameter continuation with Newton correction, warm-started
/// from the previous point; the parameter step halves when correction
/// fails or the spectrum jumps. A stall at the minimal step is flagged on
/// the returned branch, not raised.
Branch continue_branch(const graph::Network& net, const field::ParamBinding& binding,
                       const std::string& param, double from, double to,
                       const ContinueOptions& opts = {});

enum class BifurcationKind { none, pitchfork, hopf };

const char* to_string(BifurcationKind k);

struct CrossingInfo {
    double real_eigenvalue = 0.0; // the crossing real eigenvalue (pitchfork)
    double det_j = 0.0;
    double gamma = 0.0;           // |Im| of the crossing pair (hopf)
};

struct PostCheck {
    bool ran = false;
    bool ok = false;
    bool flagged = false; // verification failed: possible subcritical or non-generic case
    int equilibria_after = 0;
    int stable_after = 0;
    double amplitude_exponent = 0.0;
    std::string detail;
};

struct BifurcationReport {
    BifurcationKind kind = BifurcationKind::none;
    std::string param;
    double from = 0.0, to = 0.0;
    double mu0 = 0.0;
    numerics::Vector x0;
    numerics::Spectrum spectrum0;
    CrossingInfo crossing;
    std::optional<double> q_at_mu0; // loop gain, when the network is one cycle
    PostCheck post_check;
};

struct ClassifyOptions {
    double refine_mu_tol = 1e-9;
    double eig_tol = 1e-6;        // |Re| below this counts as "on the axis"
    double degenerate_sep = 1e-7; // simultaneous real and pair crossings are refused
    double newton_tol = 1e-12;
};

/// Scans a branch that begins stable for the first loss of stability,
/// refines the crossing parameter by bisection (on det J for a real
/// crossing, on the pair's real part for a complex one), and classifies
/// it. Throws DegenerateCrossingError when a real zero and a pair sit on
/// the axis simultaneously.
BifurcationReport first_bifurcation(const Branch& branch, const ClassifyOptions& opts = {});

struct PostCheckOptions {
    double pitchfork_delta_rel = 0.01;                        // of the branch range
    std::vector<double> hopf_deltas = {0.01, 0.02, 0.03, 0.04, 0.05}; // relative to mu0
    double exponent_lo = 0.4, exponent_hi = 0.6;
    int find_grid = 8;
    numerics::IntegrateOptions integrate;
};

/// Empirical supercriticality check past the bifurcation: a pitchfork
/// must produce three equilibria (two stable); a Hopf must produce a
/// stable orbit whose amplitude grows like delta^beta with beta near 1/2.
PostCheck post_bifurcation_check(const graph::Network& net, const field::ParamBinding& binding,
                                 BifurcationReport& report, const PostCheckOptions& opts = {});

/// The no-bifurcation window for a three-gene cycle with degradation
/// rates a, b, c: spectra stay in the left half plane for loop gains
/// strictly between q_hopf and q_pitch; the pair crosses at +-i*gamma at
/// the lower end and a real eigenvalue crosses zero at the upper end.
struct QWindow {
    double a, b, c;
    double q_hopf;  // -2abc - (a^2 b + a^2 c + a b^2 + a c^2 + b^2 c + b c^2)
    double q_pitch; // abc
    double gamma;   // sqrt(ab + ac + bc)
};
QWindow q_window(double a, double b, double c);

/// Product of the Hill derivatives around the cycle of a single-loop
/// network, evaluated at an equilibrium. Throws std::invalid_argument
/// when the network is not one directed cycle through all genes.
double loop_gain(const graph::Network& net, const field::ParamBinding& binding,
                 const numerics::Vector& eq);

/// Roots of prod_i (lambda + alpha_i) = Q, the characteristic equation of
/// a single-loop network with loop gain Q. Equal rates take the n-th-root
/// closed form; otherwise the expanded polynomial goes through the
/// companion-matrix eigensolver.
numerics::Spectrum cyclic_spectrum(const numerics::Vector& degrades, double q);
numerics::Spectrum cyclic_spectrum_closed(double alpha, std::size_t n, double q);
numerics::Spectrum cyclic_spectrum_companion(const numerics::Vector& degrades, double q);

/// Reference systems for exercising the detection pipeline end to end:
/// dx/dt = mu*x - x^3 (pitchfork, n=1) and the oscillator
/// dx/dt = y - (x^3 - mu*x), dy/dt = -x (hopf, n=2).
struct NormalForm {
    std::size_t dim;
    numerics::Rhs rhs;
    std::function<numerics::Vector(const numerics::Vector&)> f;
    std::function<numerics::Matrix(const numerics::Vector&)> jacobian;
};
NormalForm normal_form(BifurcationKind kind, double mu);

/// Classification of a spectrum sitting at a stability boundary; exposed
/// for direct testing of the degenerate-crossing guard.
struct CrossingClass {
    BifurcationKind kind = BifurcationKind::none;
    bool degenerate = false;
    double real_abs = 0.0; // |Re| of the real eigenvalue nearest the axis
    double pair_abs = 0.0; // |Re| of the complex pair nearest the axis
    double gamma = 0.0;
};
CrossingClass classify_crossing_spectrum(const numerics::Spectrum& s, double eig_tol,
                                         double degenerate_sep);

} // namespace genodyn::bifurc
