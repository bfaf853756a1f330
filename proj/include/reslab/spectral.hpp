#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "reslab/detfm.hpp"
#include "reslab/partialwave.hpp"

// Real-axis spectral checks: continuously unwrapped scattering phases against
// the Weyl volume term, eigenphase-defect sums, the interior Laplacian
// spectrum, and the behaviour of the scattering coefficients at interior
// eigenvalues and at lambda -> 0. Everything is diagonal per angular
// momentum; sums weight each l by the spherical-harmonic multiplicity.
namespace reslab::spectral {

namespace pw = reslab::partialwave;

struct SpectralConfig {
    detfm::DetConfig det{};     // l-truncation policy, shared with the determinants
    // Largest accepted single-step phase increment while unwrapping. Must stay
    // below pi/2: the true increment between accepted samples is then provably
    // free of hidden full turns (step sizes are capped at 1/(2R) so the phase
    // derivative bound ~2R keeps raw increments under pi).
    double max_increment = 1.4;
    long long max_phase_evals = 4'000'000; // per-trace budget, UnwrapError beyond
};

// Unwrapped eigenphase Theta_l along the positive real axis: continuous in r,
// Theta_l(0+) = 0, folded value agrees with eigenphase() at every grid point.
struct PhaseTrace {
    int l = 0;
    std::vector<double> r;     // the requested grid, strictly increasing
    std::vector<double> theta; // unwrapped phase at each grid point
};

PhaseTrace phase_trace(const pw::BallProblem& p, int l, const std::vector<double>& r_grid,
                       const SpectralConfig& cfg = {});

// Total scattering phase phi(r) = (1/2pi) sum_l mult(l) Theta_l(r).
double scattering_phase(const pw::BallProblem& p, double r, const SpectralConfig& cfg = {});

// phi(r) against the Weyl term -c_d vol(ball) r^d on a grid. c_weyl is
// (2pi)^{-d} omega_d^2 R^d; c_interior_fit recovers the same constant from a
// two-parameter fit c r^d + b r^{d-1} to the interior eigenvalue count, and
// the two must agree within 5% (AccuracyError otherwise).
struct WeylReport {
    std::vector<double> r_grid;
    std::vector<double> phase;      // phi(r)
    std::vector<double> weyl_term;  // -c_weyl r^d
    std::vector<double> defect;     // phase - weyl_term
    std::vector<double> normalized; // defect / r^{d-1}
    double c_weyl = 0.0;
    double c_interior_fit = 0.0;
    int l_max_used = 0;
};

WeylReport weyl_report(const pw::BallProblem& p, const std::vector<double>& r_grid,
                       const SpectralConfig& cfg = {});

// sum_l mult(l) |theta_l(r)| with theta folded to (-pi, pi], i.e. the summed
// distance of the S-matrix spectrum to 1 measured along the unit circle.
double phase_defect_sum(const pw::BallProblem& p, double r, const SpectralConfig& cfg = {});

struct InteriorEigenvalue {
    double lambda0 = 0.0; // sqrt of an interior Laplacian eigenvalue
    int l = 0;
    std::int64_t mult = 1;
};

// All zeros of the interior characteristic functional on (0, r_max], every
// angular momentum, sorted by lambda0 then l. Sign-change bisection on a grid
// of step pi/(4R), which cannot skip the >= pi-spaced zeros.
std::vector<InteriorEigenvalue> interior_eigenvalues(const pw::BallProblem& p, double r_max);

struct DualitySample {
    double delta = 0.0;
    std::complex<double> e; // S-matrix eigenvalue branch s_l near the zero
};

// Trace of s_l approaching the k-th interior zero lambda0 of angular momentum
// l: Dirichlet walks in from below (lambda0 - delta), Robin (incl. Neumann)
// from above (lambda0 + delta). The caller asserts the approach direction
// properties; this only evaluates the trace.
std::vector<DualitySample> duality_probe(const pw::BallProblem& p, int l, int k,
                                         const std::vector<double>& deltas);

struct ZeroLimitRow {
    double epsilon = 0.0;
    double deviation = 0.0; // max over l <= 3 of |s_l(epsilon) - 1|
};

// Decay of the S-matrix toward the identity at the bottom of the spectrum.
std::vector<ZeroLimitRow> s_zero_limit(const pw::BallProblem& p,
                                       const std::vector<double>& epsilons);

} // namespace reslab::spectral
