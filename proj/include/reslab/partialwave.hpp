#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "reslab/bessel.hpp"
#include "reslab/scaled_value.hpp"

// Reduction of the exterior ball problem to per-angular-momentum scalar
// scattering coefficients. Everything here is diagonal in the spherical
// harmonic basis: for each angular momentum l there is one scattering
// coefficient s_l(lambda) repeated mult(l) times in the S-matrix spectrum.
namespace reslab::partialwave {

enum class BoundaryKind { Dirichlet, Robin };

// Robin(0) is the Neumann condition. The Robin constant h0 is the value of
// the (constant) boundary function times the radius, i.e. the boundary
// function on the sphere of radius R is h0/R.
struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::Dirichlet;
    double h0 = 0.0;

    static BoundaryCondition dirichlet() { return {BoundaryKind::Dirichlet, 0.0}; }
    static BoundaryCondition robin(double h0);   // requires h0 >= 0
    static BoundaryCondition neumann() { return robin(0.0); }
    bool is_dirichlet() const { return kind == BoundaryKind::Dirichlet; }
};

// Exterior of the ball of radius R in even dimension d with the chosen
// boundary condition. Immutable after construction; construction validates.
struct BallProblem {
    int dim;
    double radius;
    BoundaryCondition bc;

    BallProblem(int dim, double radius, BoundaryCondition bc);

    // cylinder order of angular momentum l: nu = l - 1 + d/2
    int nu_of(int l) const { return l - 1 + dim / 2; }
};

struct PartialWave {
    int l = 0;
    int nu = 0;            // l - 1 + d/2
    std::int64_t mult = 1; // dimension of the degree-l spherical harmonic space
};

// Dimension of the space of degree-l spherical harmonics on S^{d-1}.
// d = 2 counts circle harmonics (1, 2, 2, ...); exact integer arithmetic,
// AccuracyError if the count exceeds the int64 range.
std::int64_t multiplicity(int l, int d);

PartialWave wave(const BallProblem& p, int l);

// Boundary functional applied to one cylinder family C at order nu(l):
//   Dirichlet:  B[C](lambda) = C_nu(lambda R)
//   Robin(h0):  B[C](lambda) = (h0 + (d-2)/2) C_nu(lambda R) - lambda R C'_nu(lambda R)
// The (d-2)/2 shift comes from the radial factor r^{-(d-2)/2}; the minus sign
// from the outward normal of the exterior domain pointing toward the origin.
ScaledValue boundary_functional(const BallProblem& p, bessel::Kind family, int l,
                                std::complex<double> lambda);

// Boundary functionals for every l = 0..l_max at one argument, sharing a
// single batched cylinder evaluation.
struct WaveCoeffs {
    std::vector<ScaledValue> bj, bh1, bh2; // indexed by l
};
WaveCoeffs wave_coeffs(const BallProblem& p, int l_max, std::complex<double> lambda);

// Scattering coefficient s_l(lambda) = -B[H2](lambda) / B[H1](lambda).
// Unimodular on the positive real axis. PoleError when B[H1] vanishes to
// tolerance (|s| would exceed 1e280): lambda sits on a resonance of an
// adjacent sheet, which the caller must treat as data, not as a crash.
std::complex<double> s_coefficient(const BallProblem& p, int l,
                                   std::complex<double> lambda);

// s_l(lambda) - 1 = -2 B[J](lambda) / B[H1](lambda), exactly equivalent
// (H1 + H2 = 2J) but free of the 1 - s cancellation, which is what makes the
// lambda -> 0 limit and the imaginary axis usable.
ScaledValue s_minus_one(const BallProblem& p, int l, std::complex<double> lambda);

// Real ratio Q_l(sigma) in s_l(i sigma) = 1 - i pi (-1)^nu Q_l(sigma):
//   Dirichlet:  Q = I_nu(sigma R) / K_nu(sigma R)
//   Robin(h0):  Q = [(h0+(d-2)/2) I_nu - sigma R I'_nu]
//             / [(h0+(d-2)/2) K_nu - sigma R K'_nu]   (all at sigma R)
// Returned as a signed real in log scale (Robin numerators change sign once
// sigma R outgrows h0 + (d-2)/2). Orders nu > debye_order with
// tau = sigma R / nu inside the Debye window use the closed-form leading
// asymptotic of log(I/K) instead of direct evaluation.
ScaledValue q_ratio_imaginary(const BallProblem& p, int l, double sigma,
                              int debye_order = 400);
std::vector<ScaledValue> q_ratio_batch(const BallProblem& p, int l_max, double sigma,
                                       int debye_order = 400);

// s_l(i sigma) assembled from q_ratio_imaginary; Re = 1 identically.
std::complex<double> s_on_imaginary(const BallProblem& p, int l, double sigma,
                                    int debye_order = 400);

struct EigenPhase {
    double theta = 0.0; // in (-pi, pi]
};

// theta(r) = arg s_l(r) folded to (-pi, pi].
EigenPhase eigenphase(const BallProblem& p, int l, double r);

// Folded eigenphases for l = 0..l_max at one r, one batched evaluation.
std::vector<double> eigenphase_batch(const BallProblem& p, int l_max, double r);

// Characteristic function of the interior problem: B[J](lambda). Its zeros on
// (0, inf) are the square roots of interior Laplacian eigenvalues with the
// same boundary condition.
ScaledValue interior_char(const BallProblem& p, int l, std::complex<double> lambda);

} // namespace reslab::partialwave
