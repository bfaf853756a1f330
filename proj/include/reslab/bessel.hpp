#pragma once

#include <complex>
#include <vector>

#include "reslab/scaled_value.hpp"

namespace reslab::bessel {

enum class Kind { J, Y, H1, H2, I, K };

// Batch evaluations cover every integer order 0..nu_max at one argument;
// the partial-wave sums consume whole ladders of orders at a fixed argument.
struct OrderRange {
    int nu_max = 0;
};

struct CylBatch {
    std::vector<ScaledValue> j, y, h1, h2; // index = order
};

struct ModBatch {
    std::vector<ScaledValue> i, k; // index = order
};

// J_nu, Y_nu, H1_nu, H2_nu at complex z on the principal branch
// (-pi < arg z <= pi; the negative real axis itself is reached only through
// continue_h1 and is rejected here). Validated envelope: |z| <= 2000,
// nu <= 3000, relative error <= 1e-12 away from the order/argument
// transition zone |z| ~ nu and <= 1e-9 inside it; for results whose
// log-modulus exceeds double range the same bounds apply to the scaled
// representation (log-modulus absolute-relative, phase mod 2pi).
ScaledValue eval_cyl(Kind kind, int nu, std::complex<double> z);

// I_nu, K_nu for Re z > 0; same accuracy contract.
ScaledValue eval_mod(Kind kind, int nu, std::complex<double> z);

// d/dz via the neighbor-order recurrences:
//   J,Y,H: C' = (C_{nu-1} - C_{nu+1})/2 with C_{-1} = -C_1
//   I:     I' = (I_{nu-1} + I_{nu+1})/2 with I_{-1} = I_1
//   K:     K' = -(K_{nu-1} + K_{nu+1})/2 with K_{-1} = K_1
ScaledValue derivative(Kind kind, int nu, std::complex<double> z);

// Analytic continuation of H^(1)_n along m half-turns of the argument:
//   H^(1)_n(z e^{im pi}) = (-1)^{mn} [ (1-m) H^(1)_n(z) - m H^(2)_n(z) ].
// m = 0 returns eval_cyl(H1, n, z) exactly.
ScaledValue continue_h1(int nu, std::complex<double> z, int m);

// Leading uniform large-order approximation of log(I_nu(nu tau)/K_nu(nu tau)):
//   2 nu eta - log pi,  eta = sqrt(1+tau^2) + log(tau/(1+sqrt(1+tau^2))).
// tau is restricted to the compact [1/window, window].
double debye_ratio(int nu, double tau, double window = 8.0);

CylBatch eval_cyl_batch(OrderRange orders, std::complex<double> z);
ModBatch eval_mod_batch(OrderRange orders, std::complex<double> z);

} // namespace reslab::bessel
