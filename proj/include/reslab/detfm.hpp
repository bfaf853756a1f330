#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "reslab/partialwave.hpp"

// Determinant functions f_m(lambda) = det(m S(lambda) - (m-1) I) in log form,
// as partial-wave sums sum_l mult(l) log(1 + m (s_l(lambda) - 1)) with
// certified truncation, along the three rays of interest (real axis,
// imaginary axis, arg lambda = pi), plus growth-exponent fitting.
namespace reslab::detfm {

namespace pw = reslab::partialwave;

struct DetConfig {
    double l_factor = 2.0;   // initial cut l_max = ceil(l_factor |lambda| R) + 40
    double tail_tol = 1e-10; // absolute bound on the discarded tail
    int max_l = 20000;       // hard cap before TruncationError
};

struct EvalInfo {
    int l_max_used = 0;
    double tail_estimate = 0.0;
};

// Principal log per factor. The imaginary part is the sum of per-factor
// principal arguments, NOT a continuously tracked branch of log det: every
// growth bound downstream consumes only the real part, so a global branch
// would buy nothing and cost a winding analysis.
std::complex<double> log_fm(const pw::BallProblem& p, int m, std::complex<double> lambda,
                            const DetConfig& cfg = {}, EvalInfo* info = nullptr);

// log |f_m(i sigma)| = (1/2) sum_l mult(l) log(1 + (m pi Q_l(sigma))^2); every
// summand is >= 0, which is what makes the imaginary axis the growth ray.
double log_abs_fm_imaginary(const pw::BallProblem& p, int m, double sigma,
                            const DetConfig& cfg = {}, EvalInfo* info = nullptr);

// Evaluation route for the ray arg lambda = pi.
enum class NegRayPath {
    Reflected, // sum_l mult(l) log|(m+1) - m conj(s_l(r))|, data from the positive axis
    Continued, // factors from Hankel functions continued through one half-turn
};

double log_abs_fm_negative_ray(const pw::BallProblem& p, int m, double r,
                               const DetConfig& cfg = {}, EvalInfo* info = nullptr,
                               NegRayPath path = NegRayPath::Reflected);

struct GrowthFit {
    double exponent = 0.0;  // least-squares slope of log y against log x
    double log_coeff = 0.0; // intercept
    double residual = 0.0;  // RMS residual of the fit
};

// Least squares on (log x, log y). Requires >= 6 samples with x > 0 spanning
// a factor >= 4 and y > 0; FitError otherwise.
GrowthFit fit_growth(const std::vector<std::pair<double, double>>& samples);

} // namespace reslab::detfm
