#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "reslab/detfm.hpp"
#include "reslab/logcover.hpp"
#include "reslab/partialwave.hpp"
#include "reslab/scaled_value.hpp"

// Resonances of the exterior ball problem on sheet m of the logarithmic
// cover, located through their Lambda_0 representatives: rotating a zero of
// the l-th spectral factor of det(m S - (m-1)) by m half-turns lands on the
// resonance. Zeros are boxed by the argument principle, refined by Newton,
// and assembled into counting functions n_m(r).
namespace reslab::resonances {

namespace pw = reslab::partialwave;

// Axis-aligned search rectangle of Lambda_0 representatives; the closed
// upper half-plane only. Contours are walked counterclockwise and nudged
// away from zeros automatically (see count_zeros).
struct SearchBox {
    double re_lo = 0.0;
    double re_hi = 0.0;
    double im_lo = 0.0;
    double im_hi = 0.0;

    double width() const { return re_hi - re_lo; }
    double height() const { return im_hi - im_lo; }
    double diameter() const;
    bool contains(std::complex<double> z, double margin = 0.0) const;
};

using ScalarFn = std::function<ScaledValue(std::complex<double>)>;
// {value, d/dlambda}; Newton refinement needs the analytic derivative.
using JetFn = std::function<std::array<ScaledValue, 2>(std::complex<double>)>;
// Local upper bound on |f'/f|, used to choose the initial contour step so a
// full phase turn can never hide between consecutive samples. Empty means a
// constant conservative step.
using SpeedHint = std::function<double(std::complex<double>)>;

// g_{l,m}(lambda) = m B[H2](lambda) + (m-1) B[H1](lambda) at order nu(l).
// Up to the nonvanishing factor -B[H1] this is the l-th spectral factor
// 1 + m (s_l - 1), so its zeros in the open upper half-plane are exactly the
// sheet-m resonances contributed by angular momentum l. Domain: m >= 1,
// Im lambda >= 0, lambda not on the closed negative real ray.
ScaledValue sheet_function(const pw::BallProblem& p, int l, int m,
                           std::complex<double> lambda);
// Same with d/dlambda, assembled from neighbor-order recurrences.
std::array<ScaledValue, 2> sheet_function_jet(const pw::BallProblem& p, int l, int m,
                                              std::complex<double> lambda);

// Number of zeros of fn inside the box, with multiplicity: the winding
// number of fn over the boundary, tracked by adaptive phase steps that are
// bisected until every increment is below pi/2. A zero within ~1e-6 of the
// contour triggers up to three outward perturbations by 1e-4 * diameter;
// ContourError when those run out, AccuracyError when the walk exhausts its
// evaluation budget or fails to close (a pole inside does both).
int count_zeros(const ScalarFn& fn, const SearchBox& box,
                const SpeedHint& speed = {});

struct Refined {
    std::complex<double> zero;
    int order = 0;
};

// Newton iteration from the seed until |step| < tol (50 iterations cap,
// NoConvergence past it); the zero's order is then read off as the winding
// of fn around a tiny circle centered at the refined point. Stagnating step
// ratios are detected and the step is re-scaled by the implied multiplicity,
// which keeps multiple zeros within the iteration cap.
Refined refine_zero(const JetFn& fn, std::complex<double> seed, double tol = 1e-11);

struct ResonanceRecord {
    logcover::LogPoint location;   // on sheet m: arg in (m pi, (m+1) pi)
    int l = 0;                     // angular momentum of the vanishing factor
    int zero_order = 1;
    std::int64_t total_mult = 1;   // zero_order * multiplicity(l, d)
    double residual_log10 = 0.0;   // log10 |g_{l,m}| at the refined point
    bool merged = false;           // coincident zeros of different l folded in
};

struct SearchReport {
    int l_last = -1;               // second of the two consecutive empty l
    long long boxes_counted = 0;
    long long boxes_errored = 0;
    bool partial = false;          // some box or refinement gave up
    bool count_mismatch = false;   // contour counts vs refined orders disagree
    int merged_records = 0;
    long long dropped_mult = 0;    // multiplicity refined outside |lambda| <= r_max
    // (l, argument-principle count over the searched region), examined l only
    std::vector<std::pair<int, long long>> per_l;
};

// All resonances on sheet m with modulus <= r_max (search boxes cover the
// half-disk {|lambda| <= r_max, Im lambda > 0}; zeros refined in the box
// corners beyond r_max are dropped and tallied in SearchReport.dropped_mult,
// so sum over per_l of count * mult(l) = sum of total_mult + dropped_mult).
// m <= -1 is produced from |m| by the arg -> -arg reflection of the record
// pattern, with identical moduli and multiplicities. Deterministic: ordering
// is by l, then modulus, regardless of the worker count.
std::vector<ResonanceRecord> find_resonances(const pw::BallProblem& p, int m,
                                             double r_max,
                                             SearchReport* report = nullptr);

struct CountingTable {
    int sheet_m = 0;
    std::vector<double> r_grid;
    std::vector<std::int64_t> counts; // n_m(r): multiplicity-weighted, |lambda| < r
    detfm::GrowthFit fit{};
    bool fit_valid = false;           // fit needs >= 6 positive counts, 4x span
};

// Cumulative counting function over an increasing grid, with a power-law fit
// through the positive entries when the grid supports one.
CountingTable counting_function(int m, const std::vector<ResonanceRecord>& records,
                                const std::vector<double>& r_grid);

} // namespace reslab::resonances
