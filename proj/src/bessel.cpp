#include "reslab/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "dd.hpp"
#include "reslab/errors.hpp"

namespace reslab::bessel {
namespace {

using cplx = std::complex<double>;

// Regime switch radii. Validated against the multiprecision oracle suite;
// each boundary is placed where the error of the incoming method still has
// two digits of headroom against the contract.
constexpr double kSeriesRadius = 8.0;   // ascending series at or below |z|
constexpr double kStripHeight = 1.75;   // J+iY assembly at or below Im z
constexpr double kKSeriesRadius = 17.5; // dd ascending K series at or below
constexpr double kRescale = 1e-250;
const double kRescaleLn = -std::log(kRescale);

// Kahan-compensated complex accumulator.
struct Accum {
    cplx sum{0.0, 0.0}, c{0.0, 0.0};
    void add(cplx t) {
        cplx y = t - c;
        cplx s = sum + y;
        c = (s - sum) - y;
        sum = s;
    }
    void rescale(double f) {
        sum *= f;
        c *= f;
    }
};

void check_finite(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("bessel: non-finite argument");
}

void check_cyl_domain(cplx z) {
    check_finite(z);
    if (z == cplx(0.0, 0.0)) throw DomainError("bessel: argument must be nonzero");
    if (z.imag() == 0.0 && z.real() < 0.0)
        throw DomainError("bessel: negative real axis reached only via continue_h1");
    if (std::abs(z) > 1e6)
        throw AccuracyError("bessel: |z| beyond validated envelope (~1e-12 up to 2000)");
}

void check_mod_domain(cplx z) {
    check_finite(z);
    if (!(z.real() > 0.0))
        throw DomainError("bessel: modified kinds need Re z > 0");
    if (std::abs(z) > 1e6)
        throw AccuracyError("bessel: |z| beyond validated envelope (~1e-12 up to 2000)");
}

void check_orders(int nu_max) {
    if (nu_max < 0) throw DomainError("bessel: order must be >= 0");
    if (nu_max > 500000)
        throw AccuracyError("bessel: order beyond validated envelope (~1e-12 up to 3000)");
}

ScaledValue sv_from_parts(cplx v, double extra_lm, double extra_ph) {
    // v == 0 can only arise from catastrophic underflow of a stored carrier;
    // the true value is then below the batch's noise floor.
    if (v == cplx(0.0, 0.0)) return ScaledValue::zero();
    return ScaledValue(std::log(std::abs(v)) + extra_lm, std::arg(v) + extra_ph);
}

// log of the leading series/decay envelope (x/2)^n / n!
double env(double n, double x) { return n * std::log(x / 2.0) - std::lgamma(n + 1.0); }

// Start order for the backward recurrence: high enough that the admixture of
// the dominant solution decays below 1e-22 relative by the time the needed
// orders are reached. The envelope ratio (J_s/Y_s)*(Y_n/J_n) ~
// e^{2 env(s)} * e^{-2 min(env(n),0)} drives the bound.
int miller_start(double x, int top) {
    double cap = std::min(0.0, env(std::max<double>(top, std::ceil(x)), x));
    double s = std::max<double>(top, 1.30 * x) + 8.0;
    while (env(s, x) > cap - 26.0) {
        s = s * 1.06 + 6.0;
        if (s > 4e6) throw AccuracyError("bessel: recurrence start out of range");
    }
    return static_cast<int>(s);
}

// Smallest order from which J_n(x) stays below e^{-45} of unit scale; the
// Neumann sums for Y_0/Y_1 truncate there.
int neumann_top(double x) {
    int n = static_cast<int>(std::ceil(1.36 * x)) + 6;
    while (env(n, x) > -45.0) n = static_cast<int>(n * 1.10) + 4;
    return n;
}

// --- ascending series ------------------------------------------------------

// J_n (w = -z^2/4) or I_n (w = +z^2/4): (z/2)^n/n! * sum_k u_k,
// u_0 = 1, u_k = u_{k-1} w/(k(n+k)). Used at or below |z| = 8 where the
// alternating-sum amplification stays under ~1e3.
ScaledValue series_ji(int n, cplx z, bool modified) {
    cplx w = z * z / 4.0;
    if (!modified) w = -w;
    Accum s;
    cplx u{1.0, 0.0};
    s.add(u);
    double peak = 1.0;
    for (int k = 1; k <= 400; ++k) {
        u *= w / (static_cast<double>(k) * (static_cast<double>(n) + k));
        s.add(u);
        double m = std::abs(u);
        peak = std::max(peak, m);
        if (m <= 1e-20 * peak && static_cast<double>(k) * (n + k) > std::abs(w)) break;
    }
    double lm = env(n, std::abs(z));
    double ph = n * std::arg(z);
    if (s.sum == cplx(0.0, 0.0)) return ScaledValue::zero();
    return ScaledValue(lm + std::log(std::abs(s.sum)), ph + std::arg(s.sum));
}

// Y_0 and Y_1 by the integer-order logarithmic series, |z| <= 8.
//   Y_0 = (2/pi) [ (log(z/2)+g) S0 - SH0 ]
//   Y_1 = (2/pi) (z/2) [ (log(z/2)+g) S1 - SH1 ] - 2/(pi z)
// with S_n = sum u_k, SH_n = sum u_k (H_k + H_{n+k})/2, u_k as in series_ji
// with w = -z^2/4, H_k the harmonic numbers.
std::pair<cplx, cplx> y01_series(cplx z) {
    cplx w = -z * z / 4.0;
    Accum s0, sh0, s1, sh1;
    cplx u0{1.0, 0.0}, u1{1.0, 0.0};
    double h = 0.0; // H_k
    s0.add(u0);
    s1.add(u1);
    sh1.add(u1 * 0.5); // k = 0 carries (H_0 + H_1)/2 = 1/2
    double peak = 1.0;
    for (int k = 1; k <= 400; ++k) {
        double dk = k;
        u0 *= w / (dk * dk);
        u1 *= w / (dk * (dk + 1.0));
        double hk = h + 1.0 / dk;
        s0.add(u0);
        sh0.add(u0 * hk);
        s1.add(u1);
        sh1.add(u1 * (hk + (hk + 1.0 / (dk + 1.0))) * 0.5);
        h = hk;
        double m = std::abs(u0);
        peak = std::max(peak, m);
        if (m <= 1e-20 * peak && dk * dk > std::abs(w)) break;
    }
    const double g = 0.57721566490153286; // Euler gamma
    cplx L = std::log(z / 2.0) + g;
    cplx y0 = (2.0 / M_PI) * (L * s0.sum - sh0.sum);
    cplx y1 = (2.0 / M_PI) * (z / 2.0) * (L * s1.sum - sh1.sum) - 2.0 / (M_PI * z);
    return {y0, y1};
}

// --- backward recurrence (minimal solutions J and I) ------------------------

struct BackwardOut {
    std::vector<ScaledValue> v;
    std::vector<cplx> plain; // filled only when requested (strip mode)
};

// Normalized backward recurrence for the minimal solution.
//   cyl:  p_{n-1} = (2n/z) p_n - p_{n+1},  sum (-i)^n-weighted -> e^{-iz}
//   mod:  p_{n-1} = (2n/z) p_n + p_{n+1},  plain sum           -> e^{z}
// Requires Im z >= 0 for cyl (the normalizer e^{-iz} then matches the
// largest member, so the sum cannot cancel catastrophically); Re z > 0 for
// mod for the same reason.
BackwardOut backward_minimal(cplx z, int store_top, bool modified, bool want_plain) {
    namespace d = reslab::dd;
    const double x = std::abs(z);
    const int start = miller_start(x, store_top);
    BackwardOut out;
    std::vector<cplx> sv(store_top + 1);
    std::vector<double> off(store_top + 1);
    // Double-double carriers: the oscillatory stretch n < |z| is only
    // marginally stable, and plain doubles drift by ~steps*eps, which at
    // |z| ~ 2000 costs most of the 1e-12 budget.
    const d::CDD two_over_z = d::div(d::CDD{{2.0, 0.0}, {0.0, 0.0}}, d::from_complex(z));
    d::CDD p_up{{0.0, 0.0}, {0.0, 0.0}};
    d::CDD p_cur{{1.0, 0.0}, {0.0, 0.0}};
    d::CDD norm{{0.0, 0.0}, {0.0, 0.0}};
    double o = 0.0;
    double max_term = 0.0;
    for (int n = start; n >= 0; --n) {
        if (n <= store_top) {
            sv[n] = d::to_complex(p_cur);
            off[n] = o;
        }
        d::CDD t; // coeff * p_cur with coeff = 1 (n=0), 2 (mod), 2(-i)^n (cyl)
        if (n == 0) {
            t = p_cur;
        } else if (modified) {
            t = d::mul(p_cur, 2.0);
        } else {
            switch (n & 3) {
                case 0: t = d::mul(p_cur, 2.0); break;
                case 1: t = d::CDD{d::mul(p_cur.im, 2.0), d::mul(p_cur.re, -2.0)}; break;
                case 2: t = d::mul(p_cur, -2.0); break;
                default: t = d::CDD{d::mul(p_cur.im, -2.0), d::mul(p_cur.re, 2.0)}; break;
            }
        }
        max_term = std::max(max_term, std::abs(d::to_complex(t)));
        norm = d::add(norm, t);
        if (n == 0) break;
        d::CDD p_down = d::mul(d::mul(two_over_z, static_cast<double>(n)), p_cur);
        p_down = modified ? d::add(p_down, p_up) : d::sub(p_down, p_up);
        p_up = p_cur;
        p_cur = p_down;
        if (d::abs_hi(p_cur) > 1e250) {
            p_cur = d::mul(p_cur, kRescale);
            p_up = d::mul(p_up, kRescale);
            norm = d::mul(norm, kRescale);
            max_term *= kRescale;
            o += kRescaleLn;
        }
    }
    cplx nsum = d::to_complex(norm);
    if (!(std::abs(nsum) > 1e-13 * max_term))
        throw AccuracyError("bessel: backward recurrence normalizer cancelled");
    const double lnN = std::log(std::abs(nsum));
    const double argN = std::arg(nsum);
    // normalizer: e^{-iz} for cyl, e^{z} for mod
    const double norm_lm = modified ? z.real() : z.imag();
    const double norm_ph = modified ? z.imag() : -z.real();
    out.v.resize(store_top + 1);
    for (int n = 0; n <= store_top; ++n)
        out.v[n] = sv_from_parts(sv[n], off[n] - o - lnN + norm_lm, -argN + norm_ph);
    if (want_plain) {
        out.plain.resize(store_top + 1);
        const cplx rot = std::polar(1.0, norm_ph - argN);
        for (int n = 0; n <= store_top; ++n)
            out.plain[n] = sv[n] * (std::exp(off[n] - o - lnN + norm_lm) * rot);
    }
    return out;
}

// --- forward recurrence (dominant solutions Y and K) ------------------------

// f_{n+1} = (2n/z) f_n - sign * f_{n-1}; sign = +1 for the cylinder family,
// -1 for K. Forward is the stable direction for these.
std::vector<ScaledValue> forward_dominant(cplx z, ScaledValue f0, ScaledValue f1,
                                          int top, double sign) {
    namespace d = reslab::dd;
    std::vector<ScaledValue> out(static_cast<size_t>(top) + 1);
    out[0] = f0;
    if (top >= 1) out[1] = f1;
    if (top <= 1) return out;
    double o = std::max(f0.log_modulus(), f1.log_modulus());
    auto rep = [o](const ScaledValue& f) {
        double dl = f.log_modulus() - o;
        return dl < -745.0 ? cplx(0.0, 0.0) : std::polar(std::exp(dl), f.phase());
    };
    // dd carriers for the same reason as in backward_minimal: the n < |z|
    // stretch of the cylinder ladder is oscillatory and drifts in doubles.
    d::CDD v0 = d::from_complex(rep(f0));
    d::CDD v1 = d::from_complex(rep(f1));
    // 2/z in the exactly-scaled form base * 2^{-e}: the direct dd quotient's
    // denominator |z|^2 underflows once |z| < ~1e-154, and frexp/ldexp
    // scaling costs no precision.
    int e = 0;
    (void)std::frexp(std::abs(z), &e);
    const cplx zs(std::ldexp(z.real(), -e), std::ldexp(z.imag(), -e));
    const d::CDD base = d::div(d::CDD{{2.0, 0.0}, {0.0, 0.0}}, d::from_complex(zs));
    auto scale2 = [](d::CDD v, int k) {
        return d::CDD{{std::ldexp(v.re.hi, k), std::ldexp(v.re.lo, k)},
                      {std::ldexp(v.im.hi, k), std::ldexp(v.im.lo, k)}};
    };
    // One step multiplies by up to |2n/z|, which at tiny |z| dwarfs any fixed
    // headroom; cap the carrier so a single step can never overflow. For
    // ordinary arguments the cap sits at 1e250 and this is a plain threshold
    // rescale.
    const double step_hi = std::ldexp(4.0, -e) * top;
    if (!std::isfinite(step_hi))
        throw AccuracyError("bessel: |z| too small for the dominant-family ladder");
    const double cap = std::min(1e250, 1e290 / std::max(1.0, step_hi));
    // Rescales can fire every step at tiny |z|; counting them and forming the
    // offset in one multiply keeps the log-modulus error at a single rounding
    // instead of an accumulated one.
    long rescales = 0;
    for (int n = 1; n < top; ++n) {
        while (d::abs_hi(v1) > cap || d::abs_hi(v0) > cap) {
            v0 = d::mul(v0, kRescale);
            v1 = d::mul(v1, kRescale);
            ++rescales;
        }
        d::CDD t = scale2(d::mul(base, d::mul(v1, static_cast<double>(n))), -e);
        d::CDD v2 = sign > 0.0 ? d::sub(t, v0) : d::add(t, v0);
        v0 = v1;
        v1 = v2;
        out[n + 1] =
            sv_from_parts(d::to_complex(v1), o + static_cast<double>(rescales) * kRescaleLn, 0.0);
    }
    return out;
}

// --- K_0, K_1 ---------------------------------------------------------------

// Ascending series in double-double, |z| <= 17.5, Re z > 0:
//   K_0 = -(log(z/2)+g) S0 + SH0
//   K_1 = 1/z + (z/2) [ (log(z/2)+g) S1 - SH1 ]
// with w = +z^2/4, S_n = sum w^k/(k!(n+k)!), SH_n the (H_k+H_{n+k})/2
// weighted sums. The two pieces cancel like e^{2|z|}, hence the dd carrier.
std::pair<ScaledValue, ScaledValue> k01_series(cplx z) {
    namespace d = reslab::dd;
    d::CDD w = d::mul(d::square_exact(z), 0.25);
    d::CDD u0{{1.0, 0.0}, {0.0, 0.0}}, u1 = u0;
    d::CDD s0 = u0, sh0{{0.0, 0.0}, {0.0, 0.0}}, s1 = u1;
    d::CDD sh1 = d::mul(u1, 0.5); // k = 0 carries (H_0 + H_1)/2 = 1/2
    d::DD h{0.0, 0.0};
    double peak = 1.0;
    for (int k = 1; k <= 500; ++k) {
        double dk = k;
        u0 = d::div(d::mul(u0, w), dk * dk);
        u1 = d::div(d::mul(u1, w), dk * (dk + 1.0));
        d::DD hk = d::add(h, d::inv(dk));
        d::DD hk1 = d::add(hk, d::inv(dk + 1.0));
        s0 = d::add(s0, u0);
        sh0 = d::add(sh0, d::mul(u0, hk));
        s1 = d::add(s1, u1);
        sh1 = d::add(sh1, d::mul(u1, d::mul(d::add(hk, hk1), 0.5)));
        h = hk;
        double m = d::abs_hi(u0);
        peak = std::max(peak, m);
        if (m <= 1e-36 * peak && dk * dk > std::abs(w.re.hi) + std::abs(w.im.hi)) break;
    }
    d::CDD L = d::log_accurate(z * 0.5);
    d::CDD Lg{d::add(L.re, d::kEulerGamma), L.im};
    d::CDD k0 = d::sub(sh0, d::mul(Lg, s0));
    d::CDD half_z = d::from_complex(z * 0.5);
    d::CDD k1 = d::mul(half_z, d::sub(d::mul(Lg, s1), sh1));
    k1 = d::add(k1, d::div(d::CDD{{1.0, 0.0}, {0.0, 0.0}}, d::from_complex(z)));
    return {ScaledValue::from_complex(d::to_complex(k0)),
            ScaledValue::from_complex(d::to_complex(k1))};
}

// Large-argument expansion sqrt(pi/2z) e^{-z} sum_k a_k(nu)/z^k for nu = 0,1;
// |z| >= 17.5 puts the smallest term near e^{-2|z|} ~ 6e-16, inside contract.
ScaledValue k_asym(int nu, cplx z) {
    const double fournu2 = 4.0 * nu * nu;
    Accum s;
    cplx u{1.0, 0.0};
    s.add(u);
    double prev = 1.0;
    for (int k = 1; k <= 80; ++k) {
        double odd = 2.0 * k - 1.0;
        u *= (fournu2 - odd * odd) / (8.0 * k);
        u /= z;
        double m = std::abs(u);
        if (m > prev) break; // asymptotic tail turned; stop at the minimum
        s.add(u);
        prev = m;
        if (m < 1e-18) break;
    }
    double lm = -z.real() + 0.5 * (std::log(M_PI / 2.0) - std::log(std::abs(z)));
    double ph = -z.imag() - 0.5 * std::arg(z);
    return ScaledValue(lm + std::log(std::abs(s.sum)), ph + std::arg(s.sum));
}

std::pair<ScaledValue, ScaledValue> k01(cplx z) {
    if (std::abs(z) <= kKSeriesRadius) return k01_series(z);
    return {k_asym(0, z), k_asym(1, z)};
}

// --- batches (upper half-plane core) ----------------------------------------

std::vector<ScaledValue> j_batch_upper(cplx z, int top, bool want_plain,
                                       std::vector<cplx>* plain_out) {
    if (std::abs(z) <= kSeriesRadius) {
        std::vector<ScaledValue> j(static_cast<size_t>(top) + 1);
        for (int n = 0; n <= top; ++n) j[n] = series_ji(n, z, false);
        if (want_plain) {
            plain_out->resize(top + 1);
            for (int n = 0; n <= top; ++n) (*plain_out)[n] = j[n].to_complex();
        }
        return j;
    }
    BackwardOut b = backward_minimal(z, top, false, want_plain);
    if (want_plain) *plain_out = std::move(b.plain);
    return std::move(b.v);
}

// Full cylinder batch for Im z >= 0. need_yh skips the Y/H ladder when only
// J is wanted.
CylBatch cyl_batch_upper(cplx z, int nu_max, bool need_yh) {
    CylBatch out;
    const bool strip = z.imag() <= kStripHeight;
    if (!need_yh) {
        out.j = j_batch_upper(z, nu_max, false, nullptr);
        return out;
    }
    if (strip) {
        cplx y0, y1;
        if (std::abs(z) <= kSeriesRadius) {
            out.j = j_batch_upper(z, nu_max, false, nullptr);
            std::tie(y0, y1) = y01_series(z);
        } else {
            std::vector<cplx> jplain;
            int top = std::max(nu_max, neumann_top(std::abs(z)));
            out.j = j_batch_upper(z, top, true, &jplain);
            out.j.resize(nu_max + 1);
            // Neumann sums assembled from the same backward pass:
            //   Y_0 = (2/pi)(log(z/2)+g) J_0 - (4/pi) sum (-1)^k J_{2k}/k
            //   Y_1 = (2/pi)[(log(z/2)+g) J_1 - J_0/z]
            //       + (2/pi) sum (-1)^k (J_{2k-1} - J_{2k+1})/k
            const double g = 0.57721566490153286;
            cplx L = std::log(z / 2.0) + g;
            Accum s0, s1;
            for (int k = 1; 2 * k + 1 < static_cast<int>(jplain.size()); ++k) {
                double sgn = (k & 1) ? -1.0 : 1.0;
                s0.add(sgn * jplain[2 * k] / static_cast<double>(k));
                s1.add(sgn * (jplain[2 * k - 1] - jplain[2 * k + 1]) /
                       static_cast<double>(k));
            }
            y0 = (2.0 / M_PI) * L * jplain[0] - (4.0 / M_PI) * s0.sum;
            y1 = (2.0 / M_PI) * (L * jplain[1] - jplain[0] / z) +
                 (2.0 / M_PI) * s1.sum;
        }
        out.y = forward_dominant(z, ScaledValue::from_complex(y0),
                                 ScaledValue::from_complex(y1), std::max(nu_max, 1),
                                 1.0);
        out.y.resize(nu_max + 1);
        out.h1.resize(nu_max + 1);
        out.h2.resize(nu_max + 1);
        const cplx iu{0.0, 1.0};
        for (int n = 0; n <= nu_max; ++n) {
            // Plain assembly when both parts fit in doubles: the scaled add
            // differences two phases of size ~|Re z|, whose rounding quantum
            // at |z| ~ 2000 already eats most of the 1e-12 budget.
            if (out.j[n].representable() && out.y[n].representable()) {
                cplx jv = out.j[n].to_complex();
                cplx yv = out.y[n].to_complex();
                out.h1[n] = ScaledValue::from_complex(jv + iu * yv);
                out.h2[n] = ScaledValue::from_complex(jv - iu * yv);
            } else {
                ScaledValue iy = out.y[n].scaled_by(iu);
                out.h1[n] = out.j[n].add(iy);
                out.h2[n] = out.j[n].sub(iy);
            }
        }
        return out;
    }
    // Im z > strip: H1 through K on the rotated argument, where it is the
    // decaying solution; then H2 = 2J - H1 and Y = i(J - H1), both
    // cancellation-free because |H1| << |J| here.
    out.j = j_batch_upper(z, nu_max, false, nullptr);
    cplx zeta{z.imag(), -z.real()}; // -iz, Re > kStripHeight
    auto [kk0, kk1] = k01(zeta);
    std::vector<ScaledValue> kb =
        forward_dominant(zeta, kk0, kk1, std::max(nu_max, 1), -1.0);
    out.h1.resize(nu_max + 1);
    out.h2.resize(nu_max + 1);
    out.y.resize(nu_max + 1);
    const double ln_2_over_pi = std::log(2.0 / M_PI);
    const cplx iu{0.0, 1.0};
    for (int n = 0; n <= nu_max; ++n) {
        // H1_n(z) = (2/pi) i^{-n-1} K_n(-iz)
        out.h1[n] = ScaledValue(kb[n].log_modulus() + ln_2_over_pi,
                                kb[n].phase() - (n + 1) * M_PI_2);
        out.h2[n] = out.j[n].scaled_by_real(2.0).sub(out.h1[n]);
        out.y[n] = out.j[n].sub(out.h1[n]).scaled_by(iu);
    }
    return out;
}

CylBatch conj_batch(CylBatch b) {
    CylBatch out;
    auto conj_all = [](std::vector<ScaledValue>& v) {
        for (auto& s : v) s = s.conj();
    };
    out.j = std::move(b.j);
    out.y = std::move(b.y);
    out.h1 = std::move(b.h2); // conj swaps the Hankel pair
    out.h2 = std::move(b.h1);
    conj_all(out.j);
    conj_all(out.y);
    conj_all(out.h1);
    conj_all(out.h2);
    return out;
}

CylBatch cyl_batch_impl(int nu_max, cplx z, bool need_yh) {
    check_cyl_domain(z);
    check_orders(nu_max);
    if (z.imag() < 0.0) return conj_batch(cyl_batch_upper(std::conj(z), nu_max, need_yh));
    return cyl_batch_upper(z, nu_max, need_yh);
}

ModBatch mod_batch_upper(cplx z, int nu_max, bool need_i, bool need_k) {
    ModBatch out;
    if (need_i) {
        if (std::abs(z) <= kSeriesRadius) {
            out.i.resize(static_cast<size_t>(nu_max) + 1);
            for (int n = 0; n <= nu_max; ++n) out.i[n] = series_ji(n, z, true);
        } else {
            out.i = backward_minimal(z, nu_max, true, false).v;
        }
    }
    if (need_k) {
        auto [kk0, kk1] = k01(z);
        out.k = forward_dominant(z, kk0, kk1, std::max(nu_max, 1), -1.0);
        out.k.resize(nu_max + 1);
    }
    return out;
}

ModBatch mod_batch_impl(int nu_max, cplx z, bool need_i, bool need_k) {
    check_mod_domain(z);
    check_orders(nu_max);
    if (z.imag() < 0.0) {
        ModBatch b = mod_batch_upper(std::conj(z), nu_max, need_i, need_k);
        for (auto& s : b.i) s = s.conj();
        for (auto& s : b.k) s = s.conj();
        return b;
    }
    return mod_batch_upper(z, nu_max, need_i, need_k);
}

bool cyl_kind(Kind k) {
    return k == Kind::J || k == Kind::Y || k == Kind::H1 || k == Kind::H2;
}

ScaledValue pick_cyl(const CylBatch& b, Kind kind, int nu) {
    switch (kind) {
        case Kind::J: return b.j[nu];
        case Kind::Y: return b.y[nu];
        case Kind::H1: return b.h1[nu];
        default: return b.h2[nu];
    }
}

} // namespace

ScaledValue eval_cyl(Kind kind, int nu, std::complex<double> z) {
    if (!cyl_kind(kind)) throw DomainError("bessel: eval_cyl expects J/Y/H1/H2");
    CylBatch b = cyl_batch_impl(nu, z, kind != Kind::J);
    return pick_cyl(b, kind, nu);
}

ScaledValue eval_mod(Kind kind, int nu, std::complex<double> z) {
    if (kind != Kind::I && kind != Kind::K)
        throw DomainError("bessel: eval_mod expects I/K");
    ModBatch b = mod_batch_impl(nu, z, kind == Kind::I, kind == Kind::K);
    return kind == Kind::I ? b.i[nu] : b.k[nu];
}

ScaledValue derivative(Kind kind, int nu, std::complex<double> z) {
    if (nu < 0) throw DomainError("bessel: order must be >= 0");
    const int top = nu + 1;
    if (cyl_kind(kind)) {
        CylBatch b = cyl_batch_impl(top, z, kind != Kind::J);
        ScaledValue lo = nu == 0 ? -pick_cyl(b, kind, 1) : pick_cyl(b, kind, nu - 1);
        ScaledValue hi = pick_cyl(b, kind, nu + 1);
        return lo.sub(hi).scaled_by_real(0.5);
    }
    ModBatch b = mod_batch_impl(top, z, kind == Kind::I, kind == Kind::K);
    const auto& fam = kind == Kind::I ? b.i : b.k;
    ScaledValue lo = nu == 0 ? fam[1] : fam[nu - 1]; // I_{-1}=I_1, K_{-1}=K_1
    ScaledValue hi = fam[nu + 1];
    ScaledValue d = lo.add(hi).scaled_by_real(0.5);
    return kind == Kind::K ? -d : d;
}

ScaledValue continue_h1(int nu, std::complex<double> z, int m) {
    if (m == 0) return eval_cyl(Kind::H1, nu, z);
    CylBatch b = cyl_batch_impl(nu, z, true);
    ScaledValue v = b.h1[nu].scaled_by_real(1.0 - m).add(
        b.h2[nu].scaled_by_real(-static_cast<double>(m)));
    bool flip = (static_cast<long long>(m) * nu) % 2 != 0;
    return flip ? -v : v;
}

double debye_ratio(int nu, double tau, double window) {
    if (nu < 1) throw DomainError("debye_ratio: order must be >= 1");
    if (!(window > 1.0) || !std::isfinite(window))
        throw DomainError("debye_ratio: window must exceed 1");
    if (!(tau >= 1.0 / window && tau <= window))
        throw DomainError("debye_ratio: tau outside compact window");
    double r = std::sqrt(1.0 + tau * tau);
    double eta = r + std::log(tau / (1.0 + r));
    return 2.0 * nu * eta - std::log(M_PI);
}

CylBatch eval_cyl_batch(OrderRange orders, std::complex<double> z) {
    return cyl_batch_impl(orders.nu_max, z, true);
}

ModBatch eval_mod_batch(OrderRange orders, std::complex<double> z) {
    return mod_batch_impl(orders.nu_max, z, true, true);
}

} // namespace reslab::bessel
