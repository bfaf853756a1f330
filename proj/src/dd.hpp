#pragma once

#include <cmath>
#include <complex>

// Minimal double-double kit (~32 significant digits). Exists for one reason:
// the ascending K_0/K_1 series cancels like e^{2|z|}, which at the asymptotic
// switch radius costs ~15 digits, more than plain doubles can spare. Only the
// operations that series needs are provided.
namespace reslab::dd {

struct DD {
    double hi = 0.0, lo = 0.0;
};

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

// requires |a| >= |b| or a == 0
inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
    // Dekker split; does not assume an FMA unit
    constexpr double split = 134217729.0; // 2^27 + 1
    double p = a * b;
    double ca = split * a, cb = split * b;
    double ah = ca - (ca - a), al = a - ah;
    double bh = cb - (cb - b), bl = b - bh;
    return {p, ((ah * bh - p) + ah * bl + al * bh) + al * bl};
}

inline DD add(DD a, DD b) {
    DD s = two_sum(a.hi, b.hi);
    return quick_two_sum(s.hi, s.lo + a.lo + b.lo);
}

inline DD add(DD a, double b) {
    DD s = two_sum(a.hi, b);
    return quick_two_sum(s.hi, s.lo + a.lo);
}

inline DD neg(DD a) { return {-a.hi, -a.lo}; }

inline DD sub(DD a, DD b) { return add(a, neg(b)); }

inline DD mul(DD a, DD b) {
    DD p = two_prod(a.hi, b.hi);
    return quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

inline DD mul(DD a, double b) {
    DD p = two_prod(a.hi, b);
    return quick_two_sum(p.hi, p.lo + a.lo * b);
}

inline DD div(DD a, DD b) {
    double q1 = a.hi / b.hi;
    DD r = sub(a, mul(b, q1));
    double q2 = r.hi / b.hi;
    r = sub(r, mul(b, q2));
    double q3 = r.hi / b.hi;
    return add(quick_two_sum(q1, q2), q3);
}

inline DD inv(double b) { return div({1.0, 0.0}, {b, 0.0}); }

inline double to_double(DD a) { return a.hi + a.lo; }

// hi/lo splits generated at 60-digit precision; residuals < 3e-33
inline constexpr DD kPi{3.1415926535897931, 1.2246467991473532e-16};
inline constexpr DD kPiHalf{1.5707963267948966, 6.123233995736766e-17};
inline constexpr DD kLn2{0.69314718055994529, 2.3190468138462996e-17};
inline constexpr DD kEulerGamma{0.57721566490153287, -4.9429151524306449e-18};

// exp(x) for |x| < 700, accurate to ~1e-32 relative
inline DD exp(DD x) {
    double k = std::nearbyint(x.hi / kLn2.hi);
    DD s = sub(x, mul(kLn2, k));
    // |s| <= ~0.35: plain Taylor, 26 terms reaches below dd roundoff.
    // Divisions stay exact dd; multiplying by a rounded 1/n would leak
    // ~1e-18 into every term.
    DD sum{1.0, 0.0}, term{1.0, 0.0};
    for (int n = 1; n <= 26; ++n) {
        term = div(mul(term, s), DD{static_cast<double>(n), 0.0});
        sum = add(sum, term);
        if (std::fabs(term.hi) < 1e-35 * std::fabs(sum.hi)) break;
    }
    int ki = static_cast<int>(k);
    return {std::ldexp(sum.hi, ki), std::ldexp(sum.lo, ki)};
}

// sin/cos for |x| <= pi (an atan2 result), via quadrant reduction + Taylor
struct SinCos {
    DD sin, cos;
};

inline SinCos sincos(double x) {
    double q = std::nearbyint(x / kPiHalf.hi);
    DD s = sub(DD{x, 0.0}, mul(kPiHalf, q));
    // |s| <= pi/4 + eps
    DD s2 = mul(s, s);
    DD sn = s, tn = s;
    for (int n = 1; n <= 16; ++n) {
        tn = div(mul(tn, s2), DD{-(2.0 * n) * (2.0 * n + 1.0), 0.0});
        sn = add(sn, tn);
        if (std::fabs(tn.hi) < 1e-35) break;
    }
    DD cs{1.0, 0.0}, tc{1.0, 0.0};
    for (int n = 1; n <= 16; ++n) {
        tc = div(mul(tc, s2), DD{-(2.0 * n - 1.0) * (2.0 * n), 0.0});
        cs = add(cs, tc);
        if (std::fabs(tc.hi) < 1e-35) break;
    }
    switch (static_cast<int>(q) & 3) {
        case 0: return {sn, cs};
        case 1: case -3: return {cs, neg(sn)};
        case 2: case -2: return {neg(sn), neg(cs)};
        default: return {neg(cs), sn};
    }
}

struct CDD {
    DD re, im;
};

inline CDD from_complex(std::complex<double> z) { return {{z.real(), 0.0}, {z.imag(), 0.0}}; }

inline std::complex<double> to_complex(CDD z) { return {to_double(z.re), to_double(z.im)}; }

inline CDD add(CDD a, CDD b) { return {add(a.re, b.re), add(a.im, b.im)}; }
inline CDD sub(CDD a, CDD b) { return {sub(a.re, b.re), sub(a.im, b.im)}; }
inline CDD neg(CDD a) { return {neg(a.re), neg(a.im)}; }

inline CDD mul(CDD a, CDD b) {
    return {sub(mul(a.re, b.re), mul(a.im, b.im)),
            add(mul(a.re, b.im), mul(a.im, b.re))};
}

inline CDD mul(CDD a, DD b) { return {mul(a.re, b), mul(a.im, b)}; }
inline CDD mul(CDD a, double b) { return {mul(a.re, b), mul(a.im, b)}; }

inline CDD div(CDD a, CDD b) {
    DD n2 = add(mul(b.re, b.re), mul(b.im, b.im));
    CDD num = mul(a, CDD{b.re, neg(b.im)});
    return {div(num.re, n2), div(num.im, n2)};
}

inline CDD div(CDD a, double b) {
    return {div(a.re, DD{b, 0.0}), div(a.im, DD{b, 0.0})};
}

inline double abs_hi(CDD a) { return std::hypot(a.re.hi, a.im.hi); }

// z*z for a plain complex double, exactly rounded into dd
inline CDD square_exact(std::complex<double> z) {
    DD xx = two_prod(z.real(), z.real());
    DD yy = two_prod(z.imag(), z.imag());
    DD xy = two_prod(z.real(), z.imag());
    return {sub(xx, yy), add(xy, xy)};
}

// log(z) for complex double z, accurate to ~1e-32 in both components.
// One Newton correction of the double-precision log: if l1 ~ log z then
// log z = l1 + log(z e^{-l1}) and z e^{-l1} = 1 + delta with |delta| ~ 1e-16.
inline CDD log_accurate(std::complex<double> z) {
    double l_re = std::log(std::abs(z));
    double l_im = std::arg(z);
    DD er = exp({-l_re, 0.0});
    SinCos sc = sincos(-l_im);
    CDD e{mul(sc.cos, er), mul(sc.sin, er)};
    CDD delta = sub(mul(from_complex(z), e), CDD{{1.0, 0.0}, {0.0, 0.0}});
    // log(1+delta) = delta - delta^2/2 + O(1e-48)
    CDD corr = sub(delta, mul(mul(delta, delta), 0.5));
    return {add(corr.re, l_re), add(corr.im, l_im)};
}

} // namespace reslab::dd
