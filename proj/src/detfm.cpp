#include "reslab/detfm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "reslab/bessel.hpp"
#include "reslab/errors.hpp"
#include "reslab/parallel.hpp"

namespace reslab::detfm {
namespace {

namespace rb = reslab::bessel;
using cplx = std::complex<double>;

void check_config(const DetConfig& cfg) {
    if (!(cfg.l_factor > 0.0) || !std::isfinite(cfg.l_factor) ||
        !(cfg.tail_tol > 0.0) || !std::isfinite(cfg.tail_tol) || cfg.max_l < 2)
        throw DomainError("DetConfig: l_factor and tail_tol must be positive, max_l >= 2");
}

void check_m(int m) {
    if (m < 1) throw DomainError("detfm: sheet index m must be >= 1");
}

int initial_cut(const DetConfig& cfg, const pw::BallProblem& p, double abs_lambda) {
    double raw = std::ceil(cfg.l_factor * abs_lambda * p.radius) + 40.0;
    return static_cast<int>(std::min(raw, static_cast<double>(cfg.max_l)));
}

// log(1+w) keeping relative accuracy as w -> 0; forming 1.0+w directly would
// floor small terms at ~1e-16 noise, which the tail estimator then trips over.
cplx log1p_small(cplx w) {
    if (std::abs(w) < 1e-4)
        return w * (1.0 + w * (-0.5 + w * (1.0 / 3.0 - w * 0.25)));
    return std::log(1.0 + w);
}

// Principal log of 1 + W for scaled W.
cplx log_one_plus(const ScaledValue& w) {
    if (w.is_zero()) return {0.0, 0.0};
    if (w.log_modulus() > 40.0) {
        cplx corr = (ScaledValue::one() / w).to_complex();
        return cplx(w.log_modulus(), w.phase_principal()) + log1p_small(corr);
    }
    cplx wv = w.to_complex();
    if (wv == cplx(-1.0, 0.0))
        throw PoleError("detfm: determinant factor vanishes");
    return log1p_small(wv);
}

double abs_of(double v) { return std::fabs(v); }
double abs_of(cplx v) { return std::abs(v); }

// Dropped-tail bound: geometric extrapolation from the last two terms with a
// safety factor 10, tightened by 10x the trailing-window maximum so a series
// that has already sunk to its rounding floor (where consecutive "terms" are
// noise without a decay ratio) still converges.
template <class T>
double tail_bound(const std::vector<T>& t) {
    const std::size_t n = t.size();
    double last = abs_of(t[n - 1]);
    double prev = abs_of(t[n - 2]);
    double geo = std::numeric_limits<double>::infinity();
    if (last == 0.0) {
        geo = 0.0;
    } else if (prev > last) {
        double q = last / prev;
        geo = 10.0 * last * q / (1.0 - q);
    }
    double floor3 = 0.0;
    for (std::size_t i = n - std::min<std::size_t>(3, n); i < n; ++i)
        floor3 = std::max(floor3, abs_of(t[i]));
    return std::min(geo, 10.0 * floor3);
}

// Doubling loop shared by the ray evaluators: grow l_max until the tail bound
// clears tail_tol, recomputing the whole batched ladder each round (the final
// round dominates, so total work stays within 2x of a clairvoyant cut).
template <class T>
std::vector<T> converged_terms(const DetConfig& cfg, const pw::BallProblem& p,
                               double abs_lambda, EvalInfo* info,
                               const std::function<std::vector<T>(int)>& make) {
    check_config(cfg);
    int l_hi = initial_cut(cfg, p, abs_lambda);
    for (;;) {
        std::vector<T> terms = make(l_hi);
        double tail = tail_bound(terms);
        if (tail <= cfg.tail_tol) {
            if (info) {
                info->l_max_used = l_hi;
                info->tail_estimate = tail;
            }
            return terms;
        }
        if (l_hi >= cfg.max_l)
            throw TruncationError("detfm: tail still above tail_tol at max_l");
        l_hi = std::min(2 * l_hi, cfg.max_l);
    }
}

double asc_sum(const std::vector<double>& t) {
    double s = 0.0, c = 0.0;
    for (double v : t) {
        double y = v - c;
        double u = s + y;
        c = (u - s) - y;
        s = u;
    }
    return s;
}

cplx asc_sum(const std::vector<cplx>& t) {
    double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
    for (cplx v : t) {
        double yr = v.real() - cr, ur = sr + yr;
        cr = (ur - sr) - yr;
        sr = ur;
        double yi = v.imag() - ci, ui = si + yi;
        ci = (ui - si) - yi;
        si = ui;
    }
    return {sr, si};
}

double mult_of(const pw::BallProblem& p, int l) {
    return static_cast<double>(pw::multiplicity(l, p.dim));
}

// m(s_l - 1) = -2m B[J]/B[H1] from a precomputed coefficient ladder.
ScaledValue m_s_minus_one(const pw::WaveCoeffs& wc, int l, int m) {
    const ScaledValue& bj = wc.bj[l];
    const ScaledValue& bh1 = wc.bh1[l];
    if (bh1.is_zero())
        throw PoleError("detfm: boundary functional of H1 vanishes");
    if (bj.is_zero()) return ScaledValue::zero();
    return (bj / bh1).scaled_by_real(-2.0 * m);
}

ScaledValue robin_combine(const std::vector<ScaledValue>& c, int nu, cplx arg,
                          double shift) {
    ScaledValue lower = nu == 0 ? -c[1] : c[nu - 1];
    ScaledValue deriv = lower.sub(c[nu + 1]).scaled_by_real(0.5);
    return c[nu].scaled_by_real(shift).sub(deriv.scaled_by(arg));
}

// Factors 1 + m(s_l(r e^{i pi}) - 1) = ((1-m) B[H1] - m B[H2])/B[H1], boundary
// functionals taken on the branch reached by one half-turn of the argument:
//   H1_n(w e^{i pi}) = (-1)^{n+1} H2_n(w),  H2 = 2J - H1 on every branch,
//   J_n(w e^{i pi}) = (-1)^n J_n(w).
std::vector<ScaledValue> continued_factors(const pw::BallProblem& p, int m, double r,
                                           int l_hi) {
    const cplx w(r * p.radius, 0.0);
    const bool dir = p.bc.is_dirichlet();
    const double shift = p.bc.h0 + 0.5 * (p.dim - 2);
    const int nu_top = p.nu_of(l_hi) + (dir ? 0 : 1);
    rb::CylBatch b = rb::eval_cyl_batch(rb::OrderRange{nu_top}, w);
    std::vector<ScaledValue> h1c(nu_top + 1), h2c(nu_top + 1);
    for (int n = 0; n <= nu_top; ++n) {
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        h1c[n] = -(b.h2[n].scaled_by_real(sgn));
        h2c[n] = b.j[n].scaled_by_real(2.0 * sgn).sub(h1c[n]);
    }
    const cplx arg = -w; // the continued point as a plain complex number
    std::vector<ScaledValue> f(static_cast<std::size_t>(l_hi) + 1);
    parallel_for(f.size(), [&](std::size_t li) {
        const int nu = p.nu_of(static_cast<int>(li));
        ScaledValue b1 = dir ? h1c[nu] : robin_combine(h1c, nu, arg, shift);
        ScaledValue b2 = dir ? h2c[nu] : robin_combine(h2c, nu, arg, shift);
        if (b1.is_zero())
            throw PoleError("detfm: boundary functional of H1 vanishes");
        ScaledValue num = b1.scaled_by_real(1.0 - m).sub(b2.scaled_by_real(m));
        if (num.is_zero())
            throw PoleError("detfm: determinant factor vanishes");
        f[li] = num / b1;
    });
    return f;
}

} // namespace

cplx log_fm(const pw::BallProblem& p, int m, cplx lambda, const DetConfig& cfg,
            EvalInfo* info) {
    check_m(m);
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()) ||
        lambda == cplx(0.0, 0.0))
        throw DomainError("log_fm: lambda must be finite and nonzero");
    if (lambda.imag() < 0.0)
        throw DomainError("log_fm: lambda must lie in the closed upper half-plane");

    std::function<std::vector<cplx>(int)> make;
    if (lambda.imag() == 0.0 && lambda.real() < 0.0) {
        // arg = pi edge of the closed region: Hankel data continued one
        // half-turn; per-factor principal logs as everywhere else.
        const double r = -lambda.real();
        make = [&p, m, r](int l_hi) {
            std::vector<ScaledValue> f = continued_factors(p, m, r, l_hi);
            std::vector<cplx> t(f.size());
            for (std::size_t l = 0; l < f.size(); ++l)
                t[l] = mult_of(p, static_cast<int>(l)) *
                       cplx(f[l].log_modulus(), f[l].phase_principal());
            return t;
        };
    } else {
        make = [&p, m, lambda](int l_hi) {
            pw::WaveCoeffs wc = pw::wave_coeffs(p, l_hi, lambda);
            std::vector<cplx> t(static_cast<std::size_t>(l_hi) + 1);
            parallel_for(t.size(), [&](std::size_t l) {
                const int li = static_cast<int>(l);
                t[l] = mult_of(p, li) * log_one_plus(m_s_minus_one(wc, li, m));
            });
            return t;
        };
    }
    return asc_sum(converged_terms<cplx>(cfg, p, std::abs(lambda), info, make));
}

double log_abs_fm_imaginary(const pw::BallProblem& p, int m, double sigma,
                            const DetConfig& cfg, EvalInfo* info) {
    check_m(m);
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("log_abs_fm_imaginary: sigma must be finite and positive");
    const double log_mpi = std::log(m * M_PI);
    std::function<std::vector<double>(int)> make = [&p, sigma, log_mpi](int l_hi) {
        std::vector<ScaledValue> q = pw::q_ratio_batch(p, l_hi, sigma);
        std::vector<double> t(static_cast<std::size_t>(l_hi) + 1);
        parallel_for(t.size(), [&](std::size_t l) {
            if (q[l].is_zero()) {
                t[l] = 0.0;
                return;
            }
            // log(1 + (m pi Q)^2) on the log scale of Q; exact for huge Q,
            // graceful underflow to 0 for tiny Q.
            double x = 2.0 * (log_mpi + q[l].log_modulus());
            double v = x > 40.0 ? x : std::log1p(std::exp(x));
            t[l] = 0.5 * mult_of(p, static_cast<int>(l)) * v;
        });
        return t;
    };
    return asc_sum(converged_terms<double>(cfg, p, sigma, info, make));
}

double log_abs_fm_negative_ray(const pw::BallProblem& p, int m, double r,
                               const DetConfig& cfg, EvalInfo* info,
                               NegRayPath path) {
    check_m(m);
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("log_abs_fm_negative_ray: r must be finite and positive");
    std::function<std::vector<double>(int)> make;
    if (path == NegRayPath::Reflected) {
        // (m+1) - m conj(s_l(r)) = 1 - m conj(s_l(r) - 1): the whole ray reads
        // off positive-axis data through the reflection identity.
        make = [&p, m, r](int l_hi) {
            pw::WaveCoeffs wc = pw::wave_coeffs(p, l_hi, cplx(r, 0.0));
            std::vector<double> t(static_cast<std::size_t>(l_hi) + 1);
            parallel_for(t.size(), [&](std::size_t l) {
                const int li = static_cast<int>(l);
                ScaledValue u = -(m_s_minus_one(wc, li, m).conj());
                t[l] = mult_of(p, li) * log_one_plus(u).real();
            });
            return t;
        };
    } else {
        make = [&p, m, r](int l_hi) {
            std::vector<ScaledValue> f = continued_factors(p, m, r, l_hi);
            std::vector<double> t(f.size());
            for (std::size_t l = 0; l < f.size(); ++l)
                t[l] = mult_of(p, static_cast<int>(l)) * f[l].log_modulus();
            return t;
        };
    }
    return asc_sum(converged_terms<double>(cfg, p, r, info, make));
}

GrowthFit fit_growth(const std::vector<std::pair<double, double>>& samples) {
    const std::size_t n = samples.size();
    if (n < 6) throw FitError("fit_growth: need at least 6 samples");
    double xmin = std::numeric_limits<double>::infinity(), xmax = 0.0;
    for (const auto& s : samples) {
        if (!(s.first > 0.0) || !std::isfinite(s.first) || !(s.second > 0.0) ||
            !std::isfinite(s.second))
            throw FitError("fit_growth: samples must be finite and positive");
        xmin = std::min(xmin, s.first);
        xmax = std::max(xmax, s.first);
    }
    if (!(xmax >= 4.0 * xmin))
        throw FitError("fit_growth: abscissae must span a factor of at least 4");

    double ubar = 0.0, vbar = 0.0;
    for (const auto& s : samples) {
        ubar += std::log(s.first);
        vbar += std::log(s.second);
    }
    ubar /= static_cast<double>(n);
    vbar /= static_cast<double>(n);
    double suu = 0.0, suv = 0.0;
    for (const auto& s : samples) {
        double du = std::log(s.first) - ubar;
        double dv = std::log(s.second) - vbar;
        suu += du * du;
        suv += du * dv;
    }
    GrowthFit fit;
    fit.exponent = suv / suu; // span >= 4 keeps suu strictly positive
    fit.log_coeff = vbar - fit.exponent * ubar;
    double ss = 0.0;
    for (const auto& s : samples) {
        double e = std::log(s.second) - fit.log_coeff - fit.exponent * std::log(s.first);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

} // namespace reslab::detfm
