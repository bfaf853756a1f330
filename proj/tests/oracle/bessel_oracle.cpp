#include "bessel_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "mp_complex.hpp"

namespace oracle {
namespace {

// Series cancellation costs about |z|*log10(e) digits for the cylinder kinds
// and up to twice that once branch rotation mixes growing and shrinking parts.
unsigned working_digits(std::complex<double> z) {
    return 90u + static_cast<unsigned>(std::ceil(0.9 * std::abs(z)));
}

MpFloat tail_eps2() {
    // squared stopping threshold, ~8 digits under working precision
    MpFloat e = pow(MpFloat(10), -static_cast<int>(MpFloat::default_precision()) + 6);
    return e * e;
}

MpComplex half_power(const MpComplex& z, int n, int branch_m) {
    // (z/2)^n on branch m: ordinary principal power times (-1)^{m n}
    MpComplex h{z.re / 2, z.im / 2};
    MpComplex p = from_polar(n * log_abs(h), n * arg_of(h));
    if ((static_cast<long long>(branch_m) * n) % 2 != 0) p = -p;
    return p;
}

MpFloat factorial(int n) {
    MpFloat f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// sum_{k>=0} (psi(k+1)+psi(n+k+1)) w^k / (k! (n+k)!) and
// sum_{k>=0} w^k / (k! (n+k)!) in one pass
struct PsiSums {
    MpComplex plain, weighted;
};

PsiSums psi_series(int n, const MpComplex& w) {
    MpFloat eps2 = tail_eps2();
    MpComplex u = MpComplex(1.0) / factorial(n); // w^k/(k!(n+k)!), k = 0
    MpFloat gamma = euler_gamma();
    MpFloat psi_a = -gamma; // psi(k+1)
    MpFloat psi_b = -gamma; // psi(n+k+1)
    for (int j = 1; j <= n; ++j) psi_b += MpFloat(1) / j;
    MpComplex plain{MpFloat(0), MpFloat(0)}, weighted = plain;
    MpFloat maxmag2 = 0;
    double wabs = static_cast<double>(w.abs());
    for (long k = 0;; ++k) {
        plain += u;
        weighted += u * (psi_a + psi_b);
        MpFloat m2 = u.abs2();
        if (m2 > maxmag2) maxmag2 = m2;
        bool decaying = (double(k) + 1) * (double(n) + k + 1) > wabs;
        if (decaying && m2 <= maxmag2 * eps2) break;
        if (k > 4000000) throw std::runtime_error("oracle: psi series stall");
        u = u * w / MpFloat((k + 1.0) * (n + k + 1.0));
        psi_a += MpFloat(1) / (k + 1);
        psi_b += MpFloat(1) / (n + k + 1);
    }
    return {plain, weighted};
}

// sum_{k=0}^{n-1} ((n-k-1)!/k!) v^k
MpComplex finite_series(int n, const MpComplex& v) {
    MpComplex t = MpComplex{factorial(n - 1), MpFloat(0)};
    MpComplex s{MpFloat(0), MpFloat(0)};
    for (int k = 0; k < n; ++k) {
        s += t;
        if (k + 1 < n) t = t * v / MpFloat((k + 1.0) * (n - k - 1.0));
    }
    return s;
}

MpComplex j_mp(int n, const MpComplex& z, int branch_m) {
    MpComplex w = -(z * z) / MpFloat(4);
    PsiSums ps = psi_series(n, w); // plain part is exactly the J sum
    return half_power(z, n, branch_m) * ps.plain;
}

MpComplex log_on_branch(const MpComplex& z, int branch_m) {
    MpComplex h{z.re / 2, z.im / 2};
    return {log_abs(h), arg_of(h) + branch_m * mp_pi()};
}

MpComplex y_mp(int n, const MpComplex& z, int branch_m) {
    MpFloat pi = mp_pi();
    MpComplex w = -(z * z) / MpFloat(4);
    PsiSums ps = psi_series(n, w);
    MpComplex jn = half_power(z, n, branch_m) * ps.plain;
    MpComplex y = log_on_branch(z, branch_m) * jn * (MpFloat(2) / pi);
    y = y - half_power(z, n, branch_m) * ps.weighted / pi;
    if (n > 0) {
        MpComplex v = (z * z) / MpFloat(4);
        y = y - half_power(z, -n, branch_m) * finite_series(n, v) / pi;
    }
    return y;
}

MpComplex i_mp(int n, const MpComplex& z) {
    MpComplex w = (z * z) / MpFloat(4);
    PsiSums ps = psi_series(n, w);
    return half_power(z, n, 0) * ps.plain;
}

MpComplex k_mp(int n, const MpComplex& z) {
    MpComplex w = (z * z) / MpFloat(4);
    PsiSums ps = psi_series(n, w);
    MpComplex in = half_power(z, n, 0) * ps.plain;
    MpComplex k = log_on_branch(z, 0) * in;
    if (n % 2 == 0) k = -k;
    k += half_power(z, n, 0) * ps.weighted * MpFloat((n % 2 == 0) ? 0.5 : -0.5);
    if (n > 0) {
        MpComplex v = -(z * z) / MpFloat(4);
        k += half_power(z, -n, 0) * finite_series(n, v) * MpFloat(0.5);
    }
    return k;
}

MpComplex h1_mp(int n, const MpComplex& z, int branch_m) {
    MpComplex j = j_mp(n, z, branch_m), y = y_mp(n, z, branch_m);
    return {j.re - y.im, j.im + y.re};
}

MpComplex h2_mp(int n, const MpComplex& z) {
    MpComplex j = j_mp(n, z, 0), y = y_mp(n, z, 0);
    return {j.re + y.im, j.im - y.re};
}

Ref make_ref(const MpComplex& v) {
    return {static_cast<double>(log_abs(v)), static_cast<double>(arg_of(v))};
}

MpComplex eval_mp(char kind, int n, const MpComplex& z) {
    // negative order via integer-order reflections
    int an = std::abs(n);
    MpComplex v;
    switch (kind) {
        case 'J': v = j_mp(an, z, 0); break;
        case 'Y': v = y_mp(an, z, 0); break;
        case '1': v = h1_mp(an, z, 0); break;
        case '2': v = h2_mp(an, z); break;
        case 'I': v = i_mp(an, z); break;
        case 'K': v = k_mp(an, z); break;
        default: throw std::runtime_error("oracle: bad kind");
    }
    if (n < 0 && an % 2 != 0 && (kind == 'J' || kind == 'Y' || kind == '1' || kind == '2'))
        v = -v; // C_{-n} = (-1)^n C_n; I_{-n} = I_n, K_{-n} = K_n
    return v;
}

} // namespace

Ref j_ref(int n, std::complex<double> z, int branch_m) {
    PrecisionGuard g(working_digits(z));
    return make_ref(j_mp(n, MpComplex(z), branch_m));
}

Ref y_ref(int n, std::complex<double> z, int branch_m) {
    PrecisionGuard g(working_digits(z));
    return make_ref(y_mp(n, MpComplex(z), branch_m));
}

Ref h1_ref(int n, std::complex<double> z, int branch_m) {
    PrecisionGuard g(working_digits(z));
    return make_ref(h1_mp(n, MpComplex(z), branch_m));
}

Ref h2_ref(int n, std::complex<double> z) {
    PrecisionGuard g(working_digits(z));
    return make_ref(h2_mp(n, MpComplex(z)));
}

Ref i_ref(int n, std::complex<double> z) {
    PrecisionGuard g(working_digits(z));
    return make_ref(i_mp(n, MpComplex(z)));
}

Ref k_ref(int n, std::complex<double> z) {
    PrecisionGuard g(working_digits(z));
    return make_ref(k_mp(n, MpComplex(z)));
}

Ref cyl_ref(char kind, int n, std::complex<double> z) {
    PrecisionGuard g(working_digits(z));
    return make_ref(eval_mp(kind, n, MpComplex(z)));
}

Ref mod_ref(char kind, int n, std::complex<double> z) { return cyl_ref(kind, n, z); }

Ref cyl_deriv_ref(char kind, int n, std::complex<double> z) {
    PrecisionGuard g(working_digits(z));
    MpComplex zz(z);
    MpComplex lo = eval_mp(kind, n - 1, zz), hi = eval_mp(kind, n + 1, zz);
    return make_ref((lo - hi) / MpFloat(2));
}

Ref mod_deriv_ref(char kind, int n, std::complex<double> z) {
    PrecisionGuard g(working_digits(z));
    MpComplex zz(z);
    MpComplex lo = eval_mp(kind, n - 1, zz), hi = eval_mp(kind, n + 1, zz);
    MpComplex d = (lo + hi) / MpFloat(2);
    if (kind == 'K') d = -d;
    return make_ref(d);
}

double rel_err(double log_mod, double phase, const Ref& ref) {
    double d = log_mod - ref.log_mod;
    if (std::fabs(d) > 0.7) return std::expm1(std::fabs(d)); // hopeless anyway
    double dp = std::remainder(phase - ref.phase, 2.0 * M_PI);
    return std::abs(std::exp(d) * std::complex<double>(std::cos(dp), std::sin(dp)) - 1.0);
}

std::complex<double> to_complex(const Ref& ref) {
    return std::exp(ref.log_mod) * std::complex<double>(std::cos(ref.phase), std::sin(ref.phase));
}

double self_check(int n, std::complex<double> zd) {
    PrecisionGuard g(working_digits(zd) + 25);
    MpComplex z(zd);
    MpFloat pi = mp_pi();
    double worst = 0;
    auto rel = [&](const MpComplex& resid, const MpFloat& scale) {
        double r = static_cast<double>(resid.abs() / scale);
        if (r > worst) worst = r;
    };

    MpComplex jn = j_mp(n, z, 0), jm = j_mp(n == 0 ? 1 : n - 1, z, 0), jp = j_mp(n + 1, z, 0);
    if (n == 0) jm = -jm;
    MpComplex yn = y_mp(n, z, 0), ym = y_mp(n == 0 ? 1 : n - 1, z, 0), yp = y_mp(n + 1, z, 0);
    if (n == 0) ym = -ym;
    MpComplex jd = (jm - jp) / MpFloat(2), yd = (ym - yp) / MpFloat(2);

    // J Y' - J' Y = 2/(pi z)
    MpComplex wr = jn * yd - jd * yn - MpComplex(2.0) / (z * pi);
    rel(wr, MpComplex(2.0 / M_PI).abs() / z.abs());
    // recurrences against the dominant member
    MpFloat scale_j = sqrt(jm.abs2() + jp.abs2() + jn.abs2());
    rel(jm + jp - jn * MpFloat(2.0 * n) / z, scale_j);
    MpFloat scale_y = sqrt(ym.abs2() + yp.abs2() + yn.abs2());
    rel(ym + yp - yn * MpFloat(2.0 * n) / z, scale_y);

    if (zd.real() > 0) {
        MpComplex in = i_mp(n, z), im_ = i_mp(n == 0 ? 1 : n - 1, z), ip = i_mp(n + 1, z);
        MpComplex kn = k_mp(n, z), km = k_mp(n == 0 ? 1 : n - 1, z), kp = k_mp(n + 1, z);
        MpComplex id = (im_ + ip) / MpFloat(2), kd = -(km + kp) / MpFloat(2);
        // I K' - I' K = -1/z
        rel(in * kd - id * kn + MpComplex(1.0) / z, MpFloat(1) / z.abs());
        rel(im_ - ip - in * MpFloat(2.0 * n) / z, sqrt(im_.abs2() + ip.abs2()));
        rel(km - kp + kn * MpFloat(2.0 * n) / z, sqrt(km.abs2() + kp.abs2()));
    }

    // half-turn connection: H1_n(z e^{i pi}) = -(-1)^n H2_n(z),
    // two-turn: H1_n(z e^{2 i pi}) = -H1_n(z) - 2 H2_n(z)
    MpComplex h1r = h1_mp(n, z, 1), h2n = h2_mp(n, z), h1n = h1_mp(n, z, 0);
    MpComplex target = (n % 2 == 0) ? -h2n : h2n;
    rel(h1r - target, h2n.abs());
    MpComplex h1rr = h1_mp(n, z, 2);
    MpComplex target2 = -(h1n + h2n + h2n);
    rel(h1rr - target2, target2.abs());

    return worst;
}

namespace {

double bisect(int n, double lo, double hi, bool prime) {
    PrecisionGuard g(60);
    auto sgn = [&](const MpFloat& x) {
        MpComplex z{x, MpFloat(0)};
        MpComplex v;
        if (!prime) {
            v = j_mp(n, z, 0);
        } else {
            MpComplex a = j_mp(n == 0 ? 1 : n - 1, z, 0), b = j_mp(n + 1, z, 0);
            if (n == 0) a = -a; // J_{-1} = -J_1
            v = (a - b) / MpFloat(2);
        }
        return v.re > 0 ? 1 : (v.re < 0 ? -1 : 0);
    };
    MpFloat a = lo, b = hi;
    int sa = sgn(a), sb = sgn(b);
    if (sa == 0) return lo;
    if (sb == 0) return hi;
    if (sa == sb) throw std::runtime_error("oracle: root bracket without sign change");
    for (int it = 0; it < 220; ++it) {
        MpFloat mid = (a + b) / 2;
        int sm = sgn(mid);
        if (sm == 0) return static_cast<double>(mid);
        if (sm == sa)
            a = mid;
        else
            b = mid;
    }
    return static_cast<double>((a + b) / 2);
}

} // namespace

double j_root(int n, double lo, double hi) { return bisect(n, lo, hi, false); }
double j_prime_root(int n, double lo, double hi) { return bisect(n, lo, hi, true); }

} // namespace oracle
