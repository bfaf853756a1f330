#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bessel_oracle.hpp"
#include "doctest.h"
#include "reslab/bessel.hpp"
#include "reslab/errors.hpp"
#include "reslab/parallel.hpp"

using reslab::AccuracyError;
using reslab::DomainError;
using reslab::ScaledValue;
namespace rb = reslab::bessel;
using cplx = std::complex<double>;

namespace {

double engine_vs_oracle(rb::Kind kind, char okind, int n, cplx z) {
    ScaledValue v = (kind == rb::Kind::I || kind == rb::Kind::K)
                        ? rb::eval_mod(kind, n, z)
                        : rb::eval_cyl(kind, n, z);
    oracle::Ref ref = (okind == 'I' || okind == 'K') ? oracle::mod_ref(okind, n, z)
                                                     : oracle::cyl_ref(okind, n, z);
    return oracle::rel_err(v.log_modulus(), v.phase(), ref);
}

} // namespace

TEST_SUITE("bessel") {

TEST_CASE("order zero at vanishing argument") {
    ScaledValue v = rb::eval_cyl(rb::Kind::J, 0, cplx(1e-30, 0.0));
    CHECK(std::abs(v.to_complex() - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("cylinder Wronskian at complex argument") {
    const cplx z(3.0, 4.0);
    const int nu = 5;
    cplx j = rb::eval_cyl(rb::Kind::J, nu, z).to_complex();
    cplx y = rb::eval_cyl(rb::Kind::Y, nu, z).to_complex();
    cplx jd = rb::derivative(rb::Kind::J, nu, z).to_complex();
    cplx yd = rb::derivative(rb::Kind::Y, nu, z).to_complex();
    cplx target = 2.0 / (M_PI * z);
    CHECK(std::abs(j * yd - jd * y - target) < 1e-12 * std::abs(target));
}

TEST_CASE("Hankel pair conjugate on the positive axis") {
    const cplx x(7.3, 0.0);
    cplx h1 = rb::eval_cyl(rb::Kind::H1, 2, x).to_complex();
    cplx h2 = rb::eval_cyl(rb::Kind::H2, 2, x).to_complex();
    CHECK(std::abs(std::conj(h1) - h2) < 1e-13 * std::abs(h2));
}

TEST_CASE("modified positivity on the positive axis") {
    for (double x : {0.1, 1.0, 10.0}) {
        ScaledValue i0 = rb::eval_mod(rb::Kind::I, 0, cplx(x, 0.0));
        ScaledValue k0 = rb::eval_mod(rb::Kind::K, 0, cplx(x, 0.0));
        CHECK(i0.signed_real() >= 1.0);
        CHECK(k0.signed_real() > 0.0);
    }
}

TEST_CASE("modified Wronskian") {
    const cplx x(2.5, 0.0);
    const int nu = 7;
    cplx iv = rb::eval_mod(rb::Kind::I, nu, x).to_complex();
    cplx kv = rb::eval_mod(rb::Kind::K, nu, x).to_complex();
    cplx id = rb::derivative(rb::Kind::I, nu, x).to_complex();
    cplx kd = rb::derivative(rb::Kind::K, nu, x).to_complex();
    CHECK(std::abs(iv * kd - id * kv + 1.0 / x) < 1e-12 * std::abs(1.0 / x));
}

TEST_CASE("scaled log survives where doubles overflow") {
    ScaledValue v = rb::eval_mod(rb::Kind::I, 200, cplx(100.0, 0.0));
    oracle::Ref ref = oracle::i_ref(200, cplx(100.0, 0.0));
    CHECK(v.log_modulus() == doctest::Approx(ref.log_mod).epsilon(1e-10));
}

TEST_CASE("derivative identities at order zero") {
    const cplx z(1.0, 2.0);
    cplx jd = rb::derivative(rb::Kind::J, 0, z).to_complex();
    cplx j1 = rb::eval_cyl(rb::Kind::J, 1, z).to_complex();
    CHECK(std::abs(jd + j1) < 1e-13 * std::abs(j1));

    cplx kd = rb::derivative(rb::Kind::K, 0, cplx(3.0, 0.0)).to_complex();
    cplx k1 = rb::eval_mod(rb::Kind::K, 1, cplx(3.0, 0.0)).to_complex();
    CHECK(std::abs(kd + k1) < 1e-13 * std::abs(k1));
}

TEST_CASE("derivative matches Richardson finite difference") {
    const cplx z(5.0, 1.0);
    const int nu = 3;
    auto f = [&](cplx w) { return rb::eval_cyl(rb::Kind::H1, nu, w).to_complex(); };
    auto central = [&](double h) { return (f(z + h) - f(z - h)) / (2.0 * h); };
    cplx d1 = central(1e-5), d2 = central(5e-6);
    cplx fd = (4.0 * d2 - d1) / 3.0;
    cplx drec = rb::derivative(rb::Kind::H1, nu, z).to_complex();
    CHECK(std::abs(drec - fd) < 1e-8 * std::abs(drec));
}

TEST_CASE("half-turn continuation closed forms") {
    const cplx z(1.0, 1.0);
    ScaledValue c = rb::continue_h1(0, z, 1);
    cplx expect = -rb::eval_cyl(rb::Kind::H2, 0, z).to_complex();
    CHECK(std::abs(c.to_complex() - expect) < 1e-13 * std::abs(expect));

    oracle::Ref ref = oracle::h1_ref(0, z, 1);
    CHECK(oracle::rel_err(c.log_modulus(), c.phase(), ref) < 1e-13);
}

TEST_CASE("continuation at m = 0 is the identity") {
    std::mt19937 rng(8811u);
    std::uniform_real_distribution<double> mod(0.3, 40.0), arg(-3.0, 3.0);
    std::uniform_int_distribution<int> ord(0, 15);
    for (int t = 0; t < 20; ++t) {
        cplx z = std::polar(mod(rng), arg(rng));
        int n = ord(rng);
        ScaledValue a = rb::continue_h1(n, z, 0);
        ScaledValue b = rb::eval_cyl(rb::Kind::H1, n, z);
        CHECK(a.log_modulus() == b.log_modulus());
        CHECK(a.phase() == b.phase());
    }
}

TEST_CASE("two-turn continuation against the log-branch oracle") {
    const cplx z(2.0, 0.5);
    ScaledValue c = rb::continue_h1(1, z, 2);
    oracle::Ref ref = oracle::h1_ref(1, z, 2);
    CHECK(oracle::rel_err(c.log_modulus(), c.phase(), ref) < 1e-11);
}

TEST_CASE("continuation against the log-branch oracle, random half-turns") {
    std::mt19937 rng(421u);
    std::uniform_real_distribution<double> mod(0.3, 30.0), arg(-2.9, 2.9);
    std::uniform_int_distribution<int> ord(0, 20), turns(-3, 4);
    for (int t = 0; t < 100; ++t) {
        cplx z = std::polar(mod(rng), arg(rng));
        int n = ord(rng), m = turns(rng);
        ScaledValue c = rb::continue_h1(n, z, m);
        oracle::Ref ref = oracle::h1_ref(n, z, m);
        CAPTURE(n);
        CAPTURE(m);
        CAPTURE(z.real());
        CAPTURE(z.imag());
        CHECK(oracle::rel_err(c.log_modulus(), c.phase(), ref) < 1e-11);
    }
}

TEST_CASE("leading large-order ratio approximation") {
    double eta1 = std::sqrt(2.0) + std::log(1.0 / (1.0 + std::sqrt(2.0)));
    CHECK(eta1 > 0.0);
    CHECK(rb::debye_ratio(1, 1.0) == doctest::Approx(2.0 * eta1 - std::log(M_PI)));

    for (auto [nu, tol] : std::vector<std::pair<int, double>>{{20, 0.05}, {200, 0.005}}) {
        double x = static_cast<double>(nu);
        double exact = rb::eval_mod(rb::Kind::I, nu, cplx(x, 0.0)).log_modulus() -
                       rb::eval_mod(rb::Kind::K, nu, cplx(x, 0.0)).log_modulus();
        double approx = rb::debye_ratio(nu, 1.0);
        CHECK(std::abs(approx - exact) < tol * std::abs(exact));
    }
    CHECK_THROWS_AS(rb::debye_ratio(10, 0.05), DomainError);
    CHECK_THROWS_AS(rb::debye_ratio(10, 9.0), DomainError);
    CHECK_THROWS_AS(rb::debye_ratio(0, 1.0), DomainError);
}

TEST_CASE("three-term recurrence residuals, 500 random draws") {
    std::mt19937 rng(314159u);
    std::uniform_real_distribution<double> mod(0.5, 100.0), arg(-3.1, 3.1);
    std::uniform_int_distribution<int> ord(1, 100), fam(0, 2);
    for (int t = 0; t < 500; ++t) {
        cplx z = std::polar(mod(rng), arg(rng));
        if (z.imag() == 0.0 && z.real() < 0.0) z += cplx(0.0, 1e-3);
        int nu = ord(rng);
        rb::Kind kind = fam(rng) == 0   ? rb::Kind::J
                        : fam(rng) == 1 ? rb::Kind::Y
                                        : rb::Kind::H1;
        rb::CylBatch b = rb::eval_cyl_batch({nu + 1}, z);
        const auto& v = kind == rb::Kind::J ? b.j : (kind == rb::Kind::Y ? b.y : b.h1);
        if (!v[nu - 1].representable() || !v[nu].representable() ||
            !v[nu + 1].representable())
            continue;
        cplx lo = v[nu - 1].to_complex(), mid = v[nu].to_complex(),
             hi = v[nu + 1].to_complex();
        cplx mid_term = (2.0 * nu / z) * mid;
        double scale = std::max({std::abs(lo), std::abs(hi), std::abs(mid_term)});
        CAPTURE(z.real());
        CAPTURE(z.imag());
        CAPTURE(nu);
        CHECK(std::abs(lo + hi - mid_term) <= 1e-10 * scale);
    }
}

TEST_CASE("Hankel assembly identities") {
    std::mt19937 rng(77u);
    std::uniform_real_distribution<double> mod(0.5, 60.0), arg(-3.1, 3.1);
    std::uniform_int_distribution<int> ord(0, 40);
    for (int t = 0; t < 60; ++t) {
        cplx z = std::polar(mod(rng), arg(rng));
        if (z.imag() == 0.0 && z.real() < 0.0) continue;
        int nu = ord(rng);
        rb::CylBatch b = rb::eval_cyl_batch({nu}, z);
        if (!b.j[nu].representable() || !b.y[nu].representable()) continue;
        cplx j = b.j[nu].to_complex(), y = b.y[nu].to_complex();
        cplx h1 = b.h1[nu].to_complex(), h2 = b.h2[nu].to_complex();
        double scale = std::abs(j) + std::abs(y);
        CHECK(std::abs(h1 - (j + cplx(0, 1) * y)) < 1e-12 * scale);
        CHECK(std::abs(h2 - (j - cplx(0, 1) * y)) < 1e-12 * scale);
    }
}

TEST_CASE("spot accuracy against the multiprecision oracle") {
    struct Case {
        char kind;
        int n;
        cplx z;
    };
    // one representative per evaluation regime, away from transition zones
    const std::vector<Case> cyl = {
        {'J', 0, {0.7, 0.0}},      {'J', 3, {6.0, 1.0}},     {'J', 2, {40.0, 0.5}},
        {'J', 40, {15.0, 3.0}},    {'J', 7, {25.0, 25.0}},   {'Y', 0, {3.0, 1.0}},
        {'Y', 5, {30.0, 1.2}},     {'Y', 12, {9.0, 0.1}},    {'1', 0, {5.0, 0.2}},
        {'1', 4, {12.0, 8.0}},     {'1', 9, {2.0, 30.0}},    {'1', 3, {60.0, 2.5}},
        {'2', 2, {14.0, 0.7}},     {'2', 6, {3.0, 9.0}},     {'J', 1, {0.05, -0.02}},
        {'Y', 2, {7.9, -1.0}},     {'1', 5, {11.0, -4.0}},   {'2', 0, {28.0, -17.0}},
        {'J', 25, {70.0, 0.0}},    {'Y', 30, {77.0, 1.5}},
    };
    for (const auto& c : cyl) {
        rb::Kind k = c.kind == 'J'   ? rb::Kind::J
                     : c.kind == 'Y' ? rb::Kind::Y
                     : c.kind == '1' ? rb::Kind::H1
                                     : rb::Kind::H2;
        CAPTURE(c.kind);
        CAPTURE(c.n);
        CAPTURE(c.z.real());
        CAPTURE(c.z.imag());
        CHECK(engine_vs_oracle(k, c.kind, c.n, c.z) < 1e-12);
    }
    const std::vector<Case> mod = {
        {'I', 0, {0.3, 0.1}},   {'I', 6, {7.0, -2.0}},  {'I', 3, {22.0, 4.0}},
        {'I', 80, {30.0, 0.0}}, {'K', 0, {1.5, 0.8}},   {'K', 2, {12.0, 9.0}},
        {'K', 5, {26.0, -10.0}}, {'K', 60, {14.0, 2.0}}, {'I', 9, {2.0, -1.9}},
        {'K', 1, {0.04, 0.01}},
    };
    for (const auto& c : mod) {
        rb::Kind k = c.kind == 'I' ? rb::Kind::I : rb::Kind::K;
        CAPTURE(c.kind);
        CAPTURE(c.n);
        CAPTURE(c.z.real());
        CAPTURE(c.z.imag());
        CHECK(engine_vs_oracle(k, c.kind, c.n, c.z) < 1e-12);
    }
    // derivatives across regimes
    for (const auto& c : {Case{'J', 4, {17.0, 1.0}}, Case{'Y', 2, {5.0, 0.5}},
                          Case{'1', 6, {9.0, 6.0}}}) {
        rb::Kind k = c.kind == 'J' ? rb::Kind::J : c.kind == 'Y' ? rb::Kind::Y : rb::Kind::H1;
        ScaledValue d = rb::derivative(k, c.n, c.z);
        oracle::Ref ref = oracle::cyl_deriv_ref(c.kind, c.n, c.z);
        CHECK(oracle::rel_err(d.log_modulus(), d.phase(), ref) < 1e-12);
    }
    for (const auto& c : {Case{'I', 5, {19.0, 3.0}}, Case{'K', 3, {4.0, 2.0}}}) {
        rb::Kind k = c.kind == 'I' ? rb::Kind::I : rb::Kind::K;
        ScaledValue d = rb::derivative(k, c.n, c.z);
        oracle::Ref ref = oracle::mod_deriv_ref(c.kind, c.n, c.z);
        CHECK(oracle::rel_err(d.log_modulus(), d.phase(), ref) < 1e-12);
    }
}

TEST_CASE("domain and envelope errors") {
    CHECK_THROWS_AS(rb::eval_cyl(rb::Kind::J, 0, cplx(0.0, 0.0)), DomainError);
    CHECK_THROWS_AS(rb::eval_cyl(rb::Kind::J, 1, cplx(-2.0, 0.0)), DomainError);
    CHECK_THROWS_AS(rb::eval_cyl(rb::Kind::I, 1, cplx(2.0, 0.0)), DomainError);
    CHECK_THROWS_AS(rb::eval_mod(rb::Kind::J, 1, cplx(2.0, 0.0)), DomainError);
    CHECK_THROWS_AS(rb::eval_mod(rb::Kind::K, 1, cplx(-1.0, 3.0)), DomainError);
    CHECK_THROWS_AS(rb::eval_cyl(rb::Kind::J, -1, cplx(2.0, 0.0)), DomainError);
    CHECK_THROWS_AS(rb::eval_cyl(rb::Kind::J, 0, cplx(2e6, 0.0)), AccuracyError);
    double nan = std::nan("");
    CHECK_THROWS_AS(rb::eval_cyl(rb::Kind::J, 0, cplx(nan, 1.0)), DomainError);
}

TEST_CASE("deterministic across repeated and threaded evaluation") {
    const cplx z(23.0, 5.0);
    rb::CylBatch a = rb::eval_cyl_batch({60}, z);
    rb::CylBatch b = rb::eval_cyl_batch({60}, z);
    for (int n = 0; n <= 60; ++n) {
        CHECK(a.h1[n].log_modulus() == b.h1[n].log_modulus());
        CHECK(a.h1[n].phase() == b.h1[n].phase());
    }
    std::vector<double> serial(16), threaded(16);
    for (int i = 0; i < 16; ++i)
        serial[i] = rb::eval_cyl(rb::Kind::H1, i, z).log_modulus();
    reslab::parallel_for(16, [&](std::size_t i) {
        threaded[i] = rb::eval_cyl(rb::Kind::H1, static_cast<int>(i), z).log_modulus();
    });
    CHECK(serial == threaded);
}

} // TEST_SUITE
