#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "reslab/errors.hpp"

namespace reslab {

// A nonzero complex number stored as exp(log_mod + i*phase), plus an explicit
// zero state. Modified Bessel magnitudes overflow double around |log| ~ 709
// (I_nu(x) for x ~ 350 at moderate nu already does), so every Bessel-facing
// quantity is carried in this form. The phase is kept as an accumulated real
// number, not reduced into (-pi, pi]; callers that need a principal argument
// reduce explicitly.
class ScaledValue {
  public:
    constexpr ScaledValue() = default; // zero

    ScaledValue(double log_mod, double phase)
        : lm_(log_mod), ph_(phase), zero_(false) {
        if (!std::isfinite(log_mod) || !std::isfinite(phase))
            throw DomainError("ScaledValue: non-finite log modulus or phase");
    }

    static ScaledValue zero() { return ScaledValue(); }

    static ScaledValue one() { return ScaledValue(0.0, 0.0); }

    static ScaledValue from_complex(std::complex<double> v) {
        if (v == std::complex<double>(0.0, 0.0)) return zero();
        return ScaledValue(std::log(std::abs(v)), std::arg(v));
    }

    static ScaledValue from_real(double v) {
        if (v == 0.0) return zero();
        return ScaledValue(std::log(std::fabs(v)), v > 0 ? 0.0 : M_PI);
    }

    bool is_zero() const { return zero_; }

    // Defined only for nonzero values; the zero state is a flag, not -inf.
    double log_modulus() const {
        if (zero_) throw DomainError("ScaledValue: log_modulus of zero");
        return lm_;
    }

    double phase() const {
        if (zero_) throw DomainError("ScaledValue: phase of zero");
        return ph_;
    }

    // Phase reduced to (-pi, pi].
    double phase_principal() const {
        double p = std::remainder(phase(), 2.0 * M_PI);
        if (p <= -M_PI) p = M_PI;
        return p;
    }

    // Underflows quietly to 0; overflow is an error because the caller would
    // silently compute with inf.
    std::complex<double> to_complex() const {
        if (zero_) return {0.0, 0.0};
        if (lm_ > 700.0)
            throw AccuracyError("ScaledValue: modulus exceeds double range");
        if (lm_ < -745.0) return {0.0, 0.0};
        double m = std::exp(lm_);
        return {m * std::cos(ph_), m * std::sin(ph_)};
    }

    bool representable() const { return zero_ || std::fabs(lm_) < 700.0; }

    // For quantities known to be real up to roundoff: signed magnitude.
    double signed_real() const {
        if (zero_) return 0.0;
        double c = std::cos(ph_);
        double m = lm_ > 700.0 ? std::numeric_limits<double>::infinity()
                               : std::exp(std::max(lm_, -745.0));
        return c >= 0 ? m : -m;
    }

    ScaledValue operator*(const ScaledValue& o) const {
        if (zero_ || o.zero_) return zero();
        return ScaledValue(lm_ + o.lm_, ph_ + o.ph_);
    }

    ScaledValue operator/(const ScaledValue& o) const {
        if (o.zero_) throw DomainError("ScaledValue: division by zero value");
        if (zero_) return zero();
        return ScaledValue(lm_ - o.lm_, ph_ - o.ph_);
    }

    ScaledValue operator-() const {
        if (zero_) return zero();
        return ScaledValue(lm_, ph_ + M_PI);
    }

    ScaledValue conj() const {
        if (zero_) return zero();
        return ScaledValue(lm_, -ph_);
    }

    ScaledValue scaled_by(std::complex<double> c) const {
        if (zero_) return zero();
        return *this * from_complex(c);
    }

    ScaledValue scaled_by_real(double c) const {
        if (zero_ || c == 0.0) return zero();
        return *this * from_real(c);
    }

    // this + other, staying in scaled form. Accuracy degrades in the usual way
    // when the two terms nearly cancel; callers that care restructure algebra.
    ScaledValue add(const ScaledValue& o) const {
        if (zero_) return o;
        if (o.zero_) return *this;
        const ScaledValue *big = this, *small = &o;
        if (o.lm_ > lm_) std::swap(big, small);
        double d = small->lm_ - big->lm_;
        if (d < -745.0) return *big;
        std::complex<double> w =
            std::exp(d) * std::complex<double>(std::cos(small->ph_ - big->ph_),
                                               std::sin(small->ph_ - big->ph_));
        std::complex<double> s = 1.0 + w;
        if (s == std::complex<double>(0.0, 0.0)) return zero();
        return ScaledValue(big->lm_ + std::log(std::abs(s)),
                           big->ph_ + std::arg(s));
    }

    ScaledValue sub(const ScaledValue& o) const { return add(-o); }

    // Ratio this/denom as a plain complex number when representable.
    std::complex<double> ratio(const ScaledValue& denom) const {
        return (*this / denom).to_complex();
    }

  private:
    double lm_ = 0.0;
    double ph_ = 0.0;
    bool zero_ = true;
};

} // namespace reslab
