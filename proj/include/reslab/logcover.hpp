#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <string_view>
#include <variant>

#include "reslab/errors.hpp"

// Points of the logarithmic cover of C \ {0}: a positive modulus together
// with an unbounded real argument. Sheet m is the open half-plane band
// m*pi < arg < (m+1)*pi; sheet 0 is the physical (upper) half-plane.
namespace reslab::logcover {

struct LogPoint {
    double modulus = 1.0; // > 0
    double arg = 0.0;     // absolute argument, any real
};

struct SheetIndex {
    int m;
    friend bool operator==(SheetIndex a, SheetIndex b) { return a.m == b.m; }
};

// arg is within tolerance of k*pi: the point sits on the ray between sheets
// k-1 and k (k even: positive real ray copies; k odd: negative real ray).
struct BoundaryRay {
    int k;
    friend bool operator==(BoundaryRay a, BoundaryRay b) { return a.k == b.k; }
};

using SheetLocation = std::variant<SheetIndex, BoundaryRay>;

inline constexpr double kSheetBoundaryTol = 1e-12;

inline void validate(const LogPoint& p) {
    if (!(p.modulus > 0.0) || !std::isfinite(p.modulus) || !std::isfinite(p.arg))
        throw DomainError("LogPoint: modulus must be positive and finite");
}

inline SheetLocation sheet_of(const LogPoint& p, double tol = kSheetBoundaryTol) {
    validate(p);
    double q = p.arg / M_PI;
    double k = std::round(q);
    if (std::fabs(p.arg - k * M_PI) <= tol)
        return BoundaryRay{static_cast<int>(k)};
    double f = std::floor(q);
    // guard against floor landing on the wrong side after roundoff
    if (p.arg < f * M_PI) f -= 1.0;
    if (p.arg >= (f + 1.0) * M_PI) f += 1.0;
    return SheetIndex{static_cast<int>(f)};
}

inline LogPoint rotate(LogPoint p, int half_turns) {
    validate(p);
    p.arg += half_turns * M_PI;
    return p;
}

// Projection to the base space C \ {0}; forgets the sheet.
inline std::complex<double> project(const LogPoint& p) {
    validate(p);
    return {p.modulus * std::cos(p.arg), p.modulus * std::sin(p.arg)};
}

inline LogPoint from_projection(std::complex<double> z, int sheet_hint = 0) {
    if (z == std::complex<double>(0.0, 0.0))
        throw DomainError("LogPoint: zero has no cover point");
    double a = std::arg(z); // (-pi, pi]
    // lift into the band starting at sheet_hint*pi
    while (a <= sheet_hint * M_PI) a += 2.0 * M_PI;
    while (a > (sheet_hint + 2) * M_PI) a -= 2.0 * M_PI;
    return LogPoint{std::abs(z), a};
}

// Round-trippable text form "modulus@arg", 17 significant digits each.
inline std::string to_string(const LogPoint& p) {
    validate(p);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g@%.17g", p.modulus, p.arg);
    return buf;
}

inline LogPoint parse(std::string_view s) {
    auto at = s.find('@');
    if (at == std::string_view::npos)
        throw DomainError("LogPoint: missing '@' separator");
    auto parse_num = [](std::string_view t) {
        double v = 0.0;
        auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || end != t.data() + t.size())
            throw DomainError("LogPoint: malformed number");
        return v;
    };
    LogPoint p{parse_num(s.substr(0, at)), parse_num(s.substr(at + 1))};
    validate(p);
    return p;
}

} // namespace reslab::logcover
