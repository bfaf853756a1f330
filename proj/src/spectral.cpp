#include "reslab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "reslab/errors.hpp"
#include "reslab/parallel.hpp"

namespace reslab::spectral {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_pi(double x) { return std::remainder(x, kTwoPi); }

void check_cfg(const SpectralConfig& cfg) {
    if (!(cfg.det.l_factor > 0.0) || !std::isfinite(cfg.det.l_factor) ||
        !(cfg.det.tail_tol > 0.0) || !std::isfinite(cfg.det.tail_tol) || cfg.det.max_l < 2)
        throw DomainError("SpectralConfig: l_factor and tail_tol must be positive, max_l >= 2");
    if (!(cfg.max_increment > 0.0) || !(cfg.max_increment < M_PI / 2.0))
        throw DomainError("SpectralConfig: max_increment must lie in (0, pi/2)");
    if (cfg.max_phase_evals < 1)
        throw DomainError("SpectralConfig: max_phase_evals must be positive");
}

void check_grid(const std::vector<double>& grid, const char* who) {
    if (grid.empty()) throw DomainError(std::string(who) + ": empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
            throw DomainError(std::string(who) + ": grid values must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw DomainError(std::string(who) + ": grid must be strictly increasing");
    }
}

int initial_cut(const SpectralConfig& cfg, const pw::BallProblem& p, double r) {
    const double raw = std::ceil(cfg.det.l_factor * r * p.radius) + 40.0;
    return static_cast<int>(std::min(raw, static_cast<double>(cfg.det.max_l)));
}

// Same estimate the determinant sums use: a geometric bound from the decay of
// the last two terms, clamped by 10x the recent floor so a sum that has sunk
// to rounding noise still converges.
double tail_bound(const std::vector<double>& t) {
    const std::size_t n = t.size();
    double last = std::fabs(t[n - 1]);
    double prev = std::fabs(t[n - 2]);
    double geo = std::numeric_limits<double>::infinity();
    if (last == 0.0) {
        geo = 0.0;
    } else if (prev > last) {
        double q = last / prev;
        geo = 10.0 * last * q / (1.0 - q);
    }
    double floor3 = 0.0;
    for (std::size_t i = n - std::min<std::size_t>(3, n); i < n; ++i)
        floor3 = std::max(floor3, std::fabs(t[i]));
    return std::min(geo, 10.0 * floor3);
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

[[noreturn]] void unwrap_fail(int l, double t) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "phase_trace: step bound unreachable at l=%d, r=%.17g", l, t);
    throw UnwrapError(buf);
}

// Unwrapped phases at every grid point for one angular momentum. The walk
// starts at t0 <= 1e-4 where even the d=2 logarithmic rate keeps the phase
// inside (-pi/2, pi/2), so seeding from the folded value loses no turns.
std::vector<double> walk_phases(const pw::BallProblem& p, int l,
                                const std::vector<double>& grid,
                                const SpectralConfig& cfg) {
    const double h_max = 0.5 / p.radius;
    long long evals = 0;
    auto phase_at = [&](double t) {
        if (++evals > cfg.max_phase_evals) unwrap_fail(l, t);
        return pw::eigenphase(p, l, t).theta;
    };

    double cur_t = std::min(1e-4, 0.5 * grid.front());
    double cur_ph = phase_at(cur_t);
    double theta = cur_ph;
    double h = h_max / 8.0;

    std::vector<double> out;
    out.reserve(grid.size());
    for (double target : grid) {
        while (cur_t < target) {
            double step = std::min(h, target - cur_t);
            double t_next = cur_t + step;
            if (target - t_next < 1e-12 * target) t_next = target;
            const double ph = phase_at(t_next);
            const double inc = wrap_pi(ph - cur_ph);
            if (std::fabs(inc) > cfg.max_increment) {
                if (step <= 1e-9 * (1.0 + cur_t)) unwrap_fail(l, cur_t);
                h = 0.5 * step;
                continue;
            }
            theta += inc;
            cur_t = t_next;
            cur_ph = ph;
            if (std::fabs(inc) < 0.3 * cfg.max_increment) h = std::min(1.7 * h, h_max);
        }
        out.push_back(theta);
    }
    return out;
}

// mult(l) * Theta_l at the top radius for l in [0, l_hi], every grid radius
// retained per l. The doubling caller only ever appends, so earlier walks are
// reused verbatim.
struct PhaseLadder {
    std::vector<std::vector<double>> traces; // [l][grid index]
    std::vector<double> top_terms;           // mult(l) * Theta_l(grid.back())

    void extend(const pw::BallProblem& p, const std::vector<double>& grid,
                const SpectralConfig& cfg, int l_hi) {
        const int l_lo = static_cast<int>(traces.size());
        if (l_hi < l_lo) return;
        std::vector<std::vector<double>> fresh(l_hi - l_lo + 1);
        parallel_for(fresh.size(), [&](std::size_t i) {
            fresh[i] = walk_phases(p, l_lo + static_cast<int>(i), grid, cfg);
        });
        for (auto& t : fresh) {
            const int l = static_cast<int>(traces.size());
            top_terms.push_back(static_cast<double>(pw::multiplicity(l, p.dim)) * t.back());
            traces.push_back(std::move(t));
        }
    }
};

PhaseLadder converged_ladder(const pw::BallProblem& p, const std::vector<double>& grid,
                             const SpectralConfig& cfg, int* l_used) {
    PhaseLadder ladder;
    int l_hi = initial_cut(cfg, p, grid.back());
    for (;;) {
        ladder.extend(p, grid, cfg, l_hi);
        const double tail = tail_bound(ladder.top_terms);
        if (tail <= cfg.det.tail_tol) {
            if (l_used) *l_used = l_hi;
            return ladder;
        }
        if (l_hi >= cfg.det.max_l)
            throw TruncationError("scattering_phase: tail still above tail_tol at max_l");
        l_hi = std::min(2 * l_hi, cfg.det.max_l);
    }
}

int sign_of(const ScaledValue& v) {
    if (v.is_zero()) return 0;
    return std::fabs(v.phase_principal()) < M_PI / 2.0 ? 1 : -1;
}

// Zeros of the interior functional in w = lambda R on (0, w_hi], sign-change
// bisection on a pi/4 grid (consecutive zeros are >= ~pi apart). The left
// endpoint sits at 1e-8, not at the first grid step: a Robin constant tuned
// within O(1/nu) of nu parks a zero at w ~ sqrt(2(nu+1)(nu-shift)), which can
// undercut pi/4.
std::vector<double> interior_zeros_w(const pw::BallProblem& p, int l, double w_hi) {
    const double step = M_PI / 4.0;
    auto f = [&](double w) { return sign_of(pw::interior_char(p, l, w / p.radius)); };
    std::vector<double> zeros;
    if (!(w_hi > 1e-8)) return zeros;
    double a = 1e-8;
    int sa = f(a);
    while (a < w_hi) {
        const double b = std::min(a + step, w_hi);
        const int sb = f(b);
        if (sb == 0) {
            zeros.push_back(b);
        } else if (sa != 0 && sa != sb) {
            double lo = a, hi = b;
            for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                const int sm = f(mid);
                if (sm == 0) {
                    lo = hi = mid;
                    break;
                }
                (sm == sa ? lo : hi) = mid;
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        a = b;
        sa = sb;
    }
    return zeros;
}

// k-th interior zero for one l, extending the scan window until found.
double kth_interior_zero(const pw::BallProblem& p, int l, int k) {
    double w_hi = std::max(20.0, static_cast<double>(p.nu_of(l)) + 10.0);
    for (;;) {
        const auto zeros = interior_zeros_w(p, l, w_hi);
        if (static_cast<int>(zeros.size()) >= k)
            return zeros[static_cast<std::size_t>(k) - 1] / p.radius;
        if (w_hi > 1e6)
            throw DomainError("duality_probe: interior zero index out of reach");
        w_hi *= 2.0;
    }
}

} // namespace

PhaseTrace phase_trace(const pw::BallProblem& p, int l, const std::vector<double>& r_grid,
                       const SpectralConfig& cfg) {
    if (l < 0) throw DomainError("phase_trace: angular momentum must be >= 0");
    check_cfg(cfg);
    check_grid(r_grid, "phase_trace");
    PhaseTrace t;
    t.l = l;
    t.r = r_grid;
    t.theta = walk_phases(p, l, r_grid, cfg);
    return t;
}

double scattering_phase(const pw::BallProblem& p, double r, const SpectralConfig& cfg) {
    check_cfg(cfg);
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("scattering_phase: r must be positive");
    const std::vector<double> grid = {r};
    const PhaseLadder ladder = converged_ladder(p, grid, cfg, nullptr);
    return asc_sum(ladder.top_terms) / kTwoPi;
}

WeylReport weyl_report(const pw::BallProblem& p, const std::vector<double>& r_grid,
                       const SpectralConfig& cfg) {
    check_cfg(cfg);
    check_grid(r_grid, "weyl_report");
    if (r_grid.size() < 3)
        throw DomainError("weyl_report: need at least 3 radii for the interior fit");

    WeylReport rep;
    rep.r_grid = r_grid;
    const PhaseLadder ladder = converged_ladder(p, r_grid, cfg, &rep.l_max_used);

    const int d = p.dim;
    const double omega = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    rep.c_weyl = std::pow(kTwoPi, -d) * omega * omega * std::pow(p.radius, d);

    std::vector<double> terms(ladder.traces.size());
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        for (std::size_t l = 0; l < ladder.traces.size(); ++l)
            terms[l] = static_cast<double>(pw::multiplicity(static_cast<int>(l), d)) *
                       ladder.traces[l][k];
        const double phi = asc_sum(terms) / kTwoPi;
        const double r = r_grid[k];
        const double weyl = -rep.c_weyl * std::pow(r, d);
        rep.phase.push_back(phi);
        rep.weyl_term.push_back(weyl);
        rep.defect.push_back(phi - weyl);
        rep.normalized.push_back((phi - weyl) / std::pow(r, d - 1));
    }

    // Independent recovery of c_weyl: count interior eigenvalues and fit
    // c r^d + b r^{d-1} (the boundary term matters at desk-scale radii).
    const auto interior = interior_eigenvalues(p, r_grid.back());
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (double r : r_grid) {
        double n = 0;
        for (const auto& e : interior)
            if (e.lambda0 <= r) n += static_cast<double>(e.mult);
        const double rd = std::pow(r, d), rb = std::pow(r, d - 1);
        a11 += rd * rd;
        a12 += rd * rb;
        a22 += rb * rb;
        b1 += n * rd;
        b2 += n * rb;
    }
    const double det = a11 * a22 - a12 * a12;
    rep.c_interior_fit = (b1 * a22 - b2 * a12) / det;
    if (!(std::fabs(rep.c_interior_fit - rep.c_weyl) <= 0.05 * rep.c_weyl))
        throw AccuracyError(
            "weyl_report: interior-count fit disagrees with the Weyl constant by > 5%");
    return rep;
}

double phase_defect_sum(const pw::BallProblem& p, double r, const SpectralConfig& cfg) {
    check_cfg(cfg);
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("phase_defect_sum: r must be positive");
    int l_hi = initial_cut(cfg, p, r);
    for (;;) {
        const std::vector<double> thetas = pw::eigenphase_batch(p, l_hi, r);
        std::vector<double> terms(thetas.size());
        for (std::size_t l = 0; l < thetas.size(); ++l)
            terms[l] = static_cast<double>(pw::multiplicity(static_cast<int>(l), p.dim)) *
                       std::fabs(thetas[l]);
        if (tail_bound(terms) <= cfg.det.tail_tol) return asc_sum(terms);
        if (l_hi >= cfg.det.max_l)
            throw TruncationError("phase_defect_sum: tail still above tail_tol at max_l");
        l_hi = std::min(2 * l_hi, cfg.det.max_l);
    }
}

std::vector<InteriorEigenvalue> interior_eigenvalues(const pw::BallProblem& p, double r_max) {
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw DomainError("interior_eigenvalues: r_max must be positive");
    std::vector<InteriorEigenvalue> out;
    const double w_hi = r_max * p.radius;
    int empty_streak = 0;
    for (int l = 0;; ++l) {
        const auto zeros = interior_zeros_w(p, l, w_hi);
        if (zeros.empty()) {
            if (++empty_streak == 2) break;
        } else {
            empty_streak = 0;
            const std::int64_t mult = pw::multiplicity(l, p.dim);
            for (double w : zeros) out.push_back({w / p.radius, l, mult});
        }
        if (l > 4.0 * w_hi + 100.0)
            throw TruncationError("interior_eigenvalues: zero scan failed to terminate");
    }
    std::sort(out.begin(), out.end(), [](const InteriorEigenvalue& a,
                                         const InteriorEigenvalue& b) {
        if (a.lambda0 != b.lambda0) return a.lambda0 < b.lambda0;
        return a.l < b.l;
    });
    return out;
}

std::vector<DualitySample> duality_probe(const pw::BallProblem& p, int l, int k,
                                         const std::vector<double>& deltas) {
    if (l < 0) throw DomainError("duality_probe: angular momentum must be >= 0");
    if (k < 1) throw DomainError("duality_probe: zero index starts at 1");
    if (deltas.empty()) throw DomainError("duality_probe: no deltas");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0) || !std::isfinite(deltas[i]))
            throw DomainError("duality_probe: deltas must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1]))
            throw DomainError("duality_probe: deltas must be strictly decreasing");
    }
    const double lambda0 = kth_interior_zero(p, l, k);
    const bool below = p.bc.is_dirichlet(); // Robin/Neumann approach from above
    std::vector<DualitySample> out;
    out.reserve(deltas.size());
    for (double delta : deltas) {
        const double lam = below ? lambda0 - delta : lambda0 + delta;
        if (!(lam > 0.0))
            throw DomainError("duality_probe: delta reaches past the spectrum bottom");
        out.push_back({delta, pw::s_coefficient(p, l, lam)});
    }
    return out;
}

std::vector<ZeroLimitRow> s_zero_limit(const pw::BallProblem& p,
                                       const std::vector<double>& epsilons) {
    if (epsilons.empty()) throw DomainError("s_zero_limit: no epsilons");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i]))
            throw DomainError("s_zero_limit: epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw DomainError("s_zero_limit: epsilons must be strictly decreasing");
    }
    std::vector<ZeroLimitRow> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons) {
        double dev = 0.0;
        for (int l = 0; l <= 3; ++l) {
            const ScaledValue sm1 = pw::s_minus_one(p, l, eps);
            if (!sm1.is_zero()) dev = std::max(dev, std::exp(sm1.log_modulus()));
        }
        out.push_back({eps, dev});
    }
    return out;
}

} // namespace reslab::spectral
