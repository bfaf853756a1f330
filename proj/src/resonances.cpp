#include "reslab/resonances.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "reslab/bessel.hpp"
#include "reslab/errors.hpp"
#include "reslab/parallel.hpp"

namespace reslab::resonances {
namespace {

using cplx = std::complex<double>;
namespace rb = reslab::bessel;

constexpr double kTwoPi = 2.0 * M_PI;
// Bisect a contour step once its phase increment reaches 90% of pi/2.
constexpr double kAcceptStep = 0.45 * M_PI;
// A still-too-fast increment over a segment this short means a zero sits
// essentially on the contour: perturb instead of refining further.
constexpr double kMinSegment = 1e-6;
constexpr double kPerturbFraction = 1e-4;
constexpr int kPerturbTries = 3;
constexpr long kEvalBudget = 2'000'000;
// Subdivide until a box is small enough that Newton from its center stays in
// the basin of the single zero it isolates.
constexpr double kLeafDiameter = 0.05;
// Below this the subdivision has stopped making progress; give up honestly.
constexpr double kFloorDiameter = 1e-5;
constexpr double kSameZero = 1e-7;  // same-l duplicates from adjacent boxes
constexpr double kMergeZero = 1e-9; // cross-l coincidences get merged+flagged

// Control flow only: caught by the perturbation loop, never leaves count_zeros.
struct NearContourZero {};

double wrap_pi(double x) {
    double r = std::remainder(x, kTwoPi);
    if (r <= -M_PI) r = M_PI;
    return r;
}

void check_point(cplx z, const char* who) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError(std::string(who) + ": non-finite point");
}

// ---------------------------------------------------------------------------
// Adaptive phase tracking along polylines and circles.

struct PhaseWalk {
    const ScalarFn& fn;
    long evals = 0;

    struct Pt {
        cplx z;
        double ph;
    };

    Pt at(cplx z) {
        if (++evals > kEvalBudget)
            throw AccuracyError(
                "count_zeros: phase tracking exceeded its evaluation budget");
        ScaledValue v = fn(z);
        if (v.is_zero()) throw NearContourZero{};
        return {z, v.phase_principal()};
    }

    // Signed phase change along the straight segment a -> b.
    double seg(const Pt& a, const Pt& b) {
        double d = wrap_pi(b.ph - a.ph);
        if (std::abs(d) < kAcceptStep) return d;
        if (std::abs(b.z - a.z) < kMinSegment) throw NearContourZero{};
        Pt m = at(0.5 * (a.z + b.z));
        return seg(a, m) + seg(m, b);
    }

    // Advance cur to b, accumulating phase. The initial stride comes from the
    // speed hint so that a whole winding can never alias between samples.
    double edge(const SpeedHint& speed, Pt& cur, cplx b) {
        const cplx a0 = cur.z;
        const double len = std::abs(b - a0);
        if (len == 0.0) return 0.0;
        const cplx dir = (b - a0) / len;
        double total = 0.0;
        double t = 0.0;
        while (t < len) {
            double h = 0.25;
            if (speed)
                h = std::clamp(kAcceptStep / std::max(speed(cur.z), 1e-12), 1e-7, 0.5);
            double tn = t + h;
            Pt nxt = tn >= len ? at(b) : at(a0 + dir * tn);
            total += seg(cur, nxt);
            cur = nxt;
            t = tn;
        }
        return total;
    }
};

int winding_rectangle(const ScalarFn& fn, const SearchBox& b, const SpeedHint& speed) {
    PhaseWalk w{fn};
    const std::array<cplx, 4> corner = {cplx(b.re_lo, b.im_lo), cplx(b.re_hi, b.im_lo),
                                        cplx(b.re_hi, b.im_hi), cplx(b.re_lo, b.im_hi)};
    PhaseWalk::Pt cur = w.at(corner[0]);
    double total = 0.0;
    for (int e = 1; e <= 4; ++e) total += w.edge(speed, cur, corner[e % 4]);
    const long n = std::lround(total / kTwoPi);
    if (std::abs(total - static_cast<double>(n) * kTwoPi) > 1e-3)
        throw AccuracyError("count_zeros: contour phase did not close to a full turn");
    if (n < 0)
        throw AccuracyError("count_zeros: negative winding; a pole inside the box?");
    return static_cast<int>(n);
}

SearchBox expanded(const SearchBox& b, double d) {
    // Never cross the real axis, and keep strictly-interior bottoms strictly
    // interior: the functions searched here live on the closed UHP only.
    double lo = std::max(b.im_lo - d, b.im_lo > 0.0 ? 0.5 * b.im_lo : 0.0);
    return {b.re_lo - d, b.re_hi + d, lo, b.im_hi + d};
}

void check_box(const SearchBox& b) {
    if (!std::isfinite(b.re_lo) || !std::isfinite(b.re_hi) || !std::isfinite(b.im_lo) ||
        !std::isfinite(b.im_hi))
        throw DomainError("SearchBox: non-finite bounds");
    if (!(b.re_hi > b.re_lo) || !(b.im_hi > b.im_lo))
        throw DomainError("SearchBox: bounds must satisfy re_hi > re_lo, im_hi > im_lo");
    if (b.im_lo < 0.0)
        throw DomainError("SearchBox: boxes live in the closed upper half-plane");
}

// Winding of fn around a small circle at z0: the order of the zero there.
int circle_order(const JetFn& fn, cplx z0) {
    long evals = 0;
    double rad = 1e-8 * (1.0 + std::abs(z0));
    for (int attempt = 0; attempt < 3; ++attempt, rad *= 3.7) {
        auto at = [&](double th) {
            if (++evals > kEvalBudget)
                throw AccuracyError("refine_zero: order winding exceeded its budget");
            ScaledValue v = fn(z0 + rad * cplx(std::cos(th), std::sin(th)))[0];
            if (v.is_zero()) throw NearContourZero{};
            return v.phase_principal();
        };
        // theta-space analogue of PhaseWalk::seg
        std::function<double(double, double, double, double)> arc =
            [&](double ta, double pa, double tb, double pb) -> double {
            double d = wrap_pi(pb - pa);
            if (std::abs(d) < kAcceptStep) return d;
            if (tb - ta < 1e-6) throw NearContourZero{};
            double tm = 0.5 * (ta + tb);
            double pm = at(tm);
            return arc(ta, pa, tm, pm) + arc(tm, pm, tb, pb);
        };
        try {
            const int n0 = 16;
            double total = 0.0;
            double t_prev = 0.0, p_prev = at(0.0), p_first = p_prev;
            for (int i = 1; i <= n0; ++i) {
                double t = kTwoPi * i / n0;
                double p = i == n0 ? p_first : at(t);
                total += arc(t_prev, p_prev, t, p);
                t_prev = t;
                p_prev = p;
            }
            const long n = std::lround(total / kTwoPi);
            if (std::abs(total - static_cast<double>(n) * kTwoPi) > 1e-3)
                throw AccuracyError("refine_zero: order winding did not close");
            return static_cast<int>(n);
        } catch (const NearContourZero&) {
            continue; // another zero grazes this circle; retry wider
        }
    }
    throw AccuracyError("refine_zero: could not find a clean circle for the order");
}

// ---------------------------------------------------------------------------
// Boundary-functional jets for the ball.

struct BoundaryJet {
    ScaledValue b, db; // value and d/dlambda
};

// c carries one cylinder family at integer orders 0..nu+1 evaluated at
// w = lambda R. C'_nu = (C_{nu-1} - C_{nu+1})/2 with C_{-1} = -C_1.
BoundaryJet boundary_jet(const pw::BallProblem& p, const std::vector<ScaledValue>& c,
                         int nu, cplx lambda) {
    const cplx w = lambda * p.radius;
    ScaledValue lower = nu == 0 ? -c[1] : c[nu - 1];
    ScaledValue deriv = lower.sub(c[nu + 1]).scaled_by_real(0.5);
    if (p.bc.is_dirichlet()) return {c[nu], deriv.scaled_by_real(p.radius)};
    const double shift = p.bc.h0 + 0.5 * (p.dim - 2);
    ScaledValue b = c[nu].scaled_by_real(shift).sub(deriv.scaled_by(w));
    // d/dlambda [shift C - w C'] = R [shift C' + (w - nu^2/w) C]; the cylinder
    // equation w^2 C'' = -w C' - (w^2 - nu^2) C eliminates C''.
    const cplx poly = w - static_cast<double>(nu) * static_cast<double>(nu) / w;
    ScaledValue db =
        deriv.scaled_by_real(shift).add(c[nu].scaled_by(poly)).scaled_by_real(p.radius);
    return {b, db};
}

void check_sheet_args(int l, int m, cplx lambda) {
    if (l < 0) throw DomainError("sheet_function: angular momentum must be >= 0");
    if (m < 1) throw DomainError("sheet_function: sheet index must be >= 1");
    check_point(lambda, "sheet_function");
    if (lambda == cplx(0.0, 0.0))
        throw DomainError("sheet_function: lambda = 0 is not on the cover");
    if (lambda.imag() < 0.0)
        throw DomainError("sheet_function: zeros are searched in the closed UHP only");
    if (lambda.imag() == 0.0 && lambda.real() < 0.0)
        throw DomainError(
            "sheet_function: the negative real ray is not on the principal branch");
}

// ---------------------------------------------------------------------------
// Region scan for one angular momentum.

struct LScan {
    long long region_count = 0;
    long long boxes = 0;
    long long errored = 0;
    bool gave_up = false;
    std::vector<Refined> zeros;
};

// The region covering {|lambda| <= r_max, Im > 0}: wings and a center column
// above Im = 1e-3, plus two shallow strips below it. The column keeps the
// origin-adjacent stretch of the bottom edge short (H_nu ~ w^{-nu} makes the
// phase speed blow up like nu/|lambda| there), and the strips stay |Re| >=
// 0.35 away from the branch point, where none of these combinations vanish.
// Height must reach r_max: for order nu the zeros arc from the positive axis
// over a crest near i * 0.663 nu down to the negative-axis string, and at the
// crest Im is essentially the whole modulus, so no sublinear cap is safe.
std::vector<SearchBox> region_boxes(double r_max) {
    const double im_floor = 1e-3;
    const double im_top = r_max + 1.0;
    const double q = 0.35;
    if (r_max <= q) return {{-r_max, r_max, im_floor, im_top}};
    return {{-r_max, -q, im_floor, im_top},
            {-q, q, im_floor, im_top},
            {q, r_max, im_floor, im_top},
            {-r_max, -q, 1e-9, im_floor},
            {q, r_max, 1e-9, im_floor}};
}

LScan scan_l(const pw::BallProblem& p, int l, int mm, double r_max) {
    const int nu = p.nu_of(l);
    const ScalarFn fn = [&p, l, mm](cplx z) { return sheet_function(p, l, mm, z); };
    const JetFn jet = [&p, l, mm](cplx z) { return sheet_function_jet(p, l, mm, z); };
    const SpeedHint speed = [R = p.radius, nu](cplx z) {
        return 1.6 * R + (nu + 1.0) / std::max(std::abs(z), 1e-12);
    };

    LScan out;
    auto safe_count = [&](const SearchBox& b) -> long long {
        ++out.boxes;
        try {
            return count_zeros(fn, b, speed);
        } catch (const ContourError&) {
            ++out.errored;
            out.gave_up = true;
        } catch (const AccuracyError&) {
            ++out.errored;
            out.gave_up = true;
        }
        return 0;
    };

    struct Work {
        SearchBox b;
        long long count;
    };
    std::vector<Work> stack;
    for (const SearchBox& b : region_boxes(r_max)) {
        long long c = safe_count(b);
        out.region_count += c;
        if (c > 0) stack.push_back({b, c});
    }

    auto subdivide = [&](const Work& wk) {
        const double rm = 0.5 * (wk.b.re_lo + wk.b.re_hi);
        const double im = 0.5 * (wk.b.im_lo + wk.b.im_hi);
        const SearchBox quad[4] = {{wk.b.re_lo, rm, wk.b.im_lo, im},
                                   {rm, wk.b.re_hi, wk.b.im_lo, im},
                                   {rm, wk.b.re_hi, im, wk.b.im_hi},
                                   {wk.b.re_lo, rm, im, wk.b.im_hi}};
        for (const SearchBox& q : quad) {
            long long c = safe_count(q);
            if (c > 0) stack.push_back({q, c});
        }
    };

    auto try_refine = [&](const Work& wk) -> std::pair<bool, Refined> {
        const cplx center(0.5 * (wk.b.re_lo + wk.b.re_hi), 0.5 * (wk.b.im_lo + wk.b.im_hi));
        const cplx seeds[5] = {
            center,
            {0.75 * wk.b.re_lo + 0.25 * wk.b.re_hi, 0.75 * wk.b.im_lo + 0.25 * wk.b.im_hi},
            {0.25 * wk.b.re_lo + 0.75 * wk.b.re_hi, 0.75 * wk.b.im_lo + 0.25 * wk.b.im_hi},
            {0.25 * wk.b.re_lo + 0.75 * wk.b.re_hi, 0.25 * wk.b.im_lo + 0.75 * wk.b.im_hi},
            {0.75 * wk.b.re_lo + 0.25 * wk.b.re_hi, 0.25 * wk.b.im_lo + 0.75 * wk.b.im_hi}};
        const double margin = 1e-3 * wk.b.diameter() + 1e-6;
        for (const cplx& s : seeds) {
            try {
                Refined r = refine_zero(jet, s);
                if (wk.b.contains(r.zero, margin) && r.zero.imag() > 0.0) return {true, r};
            } catch (const NoConvergence&) {
            } catch (const AccuracyError&) {
            }
        }
        return {false, {}};
    };

    while (!stack.empty()) {
        Work wk = stack.back();
        stack.pop_back();
        if (wk.b.diameter() < kLeafDiameter) {
            auto [ok, r] = try_refine(wk);
            if (ok && r.order == wk.count) {
                out.zeros.push_back(r);
                continue;
            }
            if (wk.b.diameter() < kFloorDiameter) {
                // Subdivision stopped separating whatever is in here.
                if (ok) out.zeros.push_back(r);
                out.gave_up = true;
                continue;
            }
        }
        subdivide(wk);
    }

    // Same zero reached from adjacent boxes (outward-perturbed contours
    // overlap across shared edges): keep one copy.
    std::sort(out.zeros.begin(), out.zeros.end(), [](const Refined& a, const Refined& b) {
        if (a.zero.real() != b.zero.real()) return a.zero.real() < b.zero.real();
        return a.zero.imag() < b.zero.imag();
    });
    std::vector<Refined> dedup;
    for (const Refined& r : out.zeros) {
        if (!dedup.empty() && std::abs(dedup.back().zero - r.zero) < kSameZero) {
            dedup.back().order = std::max(dedup.back().order, r.order);
            continue;
        }
        dedup.push_back(r);
    }
    out.zeros = std::move(dedup);

    long long orders = 0;
    for (const Refined& r : out.zeros) orders += r.order;
    if (orders != out.region_count) out.gave_up = true;
    return out;
}

} // namespace

double SearchBox::diameter() const { return std::hypot(width(), height()); }

bool SearchBox::contains(cplx z, double margin) const {
    return z.real() >= re_lo - margin && z.real() <= re_hi + margin &&
           z.imag() >= im_lo - margin && z.imag() <= im_hi + margin;
}

ScaledValue sheet_function(const pw::BallProblem& p, int l, int m, cplx lambda) {
    return sheet_function_jet(p, l, m, lambda)[0];
}

std::array<ScaledValue, 2> sheet_function_jet(const pw::BallProblem& p, int l, int m,
                                              cplx lambda) {
    check_sheet_args(l, m, lambda);
    const int nu = p.nu_of(l);
    const rb::CylBatch b = rb::eval_cyl_batch({nu + 1}, lambda * p.radius);
    const BoundaryJet j1 = boundary_jet(p, b.h1, nu, lambda);
    const BoundaryJet j2 = boundary_jet(p, b.h2, nu, lambda);
    ScaledValue g = j2.b.scaled_by_real(m).add(j1.b.scaled_by_real(m - 1));
    ScaledValue dg = j2.db.scaled_by_real(m).add(j1.db.scaled_by_real(m - 1));
    return {g, dg};
}

int count_zeros(const ScalarFn& fn, const SearchBox& box, const SpeedHint& speed) {
    if (!fn) throw DomainError("count_zeros: empty function");
    check_box(box);
    const double diam = box.diameter();
    for (int attempt = 0; attempt <= kPerturbTries; ++attempt) {
        const SearchBox b = expanded(box, attempt * kPerturbFraction * diam);
        try {
            return winding_rectangle(fn, b, speed);
        } catch (const NearContourZero&) {
            continue;
        }
    }
    throw ContourError(
        "count_zeros: a zero stayed within 1e-6 of the contour through all "
        "perturbations");
}

Refined refine_zero(const JetFn& fn, cplx seed, double tol) {
    if (!fn) throw DomainError("refine_zero: empty function");
    check_point(seed, "refine_zero");
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw DomainError("refine_zero: tolerance must be positive");

    cplx z = seed;
    bool converged = false;
    double prev_step = 0.0, prev_ratio = 0.0;
    int ratio_streak = 0;
    double mult = 1.0;
    for (int it = 0; it < 50; ++it) {
        const std::array<ScaledValue, 2> j = fn(z);
        if (j[0].is_zero()) {
            converged = true;
            break;
        }
        if (j[1].is_zero())
            throw NoConvergence("refine_zero: derivative vanished at a non-zero");
        const ScaledValue q = j[0] / j[1];
        if (q.log_modulus() > 690.0)
            throw NoConvergence("refine_zero: Newton step overflowed");
        const cplx raw = q.to_complex();
        const cplx step = mult * raw;
        z -= step;
        if (std::abs(step) < tol) {
            converged = true;
            break;
        }
        // Linear convergence with ratio (k-1)/k betrays a k-fold zero; the
        // re-scaled step restores the quadratic rate.
        const double s = std::abs(raw);
        if (mult == 1.0 && prev_step > 0.0) {
            const double ratio = s / prev_step;
            if (ratio > 0.4 && ratio < 0.95 && std::abs(ratio - prev_ratio) < 0.05) {
                if (++ratio_streak >= 2)
                    mult = std::clamp(std::round(1.0 / (1.0 - ratio)), 2.0, 12.0);
            } else {
                ratio_streak = 0;
            }
            prev_ratio = ratio;
        }
        prev_step = s;
    }
    if (!converged)
        throw NoConvergence("refine_zero: 50 Newton iterations without |step| < tol");

    const int order = circle_order(fn, z);
    if (order < 1)
        throw NoConvergence("refine_zero: refined point has zero winding (not a zero)");
    return {z, order};
}

std::vector<ResonanceRecord> find_resonances(const pw::BallProblem& p, int m,
                                             double r_max, SearchReport* report) {
    if (m == 0) throw DomainError("find_resonances: sheet 0 carries no resonances");
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw DomainError("find_resonances: r_max must be positive");

    const int mm = std::abs(m);
    // Zeros contributed by order nu appear only at |lambda| R > ~nu; two
    // certified-empty l stop the loop long before this cap.
    const int l_cap = static_cast<int>(std::ceil(r_max * p.radius)) + 200;
    const int window = std::clamp(thread_count(), 1, 4);

    SearchReport rep;
    struct Found {
        int l;
        cplx z;
        int order;
    };
    std::vector<Found> found;

    int l_next = 0, empty_streak = 0;
    bool stopped = false;
    while (!stopped) {
        if (l_next > l_cap)
            throw TruncationError(
                "find_resonances: no two consecutive empty angular momenta below the cap");
        const int w_lo = l_next;
        const int w_hi = std::min(l_cap + 1, l_next + window);
        std::vector<LScan> scans(w_hi - w_lo);
        parallel_for(scans.size(), [&](std::size_t i) {
            scans[i] = scan_l(p, w_lo + static_cast<int>(i), mm, r_max);
        });
        for (std::size_t i = 0; i < scans.size() && !stopped; ++i) {
            const LScan& s = scans[i];
            const int l = w_lo + static_cast<int>(i);
            rep.boxes_counted += s.boxes;
            rep.boxes_errored += s.errored;
            rep.partial = rep.partial || s.gave_up;
            long long orders = 0;
            for (const Refined& r : s.zeros) orders += r.order;
            if (orders != s.region_count) rep.count_mismatch = true;
            rep.per_l.emplace_back(l, s.region_count);
            for (const Refined& r : s.zeros) found.push_back({l, r.zero, r.order});
            if (s.region_count == 0 && s.zeros.empty()) {
                if (++empty_streak == 2) {
                    rep.l_last = l;
                    stopped = true;
                }
            } else {
                empty_streak = 0;
            }
        }
        l_next = w_hi;
    }
    rep.partial = rep.partial || rep.count_mismatch;

    // The rectangular boxes cover the half-disk but their corners stick out
    // to modulus r_max * sqrt(2); zeros refined there are real zeros, just
    // outside the requested disk, so they leave through the ledger.
    std::erase_if(found, [&](const Found& f) {
        if (std::abs(f.z) <= r_max) return false;
        rep.dropped_mult +=
            static_cast<long long>(f.order) * pw::multiplicity(f.l, p.dim);
        return true;
    });

    // Coincident zeros from different l carry the summed multiplicity of
    // every factor vanishing there; such accidental degeneracies are flagged.
    std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
        if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
        if (a.z.imag() != b.z.imag()) return a.z.imag() < b.z.imag();
        return a.l < b.l;
    });
    std::vector<ResonanceRecord> out;
    std::vector<cplx> positions;
    for (const Found& f : found) {
        const std::int64_t mult =
            static_cast<std::int64_t>(f.order) * pw::multiplicity(f.l, p.dim);
        if (!out.empty() && std::abs(positions.back() - f.z) < kMergeZero) {
            ResonanceRecord& r = out.back();
            r.l = std::min(r.l, f.l);
            r.zero_order += f.order;
            r.total_mult += mult;
            r.merged = true;
            ++rep.merged_records;
            continue;
        }
        const double theta = std::arg(f.z); // in (0, pi): zeros sit in the open UHP
        const double arg_on_sheet = m >= 1 ? theta + m * M_PI : (m + 1) * M_PI - theta;
        ResonanceRecord r;
        r.location = logcover::LogPoint{std::abs(f.z), arg_on_sheet};
        r.l = f.l;
        r.zero_order = f.order;
        r.total_mult = mult;
        const ScaledValue g = sheet_function(p, f.l, mm, f.z);
        r.residual_log10 = g.is_zero() ? -400.0 : g.log_modulus() / std::log(10.0);
        out.push_back(r);
        positions.push_back(f.z);
    }

    std::sort(out.begin(), out.end(), [](const ResonanceRecord& a, const ResonanceRecord& b) {
        if (a.l != b.l) return a.l < b.l;
        if (a.location.modulus != b.location.modulus)
            return a.location.modulus < b.location.modulus;
        return a.location.arg < b.location.arg;
    });
    if (report) *report = std::move(rep);
    return out;
}

CountingTable counting_function(int m, const std::vector<ResonanceRecord>& records,
                                const std::vector<double>& r_grid) {
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (!(r_grid[i] > 0.0) || !std::isfinite(r_grid[i]))
            throw DomainError("counting_function: grid radii must be positive");
        if (i > 0 && !(r_grid[i] > r_grid[i - 1]))
            throw DomainError("counting_function: grid must be strictly increasing");
    }
    CountingTable t;
    t.sheet_m = m;
    t.r_grid = r_grid;
    t.counts.reserve(r_grid.size());
    for (double r : r_grid) {
        std::int64_t n = 0;
        for (const ResonanceRecord& rec : records)
            if (rec.location.modulus < r) n += rec.total_mult;
        t.counts.push_back(n);
    }
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i < r_grid.size(); ++i)
        if (t.counts[i] > 0)
            samples.emplace_back(r_grid[i], static_cast<double>(t.counts[i]));
    try {
        t.fit = detfm::fit_growth(samples);
        t.fit_valid = true;
    } catch (const FitError&) {
        t.fit_valid = false;
    }
    return t;
}

} // namespace reslab::resonances
