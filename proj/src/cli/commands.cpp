#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_internal.hpp"
#include "reslab/resonances.hpp"
#include "reslab/spectral.hpp"

namespace reslab::cli {

namespace pw = reslab::partialwave;
namespace rs = reslab::resonances;
namespace sp = reslab::spectral;
using nlohmann::json;

pw::BallProblem make_problem(const ProblemArgs& a) {
    pw::BoundaryCondition bc = pw::BoundaryCondition::dirichlet();
    if (a.bc == "neumann") bc = pw::BoundaryCondition::neumann();
    if (a.bc == "robin") bc = pw::BoundaryCondition::robin(a.h0);
    return {a.dim, a.radius, bc};
}

detfm::DetConfig make_det(const ProblemArgs& a) {
    detfm::DetConfig d;
    d.l_factor = a.l_factor;
    d.tail_tol = a.tail_tol;
    d.max_l = a.max_l;
    return d;
}

namespace {

std::vector<double> lin_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    g.back() = hi;
    return g;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    g.back() = hi;
    return g;
}

json fit_json(const detfm::GrowthFit& f) {
    return {{"exponent", f.exponent}, {"log_coeff", f.log_coeff}, {"residual", f.residual}};
}

double median_abs(std::vector<double> v) {
    for (double& x : v) x = std::fabs(x);
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

} // namespace

RunOutput run_resonances(const ResonancesArgs& a) {
    const auto p = make_problem(a.pr);
    rs::SearchReport rep;
    const auto recs = rs::find_resonances(p, a.sheet, a.rmax, &rep);

    RunOutput ro;
    std::string csv = "sheet_m,l,re_lambda0,im_lambda0,modulus,arg_on_sheet,zero_order,mult,"
                      "residual_log10\n";
    long long total_mult = 0;
    for (const auto& r : recs) {
        const double theta0 = a.sheet >= 1 ? r.location.arg - a.sheet * M_PI
                                           : (a.sheet + 1) * M_PI - r.location.arg;
        std::string row;
        add_cell(row, static_cast<long long>(a.sheet));
        add_cell(row, static_cast<long long>(r.l));
        add_cell(row, r.location.modulus * std::cos(theta0));
        add_cell(row, r.location.modulus * std::sin(theta0));
        add_cell(row, r.location.modulus);
        add_cell(row, r.location.arg);
        add_cell(row, static_cast<long long>(r.zero_order));
        add_cell(row, static_cast<long long>(pw::multiplicity(r.l, p.dim)));
        add_cell(row, r.residual_log10);
        csv += row + "\n";
        total_mult += r.total_mult;
    }
    ro.files["resonances.csv"] = csv;

    const auto grid = lin_grid(a.rmax / a.grid, a.rmax, a.grid);
    const auto table = rs::counting_function(a.sheet, recs, grid);
    std::string cnt;
    cnt += "# dim " + std::to_string(p.dim) + "\n";
    cnt += "r,count\n";
    json jr = json::array(), jn = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::string row;
        add_cell(row, grid[i]);
        add_cell(row, static_cast<long long>(table.counts[i]));
        cnt += row + "\n";
        jr.push_back(grid[i]);
        jn.push_back(table.counts[i]);
    }
    ro.files["counting.csv"] = cnt;

    long long contour_mult = 0;
    for (const auto& [l, c] : rep.per_l) contour_mult += c * pw::multiplicity(l, p.dim);
    const bool ledger_ok = contour_mult == total_mult + rep.dropped_mult;

    ro.partial = rep.partial;
    ro.pass = !rep.partial && !rep.count_mismatch && rep.boxes_errored == 0 && ledger_ok;
    ro.summary = {{"m", a.sheet},
                  {"r_max", a.rmax},
                  {"records", recs.size()},
                  {"total_mult", total_mult},
                  {"dropped_mult", rep.dropped_mult},
                  {"l_last", rep.l_last},
                  {"boxes_counted", rep.boxes_counted},
                  {"boxes_errored", rep.boxes_errored},
                  {"merged_records", rep.merged_records},
                  {"partial", rep.partial},
                  {"count_mismatch", rep.count_mismatch},
                  {"ledger_consistent", ledger_ok},
                  {"counting", json{{"r", jr}, {"count", jn}}},
                  {"fit", table.fit_valid ? fit_json(table.fit) : json(nullptr)}};
    return ro;
}

namespace {

void check_span(double lo, double hi) {
    if (!(lo < hi)) throw UsageError("--min must be below --max");
}

void check_decreasing(const std::vector<double>& v, const char* flag) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!(v[i] > 0.0) || (i > 0 && !(v[i] < v[i - 1])))
            throw UsageError(std::string(flag) + " must be positive and strictly decreasing");
}

} // namespace

RunOutput run_detgrowth(const DetGrowthArgs& a) {
    check_span(a.min, a.max);
    const auto p = make_problem(a.pr);
    const auto det = make_det(a.pr);
    const auto grid = log_grid(a.min, a.max, a.points);
    const int m = a.sheet;

    RunOutput ro;
    detfm::EvalInfo info;
    int l_max_used = 0;

    if (a.axis == "imag") {
        std::string csv = "sigma,log_abs_fm,log_abs_fm_direct,rel_gap\n";
        std::vector<std::pair<double, double>> samples;
        double max_gap = 0.0;
        for (double s : grid) {
            const double q = detfm::log_abs_fm_imaginary(p, m, s, det, &info);
            const double d = detfm::log_fm(p, m, {0.0, s}, det).real();
            const double gap = std::fabs(q - d) / std::max(1.0, std::fabs(q));
            std::string row;
            add_cell(row, s);
            add_cell(row, q);
            add_cell(row, d);
            add_cell(row, gap);
            csv += row + "\n";
            samples.push_back({s, q});
            max_gap = std::max(max_gap, gap);
            l_max_used = std::max(l_max_used, info.l_max_used);
        }
        ro.files["detgrowth.csv"] = csv;
        const auto fit = detfm::fit_growth(samples);
        const bool band = std::fabs(fit.exponent - p.dim) <= 0.1 * p.dim;
        ro.pass = band && max_gap <= 1e-8;
        ro.summary = {{"axis", a.axis},          {"m", m},
                      {"fit", fit_json(fit)},    {"max_rel_gap", max_gap},
                      {"exponent_in_band", band}, {"l_max_used", l_max_used}};
        return ro;
    }

    // real axis and the arg = pi ray share the |f_m| >= 1 lower bound and the
    // O(r^{d-1}) normalized upper bound; the pi ray additionally cross-checks
    // its two evaluation routes.
    const bool negray = a.axis == "negray";
    std::string csv = negray ? "r,log_abs_reflected,log_abs_continued,abs_gap\n"
                             : "r,re_log_fm,normalized\n";
    std::vector<double> normalized;
    double min_val = 1e300, max_gap = 0.0;
    for (double r : grid) {
        std::string row;
        double v = 0.0;
        if (negray) {
            v = detfm::log_abs_fm_negative_ray(p, m, r, det, &info, detfm::NegRayPath::Reflected);
            const double c =
                detfm::log_abs_fm_negative_ray(p, m, r, det, nullptr, detfm::NegRayPath::Continued);
            const double gap = std::fabs(v - c);
            add_cell(row, r);
            add_cell(row, v);
            add_cell(row, c);
            add_cell(row, gap);
            max_gap = std::max(max_gap, gap / std::max(1.0, std::fabs(v)));
        } else {
            v = detfm::log_fm(p, m, {r, 0.0}, det, &info).real();
            add_cell(row, r);
            add_cell(row, v);
            add_cell(row, v / std::pow(r, p.dim - 1));
        }
        csv += row + "\n";
        normalized.push_back(v / std::pow(r, p.dim - 1));
        min_val = std::min(min_val, v);
        l_max_used = std::max(l_max_used, info.l_max_used);
    }
    ro.files["detgrowth.csv"] = csv;
    const double med = median_abs(normalized);
    double top = 0.0;
    for (double x : normalized) top = std::max(top, std::fabs(x));
    const bool lower_ok = min_val >= -1e-9;
    const bool bounded = top < 10.0 * med;
    ro.pass = lower_ok && bounded && (!negray || max_gap <= 1e-8);
    ro.summary = {{"axis", a.axis},
                  {"m", m},
                  {"min_log_abs", min_val},
                  {"max_normalized", top},
                  {"median_normalized", med},
                  {"lower_bound_ok", lower_ok},
                  {"normalized_bounded", bounded},
                  {"l_max_used", l_max_used}};
    if (negray) ro.summary["max_rel_gap"] = max_gap;
    return ro;
}

RunOutput run_weyl(const RangeArgs& a) {
    check_span(a.min, a.max);
    const auto p = make_problem(a.pr);
    sp::SpectralConfig cfg;
    cfg.det = make_det(a.pr);
    const auto rep = sp::weyl_report(p, lin_grid(a.min, a.max, a.points), cfg);

    RunOutput ro;
    std::string csv = "r,phase,weyl_term,defect,normalized\n";
    for (std::size_t i = 0; i < rep.r_grid.size(); ++i) {
        std::string row;
        add_cell(row, rep.r_grid[i]);
        add_cell(row, rep.phase[i]);
        add_cell(row, rep.weyl_term[i]);
        add_cell(row, rep.defect[i]);
        add_cell(row, rep.normalized[i]);
        csv += row + "\n";
    }
    ro.files["weyl.csv"] = csv;

    const double med = median_abs(rep.normalized);
    double top = 0.0;
    for (double x : rep.normalized) top = std::max(top, std::fabs(x));
    ro.pass = top < 10.0 * med;
    ro.summary = {{"c_weyl", rep.c_weyl},
                  {"c_interior_fit", rep.c_interior_fit},
                  {"fit_rel_err", std::fabs(rep.c_interior_fit - rep.c_weyl) / rep.c_weyl},
                  {"max_normalized", top},
                  {"median_normalized", med},
                  {"l_max_used", rep.l_max_used}};
    return ro;
}

RunOutput run_phasesum(const RangeArgs& a) {
    check_span(a.min, a.max);
    const auto p = make_problem(a.pr);
    sp::SpectralConfig cfg;
    cfg.det = make_det(a.pr);
    const auto grid = log_grid(a.min, a.max, a.points);

    RunOutput ro;
    std::string csv = "r,defect_sum,normalized\n";
    std::vector<std::pair<double, double>> samples;
    for (double r : grid) {
        const double v = sp::phase_defect_sum(p, r, cfg);
        std::string row;
        add_cell(row, r);
        add_cell(row, v);
        add_cell(row, v / std::pow(r, p.dim - 1));
        csv += row + "\n";
        samples.push_back({r, v});
    }
    ro.files["phasesum.csv"] = csv;
    const auto fit = detfm::fit_growth(samples);
    const double ratio = fit.exponent / (p.dim - 1);
    ro.pass = ratio >= 0.7 && ratio <= 1.3;
    ro.summary = {{"fit", fit_json(fit)}, {"exponent_over_expected", ratio}};
    return ro;
}

RunOutput run_duality(const DualityArgs& a) {
    check_decreasing(a.deltas, "--deltas");
    const auto p = make_problem(a.pr);
    const auto samples = sp::duality_probe(p, a.l, a.k, a.deltas);

    RunOutput ro;
    std::string csv = "delta,re_e,im_e,deviation\n";
    bool signs_ok = true, monotone = true;
    double prev = 1e300;
    json jrows = json::array();
    for (const auto& s : samples) {
        const double dev = std::abs(s.e - 1.0);
        std::string row;
        add_cell(row, s.delta);
        add_cell(row, s.e.real());
        add_cell(row, s.e.imag());
        add_cell(row, dev);
        csv += row + "\n";
        signs_ok = signs_ok && (p.bc.is_dirichlet() ? s.e.imag() > 0.0 : s.e.imag() < 0.0);
        monotone = monotone && dev < prev;
        prev = dev;
        jrows.push_back({{"delta", s.delta}, {"re_e", s.e.real()}, {"im_e", s.e.imag()},
                         {"deviation", dev}});
    }
    ro.files["duality.csv"] = csv;
    ro.pass = signs_ok && monotone;
    ro.summary = {{"l", a.l},
                  {"k", a.k},
                  {"approach", p.bc.is_dirichlet() ? "below" : "above"},
                  {"signs_ok", signs_ok},
                  {"deviation_monotone", monotone},
                  {"samples", jrows}};
    return ro;
}

RunOutput run_szero(const SzeroArgs& a) {
    check_decreasing(a.epsilons, "--epsilons");
    const auto p = make_problem(a.pr);
    const auto rows = sp::s_zero_limit(p, a.epsilons);

    RunOutput ro;
    std::string csv = "epsilon,deviation\n";
    bool decreasing = true;
    json jrows = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string row;
        add_cell(row, rows[i].epsilon);
        add_cell(row, rows[i].deviation);
        csv += row + "\n";
        if (i > 0) decreasing = decreasing && rows[i].deviation < rows[i - 1].deviation;
        jrows.push_back({{"epsilon", rows[i].epsilon}, {"deviation", rows[i].deviation}});
    }
    ro.files["szero.csv"] = csv;
    ro.pass = decreasing;
    ro.summary = {{"strictly_decreasing", decreasing}, {"rows", jrows}};
    return ro;
}

namespace {

// Minimal CSV intake for plotting: '#' comment lines may carry "# key value"
// metadata; the first real line is the header.
struct PlotData {
    std::vector<std::string> columns;
    double x_last = 0.0, y_last = 0.0;
    std::size_t rows = 0;
    std::map<std::string, std::string> meta;
};

PlotData read_plot_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("plot: cannot read " + path);
    PlotData d;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream is(line.substr(1));
            std::string key, value;
            if (is >> key >> value) d.meta[key] = value;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (d.columns.empty()) {
            if (cells.size() < 2) throw DataError("plot: header needs at least two columns");
            d.columns = cells;
            continue;
        }
        if (cells.size() < 2) throw DataError("plot: short row in " + path);
        char* endx = nullptr;
        char* endy = nullptr;
        const double x = std::strtod(cells[0].c_str(), &endx);
        const double y = std::strtod(cells[1].c_str(), &endy);
        if (endx == cells[0].c_str() || endy == cells[1].c_str())
            throw DataError("plot: non-numeric row in " + path);
        d.x_last = x;
        d.y_last = y;
        ++d.rows;
    }
    if (d.columns.empty()) throw DataError("plot: no header in " + path);
    if (d.rows == 0) throw DataError("plot: no data rows in " + path);
    return d;
}

} // namespace

RunOutput run_plot(const PlotArgs& a) {
    const auto d = read_plot_csv(a.input);

    std::string s;
    s += "# generated by reslab plot\n";
    s += "set datafile separator \",\"\n";
    if (a.kind == "loglog") s += "set logscale xy\n";
    s += "set xlabel \"" + d.columns[0] + "\"\n";
    s += "set ylabel \"" + d.columns[1] + "\"\n";
    s += "set key top left\n";
    s += "plot \"" + a.input + "\" every ::1 using 1:2 with linespoints pointtype 7 title \"" +
         d.columns[1] + "\"";
    // counting-style files carry their dimension; add the slope-d reference
    if (a.kind == "loglog" && d.meta.count("dim") && d.y_last > 0.0) {
        const int dim = std::atoi(d.meta.at("dim").c_str());
        if (dim > 0) {
            const double coeff = d.y_last / std::pow(d.x_last, dim);
            std::string c;
            add_cell(c, coeff);
            s += ", \\\n     " + c + " * x**" + std::to_string(dim) +
                 " with lines dashtype 2 title \"slope " + std::to_string(dim) + " reference\"";
        }
    }
    s += "\n";

    RunOutput ro;
    const std::string stem = std::filesystem::path(a.input).stem().string();
    ro.files[stem + ".gp"] = s;
    return ro;
}

} // namespace reslab::cli
