#include "reslab/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "cli_internal.hpp"
#include "reslab/selftest.hpp"

namespace reslab::cli {

namespace {

using nlohmann::json;

constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

// Defaults < config file < explicit flags. Options registered through Binder
// pick their value from the config JSON only when the flag was not given on
// the command line; config keys are the long option names without dashes.
class Binder {
  public:
    explicit Binder(CLI::App* sub) : sub_(sub) {}

    template <class T>
    CLI::Option* add(const std::string& flag, T& field, const std::string& desc) {
        auto* o = sub_->add_option(flag, field, desc)->capture_default_str();
        const std::string key = o->get_single_name();
        appliers_.push_back([o, key, &field](const json& cfg) {
            if (o->count() == 0 && cfg.contains(key)) cfg.at(key).get_to(field);
        });
        return o;
    }

    void apply(const json& cfg) const {
        for (const auto& f : appliers_) f(cfg);
    }

  private:
    CLI::App* sub_;
    std::vector<std::function<void(const json&)>> appliers_;
};

CLI::Validator even_dim() {
    return CLI::Validator(
        [](std::string& s) {
            const int d = std::atoi(s.c_str());
            return d >= 2 && d % 2 == 0 ? std::string{}
                                        : std::string{"dimension must be even and >= 2"};
        },
        "EVEN");
}

CLI::Validator nonzero_int() {
    return CLI::Validator(
        [](std::string& s) {
            return std::atoi(s.c_str()) != 0 ? std::string{} : std::string{"must be nonzero"};
        },
        "NONZERO");
}

void add_problem_flags(Binder& b, ProblemArgs& a) {
    b.add("--dim", a.dim, "space dimension (even, >= 2)")->check(even_dim());
    b.add("--radius", a.radius, "ball radius")->check(CLI::PositiveNumber);
    b.add("--bc", a.bc, "boundary condition")
        ->check(CLI::IsMember({"dirichlet", "neumann", "robin"}));
    b.add("--h0", a.h0, "robin coefficient (requires --bc robin)")
        ->check(CLI::NonNegativeNumber);
    b.add("--l-factor", a.l_factor, "truncation: initial l cut factor")
        ->check(CLI::PositiveNumber);
    b.add("--tail-tol", a.tail_tol, "truncation: absolute tail tolerance")
        ->check(CLI::PositiveNumber);
    b.add("--max-l", a.max_l, "truncation: hard cap on l")->check(CLI::Range(2, 1000000));
    b.add("--out", a.out, "output directory");
}

void check_problem(const ProblemArgs& a) {
    if (a.bc != "robin" && a.h0 != 0.0) throw UsageError("--h0 requires --bc robin");
}

json problem_json(const ProblemArgs& a) {
    return {{"d", a.dim}, {"R", a.radius}, {"bc", a.bc}, {"h0", a.bc == "robin" ? a.h0 : 0.0}};
}

json det_json(const ProblemArgs& a) {
    return {{"l_factor", a.l_factor}, {"tail_tol", a.tail_tol}, {"max_l", a.max_l}};
}

template <class Args>
int execute(const std::string& name, const Args& args, RunOutput (*runner)(const Args&)) {
    if constexpr (!std::is_same_v<Args, PlotArgs>) check_problem(args.pr);
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput ro = runner(args);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if constexpr (std::is_same_v<Args, PlotArgs>) {
        return finish_run(name, json(args), json(nullptr), json(nullptr), args.out,
                          std::move(ro), wall);
    } else {
        return finish_run(name, json(args), problem_json(args.pr), det_json(args.pr),
                          args.pr.out, std::move(ro), wall);
    }
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"scattering resonances and S-matrix spectra for balls in even dimensions"};
    app.set_version_flag("--version", "reslab 0.1.0");
    app.require_subcommand(0, 1);

    std::string config_path, manifest_path, out_override;
    app.add_option("--config", config_path, "JSON config file (flags take precedence)");
    app.add_option("--from-manifest", manifest_path, "re-run a recorded manifest verbatim");
    app.add_option("--out-override", out_override,
                   "with --from-manifest: redirect outputs to this directory");

    ResonancesArgs res;
    DetGrowthArgs gro;
    RangeArgs wey;
    RangeArgs pha;
    pha.min = 5.0;
    pha.max = 40.0;
    DualityArgs dua;
    SzeroArgs sze;
    PlotArgs plo;

    // replayers keyed by manifest command name; chosen/active set by the
    // parsed subcommand's callback
    std::map<std::string, std::function<int(const json&, const std::string&)>> replay;
    std::vector<std::shared_ptr<Binder>> binders;
    std::function<int()> chosen;
    const Binder* active = nullptr;

    auto wire = [&](const char* name, const char* desc, auto& args, auto runner, auto&& extra) {
        auto* sub = app.add_subcommand(name, desc);
        sub->fallthrough(); // global flags (--config, ...) may follow the subcommand
        auto binder = std::make_shared<Binder>(sub);
        binders.push_back(binder);
        if constexpr (!std::is_same_v<std::decay_t<decltype(args)>, PlotArgs>)
            add_problem_flags(*binder, args.pr);
        extra(*binder, args);
        sub->callback([&, name, binder, runner] {
            chosen = [&, name, runner] { return execute(name, args, runner); };
            active = binder.get();
        });
        replay[name] = [&args, name, runner](const json& params, const std::string& out) {
            params.get_to(args);
            if (!out.empty()) {
                if constexpr (std::is_same_v<std::decay_t<decltype(args)>, PlotArgs>)
                    args.out = out;
                else
                    args.pr.out = out;
            }
            return execute(name, args, runner);
        };
    };

    wire("resonances", "locate resonances on a sheet and fit the counting function", res,
         &run_resonances, [](Binder& b, ResonancesArgs& a) {
             b.add("--sheet", a.sheet, "sheet index m (nonzero)")->check(nonzero_int());
             b.add("--rmax", a.rmax, "search radius")->check(CLI::PositiveNumber);
             b.add("--grid", a.grid, "counting grid size")->check(CLI::Range(1, 10000));
         });
    wire("detgrowth", "determinant growth along an axis", gro, &run_detgrowth,
         [](Binder& b, DetGrowthArgs& a) {
             b.add("--axis", a.axis, "imag | real | negray")
                 ->check(CLI::IsMember({"imag", "real", "negray"}));
             b.add("--sheet", a.sheet, "determinant index m (nonzero)")->check(nonzero_int());
             b.add("--points", a.points, "grid size")->check(CLI::Range(2, 10000));
             b.add("--min", a.min, "grid start")->check(CLI::PositiveNumber);
             b.add("--max", a.max, "grid end")->check(CLI::PositiveNumber);
         });
    wire("weyl", "scattering phase against the volume term", wey, &run_weyl,
         [](Binder& b, RangeArgs& a) {
             b.add("--points", a.points, "grid size")->check(CLI::Range(3, 10000));
             b.add("--min", a.min, "grid start")->check(CLI::PositiveNumber);
             b.add("--max", a.max, "grid end")->check(CLI::PositiveNumber);
         });
    wire("phasesum", "folded-eigenphase defect sums", pha, &run_phasesum,
         [](Binder& b, RangeArgs& a) {
             b.add("--points", a.points, "grid size")->check(CLI::Range(2, 10000));
             b.add("--min", a.min, "grid start")->check(CLI::PositiveNumber);
             b.add("--max", a.max, "grid end")->check(CLI::PositiveNumber);
         });
    wire("duality", "interior-eigenvalue approach of a scattering coefficient", dua,
         &run_duality, [](Binder& b, DualityArgs& a) {
             b.add("--l", a.l, "angular momentum")->check(CLI::NonNegativeNumber);
             b.add("--k", a.k, "interior zero index (1-based)")->check(CLI::PositiveNumber);
             b.add("--deltas", a.deltas, "positive decreasing offsets");
         });
    wire("szero", "scattering coefficients at the spectrum bottom", sze, &run_szero,
         [](Binder& b, SzeroArgs& a) {
             b.add("--epsilons", a.epsilons, "positive decreasing frequencies");
         });
    wire("plot", "emit a gnuplot script for a CSV", plo, &run_plot, [](Binder& b, PlotArgs& a) {
        b.add("--input", a.input, "CSV file to plot")->required();
        b.add("--kind", a.kind, "loglog | linear")
            ->check(CLI::IsMember({"loglog", "linear"}));
        b.add("--out", a.out, "output directory");
    });

    auto* selftest = app.add_subcommand("bessel-selftest",
                                        "compare the production evaluators with the "
                                        "multiprecision series oracle");
    selftest->group(""); // hidden: a diagnostic, not part of the documented surface
    selftest->callback(
        [&] { chosen = [] { return reslab::selftest::run_bessel_selftest(std::cout) ? 0 : 1; }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (!manifest_path.empty()) {
            std::ifstream f(manifest_path);
            if (!f) throw DataError("cannot read manifest " + manifest_path);
            json manifest;
            try {
                manifest = json::parse(f);
            } catch (const json::exception& e) {
                throw DataError(std::string("malformed manifest: ") + e.what());
            }
            const std::string cmd = manifest.value("command", "");
            const auto it = replay.find(cmd);
            if (it == replay.end()) throw DataError("manifest names unknown command: " + cmd);
            try {
                return it->second(manifest.at("params"), out_override);
            } catch (const json::exception& e) {
                throw DataError(std::string("malformed manifest params: ") + e.what());
            }
        }

        if (!chosen) {
            std::cerr << app.help();
            return kExitUsage;
        }
        if (!config_path.empty() && active != nullptr) {
            std::ifstream f(config_path);
            if (!f) throw DataError("cannot read config " + config_path);
            json cfg;
            try {
                cfg = json::parse(f);
            } catch (const json::exception& e) {
                throw DataError(std::string("malformed config: ") + e.what());
            }
            active->apply(cfg);
        }
        return chosen();
    } catch (const UsageError& e) {
        std::cerr << "reslab: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "reslab: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "reslab: " << e.what() << "\n";
        return kExitNumeric;
    }
}

} // namespace reslab::cli
