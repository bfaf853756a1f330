#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "reslab/detfm.hpp"
#include "reslab/partialwave.hpp"

// Shared between the argument layer (cli.cpp) and the command runners
// (commands.cpp). Every knob a runner consumes lives in one of the *Args
// structs so that a manifest round-trips a run exactly.
namespace reslab::cli {

struct ProblemArgs {
    int dim = 2;
    double radius = 1.0;
    std::string bc = "dirichlet";
    double h0 = 0.0;
    double l_factor = 2.0;
    double tail_tol = 1e-10;
    int max_l = 20000;
    std::string out = ".";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ProblemArgs, dim, radius, bc, h0, l_factor, tail_tol,
                                   max_l, out)

struct ResonancesArgs {
    ProblemArgs pr;
    int sheet = 1;
    double rmax = 20.0;
    int grid = 8;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ResonancesArgs, pr, sheet, rmax, grid)

struct DetGrowthArgs {
    ProblemArgs pr;
    std::string axis = "imag";
    int sheet = 1;
    int points = 12;
    double min = 5.0;
    double max = 60.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DetGrowthArgs, pr, axis, sheet, points, min, max)

// weyl and phasesum share the shape but not the defaults.
struct RangeArgs {
    ProblemArgs pr;
    int points = 7;
    double min = 10.0;
    double max = 40.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RangeArgs, pr, points, min, max)

struct DualityArgs {
    ProblemArgs pr;
    int l = 0;
    int k = 1;
    std::vector<double> deltas = {0.1, 0.05, 0.01};
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DualityArgs, pr, l, k, deltas)

struct SzeroArgs {
    ProblemArgs pr;
    std::vector<double> epsilons = {1e-2, 1e-4, 1e-6};
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SzeroArgs, pr, epsilons)

struct PlotArgs {
    std::string input;
    std::string kind = "loglog";
    std::string out = ".";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PlotArgs, input, kind, out)

partialwave::BallProblem make_problem(const ProblemArgs& a);
detfm::DetConfig make_det(const ProblemArgs& a);

// Everything a command produced, before it touches the filesystem.
struct RunOutput {
    std::map<std::string, std::string> files; // name -> bytes, written into --out
    nlohmann::json summary;                   // becomes files["summary.json"] when non-null
    bool pass = true;
    bool partial = false;
};

RunOutput run_resonances(const ResonancesArgs& a);
RunOutput run_detgrowth(const DetGrowthArgs& a);
RunOutput run_weyl(const RangeArgs& a);
RunOutput run_phasesum(const RangeArgs& a);
RunOutput run_duality(const DualityArgs& a);
RunOutput run_szero(const SzeroArgs& a);
RunOutput run_plot(const PlotArgs& a); // throws DataError with exit-65 semantics

// 17-significant-digit cell formatting: the value round-trips to the same
// double, and identical runs produce identical bytes.
void add_cell(std::string& row, double v);
void add_cell(std::string& row, long long v);
std::string fnv1a_hex(const std::string& bytes);

// Writes output files plus exactly one manifest.json; returns the exit code
// (0 pass, 1 failed checks, 2 partial).
int finish_run(const std::string& command, const nlohmann::json& params,
               const nlohmann::json& problem, const nlohmann::json& det,
               const std::string& out_dir, RunOutput&& ro, double wall_seconds);

// Data-level failure (malformed CSV/config/manifest): exit code 65.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flag-level failure detected after parsing (inconsistent values): exit 64.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace reslab::cli
